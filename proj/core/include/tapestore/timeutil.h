// Copyright 2026 The tapestore authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TAPESTORE_TIMEUTIL_H_
#define TAPESTORE_TIMEUTIL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tapestore {

// All timestamps in the store are UTC at seconds precision.
using UtcSeconds = std::int64_t;

// Renders `YYYY-MM-DDThh:mm:ssZ` (the OAI-PMH seconds granularity form).
std::string FormatIso(UtcSeconds t);

// Renders the 14-digit `YYYYMMDDHHMMSS` form used in ARC header lines.
std::string FormatArcDate(UtcSeconds t);

// Strict parsers: exact field widths, real calendar dates, no timezone
// offsets other than the literal 'Z'. Reject anything else.
std::optional<UtcSeconds> ParseIso(std::string_view s);
std::optional<UtcSeconds> ParseArcDate(std::string_view s);

// Parses `YYYY-MM-DD`, returning midnight UTC of that day. OAI-PMH requires
// repositories to accept day granularity even when they serve seconds.
std::optional<UtcSeconds> ParseIsoDate(std::string_view s);

// System clock, truncated to seconds.
UtcSeconds NowUtcSeconds();

}  // namespace tapestore

#endif  // TAPESTORE_TIMEUTIL_H_

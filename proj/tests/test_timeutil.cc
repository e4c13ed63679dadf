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

#include "tapestore/timeutil.h"

#include <doctest.h>

#include <random>

using namespace tapestore;

TEST_CASE("iso formatting of known instants") {
  CHECK(FormatIso(0) == "1970-01-01T00:00:00Z");
  CHECK(FormatIso(946684800) == "2000-01-01T00:00:00Z");
  CHECK(FormatIso(951827696) == "2000-02-29T12:34:56Z");  // leap day
  CHECK(FormatArcDate(946684800) == "20000101000000");
  CHECK(FormatArcDate(951827696) == "20000229123456");
}

TEST_CASE("strict iso parsing") {
  CHECK(ParseIso("1970-01-01T00:00:00Z") == 0);
  CHECK(ParseIso("2000-02-29T12:34:56Z") == 951827696);

  CHECK_FALSE(ParseIso(""));
  CHECK_FALSE(ParseIso("2000-01-01"));
  CHECK_FALSE(ParseIso("2000-01-01 00:00:00Z"));
  CHECK_FALSE(ParseIso("2000-01-01t00:00:00Z"));
  CHECK_FALSE(ParseIso("2000-01-01T00:00:00"));
  CHECK_FALSE(ParseIso("2000-01-01T00:00:00+00:00"));
  CHECK_FALSE(ParseIso("2001-02-29T00:00:00Z"));  // not a leap year
  CHECK_FALSE(ParseIso("2000-02-30T00:00:00Z"));
  CHECK_FALSE(ParseIso("2000-13-01T00:00:00Z"));
  CHECK_FALSE(ParseIso("2000-00-01T00:00:00Z"));
  CHECK_FALSE(ParseIso("2000-01-00T00:00:00Z"));
  CHECK_FALSE(ParseIso("2000-01-01T24:00:00Z"));
  CHECK_FALSE(ParseIso("2000-01-01T00:60:00Z"));
  CHECK_FALSE(ParseIso("2000-01-01T00:00:60Z"));
  CHECK_FALSE(ParseIso("2000-01-01T00:00:0xZ"));
}

TEST_CASE("arc date parsing agrees with iso") {
  CHECK(ParseArcDate("20000229123456") == ParseIso("2000-02-29T12:34:56Z"));
  CHECK_FALSE(ParseArcDate("2000022912345"));    // too short
  CHECK_FALSE(ParseArcDate("200002291234567"));  // too long
  CHECK_FALSE(ParseArcDate("20000230123456"));   // bad day
  CHECK_FALSE(ParseArcDate("2000a229123456"));
}

TEST_CASE("day form parses to midnight") {
  CHECK(ParseIsoDate("1970-01-01") == 0);
  CHECK(ParseIsoDate("2000-01-01") == 946684800);
  CHECK_FALSE(ParseIsoDate("2000-1-01"));
  CHECK_FALSE(ParseIsoDate("2000-01-32"));
}

TEST_CASE("format and parse are inverse over random instants") {
  std::mt19937_64 rng(7);
  // Between years 1 and 9999, the renderable window.
  std::uniform_int_distribution<UtcSeconds> dist(-62135596800, 253402300799);
  for (int i = 0; i < 20000; ++i) {
    const UtcSeconds t = dist(rng);
    const auto round_iso = ParseIso(FormatIso(t));
    REQUIRE(round_iso);
    CHECK(*round_iso == t);
    const auto round_arc = ParseArcDate(FormatArcDate(t));
    REQUIRE(round_arc);
    CHECK(*round_arc == t);
  }
}

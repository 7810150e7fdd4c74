// Copyright 2026 The driftforest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "driftforest/text.hpp"

using namespace driftforest;

TEST(FormatNumber, IntegralValuesPrintWithoutFraction) {
    EXPECT_EQ(text::format_number(0.0), "0");
    EXPECT_EQ(text::format_number(-0.0), "0");
    EXPECT_EQ(text::format_number(3.0), "3");
    EXPECT_EQ(text::format_number(-42.0), "-42");
    EXPECT_EQ(text::format_number(7264.0), "7264");
}

TEST(FormatNumber, FractionsUseShortestRoundTrip) {
    EXPECT_EQ(text::format_number(0.1), "0.1");
    EXPECT_EQ(text::format_number(12.375), "12.375");
    EXPECT_EQ(text::format_number(2.0 / 3.0), "0.6666666666666666");
    for (double v : {0.3, 1e-7, 123456.789, 5.5e20}) {
        EXPECT_EQ(*text::parse_number(text::format_number(v)), v);
    }
}

TEST(ParseNumber, AcceptsCommonSpellings) {
    EXPECT_EQ(text::parse_number("1.5"), 1.5);
    EXPECT_EQ(text::parse_number("+2"), 2.0);
    EXPECT_EQ(text::parse_number(" 3 "), 3.0);
    EXPECT_EQ(text::parse_number("1e3"), 1000.0);
    EXPECT_EQ(text::parse_number("-2.5E-1"), -0.25);
}

TEST(ParseNumber, RejectsTextAndNonFinite) {
    EXPECT_FALSE(text::parse_number(""));
    EXPECT_FALSE(text::parse_number("abc"));
    EXPECT_FALSE(text::parse_number("1.5x"));
    EXPECT_FALSE(text::parse_number("nan"));
    EXPECT_FALSE(text::parse_number("NaN"));
    EXPECT_FALSE(text::parse_number("inf"));
    EXPECT_FALSE(text::parse_number("-Infinity"));
}

TEST(SplitFields, HandlesQuotesAndEmptyCells) {
    const auto f = text::split_fields(R"(a,"b, c",,"say ""hi""", d )", ',');
    ASSERT_EQ(f.size(), 5u);
    EXPECT_EQ(f[0], "a");
    EXPECT_EQ(f[1], "b, c");
    EXPECT_EQ(f[2], "");
    EXPECT_EQ(f[3], "say \"hi\"");
    EXPECT_EQ(f[4], "d");
}

TEST(SplitFields, TrailingDelimiterYieldsEmptyField) {
    EXPECT_EQ(text::split_fields("1,2,", ',').size(), 3u);
}

TEST(DetectDelimiter, PrefersCommaUnlessOnlyTabs) {
    EXPECT_EQ(text::detect_delimiter("a,b,c"), ',');
    EXPECT_EQ(text::detect_delimiter("a\tb\tc"), '\t');
    EXPECT_EQ(text::detect_delimiter("a\tb,c"), ',');
}

TEST(Lines, StripsCarriageReturns) {
    const auto l = text::lines("a\r\nb\n\nc");
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "a");
    EXPECT_EQ(l[1], "b");
    EXPECT_EQ(l[2], "");
    EXPECT_EQ(l[3], "c");
}

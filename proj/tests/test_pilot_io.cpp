// SPDX-License-Identifier: Apache-2.0
//
// pilotload: pilot book construction and load-region analysis
// Copyright (C) 2026 The pilotload authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pilotload/baseline.hpp"
#include "pilotload/pilot_io.hpp"

using namespace pilotload;

TEST(PilotBookText, RoundTripIsExact)
{
    std::mt19937_64 rng(8);
    PilotBook book;
    book.users_per_cell = 3;
    book.design = PilotDesign::GWBE;
    book.Q = oracle::random_book(rng, 3, 9);
    std::ostringstream os;
    write_pilot_book(os, book, {"design=GWBE", "seed=1"});
    std::istringstream is(os.str());
    const PilotBook back = read_pilot_book(is, 3);
    EXPECT_EQ(back.design, PilotDesign::GWBE);
    EXPECT_EQ(back.users_per_cell, 3);
    EXPECT_TRUE((back.Q.array() == book.Q.array()).all());
    EXPECT_EQ(pilot_book_to_string(back), pilot_book_to_string(book));
}

TEST(PilotBookText, HeaderAndLayout)
{
    PilotBook book = wbe_design(make_config(1, 4, 3, 1.0, std::nullopt));
    const std::string text = pilot_book_to_string(book);
    EXPECT_EQ(text.substr(0, text.find('\n')), "3 4 WBE");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(PilotBookText, ParseErrors)
{
    auto kind = [](const char* text, int k = 1) {
        try {
            pilot_book_from_string(text, k);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    EXPECT_EQ(kind(""), ErrorKind::ParseError);
    EXPECT_EQ(kind("# only a comment\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind("2 2\n1 0\n0 1\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind("2 2 BOGUS\n1 0\n0 1\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind("2 2 FOS\n1 0\n0\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind("2 2 FOS\n1 0\n0 x\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind("2 3 FOS\n1 0 0\n0 1 0\n", 2), ErrorKind::ParseError);
    EXPECT_NO_THROW(pilot_book_from_string("# c\n\n2 2 FOS\n1 0\n0 1\n", 1));
}

TEST(NumberFormat, SeventeenDigitsAndSpecials)
{
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(1.0), "1");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(parse_number("inf"), std::numeric_limits<double>::infinity());
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double x = g(rng);
        EXPECT_EQ(parse_number(format_number(x)), x);
    }
}

TEST(Csv, QuotingAndRowWidth)
{
    CsvWriter w({"name", "value"});
    w.cell("plain").cell(1.5).end_row();
    w.cell("a,b \"q\"").cell(2).end_row();
    EXPECT_EQ(w.body(), "name,value\r\nplain,1.5\r\n\"a,b \"\"q\"\"\",2\r\n");
    w.cell("short");
    EXPECT_THROW(w.end_row(), Error);

    CsvWriter h({"x"});
    h.cell(true).end_row();
    const std::string text = h.str({"region", "GWBE;WBE", 42, "00ff", {}});
    EXPECT_NE(text.find("# seed=42"), std::string::npos);
    EXPECT_NE(text.find("# design=GWBE;WBE"), std::string::npos);
    EXPECT_NE(text.find("# config_hash=00ff"), std::string::npos);
    EXPECT_EQ(strip_provenance(text), "x\r\ntrue\r\n");
}

TEST(ConfigHash, CanonicalAndSensitive)
{
    const auto a = load_config(R"({"L":2,"K":2,"tau":1,"own":1.0,"cross":0.5})");
    const auto b = load_config("{ \"cross\": 0.5,\n \"own\": 1, \"tau\": 1, \"K\": 2, \"L\": 2 }");
    const auto c = load_config(R"({"L":2,"K":2,"tau":1,"own":1.0,"cross":0.51})");
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_NE(config_hash(a), config_hash(c));
    EXPECT_EQ(config_hash(a).size(), 16u);
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

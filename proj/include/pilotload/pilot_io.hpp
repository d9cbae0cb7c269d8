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

#ifndef PILOTLOAD_PILOT_IO_HPP
#define PILOTLOAD_PILOT_IO_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "netmodel.hpp"

namespace pilotload {

/// 17 significant digits, "inf" / "-inf" / "nan" for non-finite values.
inline std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_number(std::string_view s)
{
    const std::string t(s);
    if (t == "inf")
        return std::numeric_limits<double>::infinity();
    if (t == "-inf")
        return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "not a number: '" + t + "'");
    }
    if (used != t.size())
        throw Error(ErrorKind::ParseError, "trailing characters in number: '" + t + "'");
    return v;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Hash of the canonical serialization; stable across key order and whitespace.
inline std::string config_hash(const NetworkConfig& cfg)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(serialize_config(cfg))));
    return buf;
}

// ---------------------------------------------------------------- pilot books

/// Plain-text matrix: '#' comment lines, then "tau K_tot DESIGN", then tau
/// rows of K_tot numbers.
inline void write_pilot_book(std::ostream& os, const PilotBook& book, const std::vector<std::string>& comments = {})
{
    for (const auto& c : comments)
        os << "# " << c << '\n';
    os << book.pilot_length() << ' ' << book.total_users() << ' ' << to_string(book.design) << '\n';
    for (Eigen::Index r = 0; r < book.Q.rows(); ++r) {
        for (Eigen::Index c = 0; c < book.Q.cols(); ++c)
            os << (c ? " " : "") << format_number(book.Q(r, c));
        os << '\n';
    }
}

inline std::string pilot_book_to_string(const PilotBook& book)
{
    std::ostringstream os;
    write_pilot_book(os, book);
    return os.str();
}

inline PilotBook read_pilot_book(std::istream& is, int users_per_cell)
{
    std::string line;
    std::vector<std::string> tokens;
    bool header = false;
    long tau = 0, total = 0;
    PilotBook book;
    book.users_per_cell = users_per_cell;
    while (std::getline(is, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream ls(line);
        if (!header) {
            std::string tag;
            if (!(ls >> tau >> total >> tag) || tau < 1 || total < 1)
                throw Error(ErrorKind::ParseError, "pilot book header must read 'tau K_tot DESIGN'");
            try {
                book.design = design_from_string(tag);
            } catch (const Error&) {
                throw Error(ErrorKind::ParseError, "unknown design tag '" + tag + "'");
            }
            header = true;
            continue;
        }
        for (std::string tok; ls >> tok;)
            tokens.push_back(tok);
    }
    if (!header)
        throw Error(ErrorKind::ParseError, "empty pilot book");
    if (static_cast<long>(tokens.size()) != tau * total)
        throw Error(ErrorKind::ParseError,
            "expected " + std::to_string(tau * total) + " entries, found " + std::to_string(tokens.size()));
    if (users_per_cell < 1 || total % users_per_cell != 0)
        throw Error(ErrorKind::ParseError, "K_tot is not a multiple of K");
    book.Q.resize(tau, total);
    for (long r = 0; r < tau; ++r)
        for (long c = 0; c < total; ++c)
            book.Q(r, c) = parse_number(tokens[static_cast<std::size_t>(r * total + c)]);
    return book;
}

inline PilotBook pilot_book_from_string(std::string_view text, int users_per_cell)
{
    std::istringstream is{std::string(text)};
    return read_pilot_book(is, users_per_cell);
}

// ---------------------------------------------------------------- CSV

inline std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// Provenance lines written as '#' comments above the CSV header row.
struct OutputHeader {
    std::string kind;
    std::string designs;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::string> extra;
};

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns)
        : columns_(std::move(columns))
    {
    }

    CsvWriter& cell(std::string_view s)
    {
        row_.push_back(csv_field(s));
        return *this;
    }
    CsvWriter& cell(const char* s) { return cell(std::string_view(s)); }
    CsvWriter& cell(const std::string& s) { return cell(std::string_view(s)); }
    CsvWriter& cell(double x)
    {
        row_.push_back(format_number(x));
        return *this;
    }
    CsvWriter& cell(std::int64_t x)
    {
        row_.push_back(std::to_string(x));
        return *this;
    }
    CsvWriter& cell(int x) { return cell(static_cast<std::int64_t>(x)); }
    CsvWriter& cell(std::uint64_t x)
    {
        row_.push_back(std::to_string(x));
        return *this;
    }
    CsvWriter& cell(bool b)
    {
        row_.push_back(b ? "true" : "false");
        return *this;
    }

    void end_row()
    {
        if (row_.size() != columns_.size())
            throw Error(ErrorKind::InvalidArgument,
                "CSV row has " + std::to_string(row_.size()) + " fields, expected " + std::to_string(columns_.size()));
        rows_.push_back(join(row_));
        row_.clear();
    }

    std::size_t rows() const { return rows_.size(); }

    /// Header row plus records, without provenance comments.
    std::string body() const
    {
        std::string out;
        std::vector<std::string> head;
        for (const auto& c : columns_)
            head.push_back(csv_field(c));
        out += join(head) + "\r\n";
        for (const auto& r : rows_)
            out += r + "\r\n";
        return out;
    }

    std::string str(const OutputHeader& h) const
    {
        std::string out = "# kind=" + h.kind + "\r\n# design=" + h.designs + "\r\n# seed=" + std::to_string(h.seed)
            + "\r\n# config_hash=" + h.config_hash + "\r\n";
        for (const auto& e : h.extra)
            out += "# " + e + "\r\n";
        return out + body();
    }

    void save(const std::string& path, const OutputHeader& h) const
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
        os << str(h);
        if (!os)
            throw Error(ErrorKind::InvalidArgument, "write failed: " + path);
    }

private:
    static std::string join(const std::vector<std::string>& v)
    {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out += (i ? "," : "") + v[i];
        return out;
    }

    std::vector<std::string> columns_;
    std::vector<std::string> row_;
    std::vector<std::string> rows_;
};

/// Drops '#' provenance lines; what remains is compared for determinism.
inline std::string strip_provenance(std::string_view csv)
{
    std::string out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t end = csv.find('\n', pos);
        end = end == std::string_view::npos ? csv.size() : end + 1;
        if (csv[pos] != '#')
            out.append(csv.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

} // namespace pilotload

#endif

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

// pilotload command-line front end.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pilotload/experiments.hpp"

namespace fs = std::filesystem;
using namespace pilotload;

namespace {

constexpr const char* kExitCodes = R"(Exit codes:
  0  success
  1  error (bad configuration, parse or numerical failure, failed check)
  2  infeasible targets (outside the load region or above the 1/L cap)

Every flag can also be set through PILOTLOAD_<FLAG>, e.g. PILOTLOAD_SEED=7.)";

int exit_code(ErrorKind k)
{
    switch (k) {
    case ErrorKind::RegionViolation:
    case ErrorKind::MajorizationCapViolation:
    case ErrorKind::MajorizationViolation:
    case ErrorKind::InfeasibleFrame:
        return 2;
    default:
        return 1;
    }
}

std::string slurp(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::vector<PilotDesign> parse_designs(const std::string& list)
{
    std::vector<PilotDesign> out;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty())
            out.push_back(design_from_string(item));
    if (out.empty())
        throw Error(ErrorKind::InvalidArgument, "--designs is empty");
    return out;
}

void emit(const RunOutput& out, const std::string& dir)
{
    for (const auto& line : out.log)
        std::cout << line << '\n';
    if (out.artifacts.empty())
        return;
    fs::create_directories(dir);
    for (const auto& a : out.artifacts) {
        const fs::path path = fs::path(dir) / a.name;
        std::ofstream os(path, std::ios::binary);
        os << a.content;
        if (!os)
            throw std::runtime_error("cannot write " + path.string());
        std::cout << "wrote " << path.string() << '\n';
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pilot book design and load-region analysis"};
    app.footer(kExitCodes);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    std::string designs = "GWBE,WBE,FOS";
    std::int64_t trials = 100000;
    int grid = 0;
    bool points = false;
    unsigned workers = 0;
    std::string book_path;

    auto common = [&](CLI::App* sub, bool needs_config = true) {
        auto* c = sub->add_option("--config", config_path, "JSON configuration")->envname("PILOTLOAD_CONFIG");
        if (needs_config)
            c->required();
        sub->add_option("--out", out_dir, "output directory")->envname("PILOTLOAD_OUT")->capture_default_str();
        sub->add_option("--seed", seed, "random seed")->envname("PILOTLOAD_SEED")->capture_default_str();
        sub->add_option("--designs", designs, "comma-separated list of GWBE, WBE, FOS")
            ->envname("PILOTLOAD_DESIGNS")
            ->capture_default_str();
        sub->add_option("--workers", workers, "worker threads (0 = hardware)")->envname("PILOTLOAD_WORKERS");
    };

    auto* design = app.add_subcommand("design", "build pilot books and the design report");
    common(design);
    auto* region = app.add_subcommand("region", "load-region sweep over (gamma1, gamma2, gamma3)");
    common(region);
    region->add_option("--grid", grid, "points per axis (default from config, else 120)")->envname("PILOTLOAD_GRID");
    region->add_flag("--points", points, "evaluate every grid point and write region_points.csv")
        ->envname("PILOTLOAD_POINTS");
    auto* cells = app.add_subcommand("cells", "maximum permitted SINR versus number of cells");
    common(cells);
    auto* antennas = app.add_subcommand("antennas", "finite-antenna SINR of one user versus Nt");
    common(antennas);
    auto* validate = app.add_subcommand("validate", "closed-form SINR against Monte-Carlo simulation");
    common(validate);
    validate->add_option("--trials", trials, "Monte-Carlo trials")->envname("PILOTLOAD_TRIALS")->capture_default_str();
    auto* verify = app.add_subcommand("verify", "check a pilot book file");
    common(verify);
    verify->add_option("book", book_path, "pilot book text file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        const Experiment exp = load_experiment(slurp(config_path));
        RunOptions opts;
        opts.designs = parse_designs(designs);
        opts.seed = seed;
        opts.trials = trials;
        opts.points = points;
        opts.workers = workers;
        if (grid > 0)
            opts.grid = grid;

        RunOutput out;
        if (*design)
            out = run_design(exp, opts);
        else if (*region)
            out = run_region(exp, opts);
        else if (*cells)
            out = run_cells(exp, opts);
        else if (*antennas)
            out = run_antennas(exp, opts);
        else if (*validate)
            out = run_validate(exp, opts);
        else {
            std::istringstream is(slurp(book_path));
            const PilotBook book = read_pilot_book(is, exp.network.users_per_cell);
            out = run_verify(book, exp, opts);
        }
        emit(out, out_dir);
        return out.passed ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

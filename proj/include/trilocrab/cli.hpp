#pragma once

#include "trilocrab/lemmas.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace trilocrab {

enum ExitCode : int { EXIT_PASS = 0, EXIT_VERIFIED_FAILURE = 1, EXIT_INPUT_ERROR = 2, EXIT_INCONCLUSIVE = 3 };

struct RunConfig {
    std::string atlas_path;
    std::string suite_path;
    std::optional<std::vector<int>> radii;
    std::optional<uint64_t> budget;
    int workers = 1;
    std::string out_dir;
    int torus_area = 20;
    uint64_t torus_budget = 50'000'000;
    uint64_t seed = 1;  // property tests only
};

// Default atlas: $TRILOCRAB_ATLAS, else the bundled file.
std::string default_atlas_path();
std::string default_suite_path();

struct TorusSweep {
    int max_area = 0;
    int a_max = 0;               // largest area with every lattice up to it UNSAT
    std::optional<LatticeBasis> first_sat;
    bool budget_hit = false;
    uint64_t nodes = 0;
    int lattices = 0;
};

TorusSweep torus_sweep(const Atlas& a, int max_area, uint64_t budget, int workers);

// Writes report.json, report.txt, and per-case traces and figures under out_dir when set.
int cmd_prove(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Full command line (argv[0] excluded). Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace trilocrab

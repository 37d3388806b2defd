#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "svlab/classical.hpp"
#include "svlab/lp.hpp"
#include "svlab/scenario.hpp"

namespace svlab::cli {

inline constexpr const char* kSchema = "svetlichny-lab/1";

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Everything a run depends on; embedded verbatim in every report.
struct RunConfig {
    std::string subcommand;
    int n = 3;
    int m = 2;
    int d = 2;
    Tolerances tol;
    std::uint64_t enumeration_cap = kDefaultEnumerationCap;
    std::uint64_t lp_column_cap = kDefaultLpColumnCap;
    std::uint64_t table_cap = kDefaultTableCap;
    int threads = 0;
    std::string report_path;
    std::string csv_path;
    std::string behavior_path;
    std::string dump_path;

    std::string model = "local";
    std::vector<int> group;
    std::vector<int> m_list;
    std::vector<int> n_list;
    std::vector<int> d_list;
    std::string task = "min-bell";
    bool exact = false;
    std::vector<double> eps;
    int party = 0;
    std::vector<int> setting;
    std::vector<int> target;
    std::uint64_t rounds = 100000;
    std::uint64_t seed = 1;
    std::string source = "quantum";
};

nlohmann::json to_json(const RunConfig& c);

/// Caps from SVLAB_ENUM_CAP, SVLAB_LP_CAP and SVLAB_TABLE_CAP when set; flags
/// given on the command line take precedence.
RunConfig defaults_from_environment();

/// Parses argv, runs the subcommand, writes the JSON report (stdout or
/// --report) and returns 0 (all checks passed), 1 (a check failed) or 2
/// (usage or input error).
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace svlab::cli

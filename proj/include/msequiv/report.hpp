#pragma once

// Machine-readable run reports shared by every CLI command, and CSV side
// outputs for tabular data.

#include "msequiv/analysis.hpp"
#include "msequiv/construction.hpp"
#include "msequiv/continuation.hpp"
#include "msequiv/dynamics.hpp"
#include "msequiv/equivalence.hpp"
#include "msequiv/frequency.hpp"
#include "msequiv/parameter_search.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace msequiv {

inline constexpr const char* kReportSchema = "msequiv-report";
inline constexpr int kReportVersion = 1;

std::uint64_t fnv1a64(std::string_view bytes);

/// "fnv1a64:<16 hex digits>" of the file contents.
std::string file_digest(const std::filesystem::path& path);

struct InputDigest {
    std::string role;  // e.g. "model", "sign_matrix"
    std::string path;
    std::string digest;
};

struct RunReport {
    std::string command;
    std::vector<InputDigest> inputs;
    nlohmann::json results = nlohmann::json::object();
    std::vector<std::string> warnings;
    int exit_status = 0;

    void add_input(std::string role, const std::filesystem::path& path);
};

nlohmann::json to_json(const RunReport& report);
void write_report(const RunReport& report, const std::filesystem::path& path);

nlohmann::json to_json(const SteadyState& s);
nlohmann::json to_json(const TubeReport& t);
nlohmann::json to_json(const NyquistCurve& c);  // summary only, no samples
nlohmann::json to_json(const EquivalenceReport& r);
nlohmann::json to_json(const Branch& b);        // summary only, no points
nlohmann::json to_json(const Trajectory& t);    // statistics and endpoint
nlohmann::json to_json(const ConsistencyReport& r);
nlohmann::json to_json(const ParameterChoice& c);

// CSV layouts (header line first, shortest round-trip numbers):
//   steady states: index,unstable_count,residual,x1..xN,re_lambda1..re_lambdaN,im_lambda1..im_lambdaN
//   nyquist:       omega,re,im
//   trajectory:    t,x1..xN
//   branch:        param,x1..xN,unstable_count,leading_re
void write_steady_states_csv(std::ostream& out, const std::vector<SteadyState>& states,
                             const std::vector<std::string>& names);
void write_nyquist_csv(std::ostream& out, const NyquistCurve& curve);
void write_trajectory_csv(std::ostream& out, const Trajectory& tr, const std::vector<std::string>& names);
void write_branch_csv(std::ostream& out, const Branch& b, const std::vector<std::string>& names);

}  // namespace msequiv

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ilct/ilc.hpp"
#include "ilct/scenario.hpp"
#include "ilct/trackability.hpp"

namespace ilct {

enum ExitCode : int {
    exit_ok = 0,
    exit_check_failed = 1,
    exit_untrackable = 2,
    exit_invalid = 3,
    exit_diverged = 4,
};

nlohmann::json verdict_to_json(const TrackabilityVerdict& v);

struct AnalyzeResult {
    std::string case_name;
    TrackabilityVerdict verdict;
    ConvergenceCheck condition;
    LambdaStar lambda;
};

// All cases when case_name is empty.
std::vector<AnalyzeResult> cmd_analyze(const Scenario& s, const std::optional<std::string>& case_name);
nlohmann::json analyze_to_json(const Scenario& s, const std::vector<AnalyzeResult>& results);
void print_analyze(std::ostream& os, const Scenario& s, const std::vector<AnalyzeResult>& results);

struct RunOptions {
    std::optional<int> iterations;
    std::optional<std::uint64_t> seed;
};

struct RunResult {
    IlcRunReport report;
    bool diverged = false;
    std::string message;
    std::vector<std::string> files;
};

// Writes metrics.csv, signals_k<K>.csv for a few iterations and summary.json
// into out_dir. A diverged run keeps its partial output.
RunResult cmd_run(const Scenario& s, const std::string& case_name, const std::string& out_dir,
                  const RunOptions& options = {});

struct VerifyCheck {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    // measured <= tolerance, or measured > tolerance when lower_bound is set
    bool lower_bound = false;
    bool pass = false;
};

std::vector<VerifyCheck> cmd_verify(const Scenario& s, const std::string& case_name);
void print_checks(std::ostream& os, const std::vector<VerifyCheck>& checks);
nlohmann::json checks_to_json(const std::vector<VerifyCheck>& checks);

}  // namespace ilct

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcl/report.hpp"
#include "gcl/stream.hpp"

namespace gcl {

inline constexpr const char* kArtifactVersion = "gclab 1.0.0";

enum class Command { measure, check, check_all, rotopt, report };

const char* to_string(Command c);
Command command_from_string(const std::string& s);

/// Everything one invocation needs. Round-trips through JSON.
struct JobConfig {
    Command command = Command::check;
    std::string check; // check name for Command::check
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> samples; // unset: per-check default
    std::vector<std::string> inputs;
    std::string out;
    unsigned jobs = 1;
    std::string suite = "desk";
    std::string quad; // empty: dimension default
    double beta = 1.0;
    std::vector<double> e_radii;
    std::vector<double> f_radii;
    std::optional<int> n;      // measure: ball dimension
    std::optional<double> r;   // measure: ball radius
    std::map<std::string, double> tolerances; // "pass_z", "fail_z"
};

nlohmann::json to_json(const JobConfig& c);
JobConfig job_config_from_json(const nlohmann::json& j);

/// Values that may override a config: from the environment or from flags.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<unsigned> jobs;
    std::optional<std::string> quad;
    std::optional<double> beta;
};

/// Reads GCLAB_SEED, GCLAB_SAMPLES, GCLAB_JOBS, GCLAB_QUAD, GCLAB_BETA
/// through `getenv`. Malformed values throw ParseError naming the variable.
Overrides env_overrides(const std::function<const char*(const char*)>& getenv);

void apply(JobConfig& cfg, const Overrides& o);

/// file defaults < environment < flags
JobConfig resolve_config(JobConfig file_defaults, const Overrides& env, const Overrides& flags);

/// One suite entry. `params` has the same layout as a `check --bodies` file.
struct SuiteJob {
    std::string id;
    std::string group;
    std::string kind;
    nlohmann::json params;
    std::uint64_t samples = 0;
    nlohmann::json tags = nlohmann::json::object();
};

struct Suite {
    std::string name;
    std::string version;
    std::vector<SuiteJob> jobs;
};

/// "desk" (every acceptance instance) or "smoke" (a few of each kind).
Suite build_suite(const std::string& name);

/// Default sample count for a check kind.
std::uint64_t default_samples(const std::string& kind);

/// Runs one check of the given kind on a params document.
CheckReport run_check(const std::string& kind, const nlohmann::json& params, std::uint64_t samples,
                      const Stream& stream);

/// The stream a suite job draws from.
Stream job_stream(std::uint64_t seed, const std::string& job_id);

struct JobOutcome {
    SuiteJob job;
    CheckReport report;
    double seconds = 0.0;
    std::string error; // non-empty if the job threw
};

/// Runs the suite with up to `jobs` concurrent jobs and, if `out_dir` is
/// non-empty, writes one report per job plus index.json. Outcomes are in
/// manifest order.
std::vector<JobOutcome> run_suite(const Suite& suite, std::uint64_t seed, unsigned jobs,
                                  const std::filesystem::path& out_dir,
                                  const std::map<std::string, double>& tolerances = {});

/// Report document as written to disk.
nlohmann::json report_document(const CheckReport& r, std::uint64_t seed, const nlohmann::json& config);

/// Writes `text` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// 0 if every verdict passes, 2 if any is inconclusive and none fail,
/// 1 if any fails.
int exit_code(const std::vector<Verdict>& verdicts);

struct SummaryRow {
    std::string file;
    std::string name;
    double slack = 0.0;
    double z = 0.0;
    std::string verdict; // pass | inconclusive | fail | error
};

/// Reads every *.json report in `dir` (sorted by file name). Rotopt result
/// files are skipped here; see write_trace_csv.
std::vector<SummaryRow> collect_reports(const std::filesystem::path& dir);
/// Columns: file,name,slack,slack_over_se,verdict
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string summary_text(const std::vector<SummaryRow>& rows);
/// Two columns: iteration,value.
std::string trace_csv(const nlohmann::json& rotopt_result);

/// Runs a resolved configuration; returns the process exit status.
int run(const JobConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argument parsing, config file,
/// environment, dispatch).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace gcl

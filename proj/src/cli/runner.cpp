#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gcl/cli.hpp"
#include "gcl/errors.hpp"
#include "gcl/exec.hpp"

namespace gcl {
namespace {

using nlohmann::json;

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Overrides apply to every node still on the default tiers; nodes with
// family-adjusted tiers keep them.
void override_thresholds(CheckReport& r, const std::map<std::string, double>& tolerances)
{
    for (auto& p : r.parts) {
        override_thresholds(p, tolerances);
    }
    const Thresholds defaults;
    if (r.thresholds.pass_z == defaults.pass_z && r.thresholds.fail_z == defaults.fail_z) {
        if (auto it = tolerances.find("pass_z"); it != tolerances.end()) {
            r.thresholds.pass_z = it->second;
        }
        if (auto it = tolerances.find("fail_z"); it != tolerances.end()) {
            r.thresholds.fail_z = it->second;
        }
    }
    r.finalize();
}

json job_config(const SuiteJob& job, const std::string& suite, const std::string& version)
{
    json c = {{"kind", job.kind}, {"samples", job.samples}, {"suite", suite}, {"version", version}, {"job", job.id},
              {"params", job.params}};
    return c;
}

JobOutcome run_job(const SuiteJob& job, std::uint64_t seed, const std::map<std::string, double>& tolerances)
{
    JobOutcome out;
    out.job = job;
    const auto start = std::chrono::steady_clock::now();
    try {
        const std::uint64_t n = job.samples > 0 ? job.samples : default_samples(job.kind);
        out.report = run_check(job.kind, job.params, n, job_stream(seed, job.id));
        if (!tolerances.empty()) {
            override_thresholds(out.report, tolerances);
        }
    } catch (const std::exception& e) {
        out.error = e.what();
        out.report.name = job.kind;
        out.report.verdict = Verdict::fail;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

json error_document(const JobOutcome& o, std::uint64_t seed, const json& config)
{
    json c = config;
    c["digest"] = fnv1a_hex(config.dump());
    return {{"name", o.job.kind},  {"verdict", "error"},           {"error", o.error},
            {"seed", seed},        {"config", c},                   {"artifact_version", kArtifactVersion}};
}

std::string read_text(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_rotopt_result(const json& j)
{
    return j.is_object() && j.contains("trace") && j.contains("u_star");
}

} // namespace

Stream job_stream(std::uint64_t seed, const std::string& job_id)
{
    return Stream(seed).derive(job_id, 0);
}

json report_document(const CheckReport& r, std::uint64_t seed, const json& config)
{
    json doc = to_json(r);
    json c = config;
    c["digest"] = fnv1a_hex(config.dump());
    doc["seed"] = seed;
    doc["config"] = std::move(c);
    doc["artifact_version"] = kArtifactVersion;
    doc["generator"] = kGeneratorName;
    doc["normal_method"] = kNormalMethod;
    return doc;
}

void write_atomic(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        f << text;
        if (!f.flush()) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::vector<JobOutcome> run_suite(const Suite& suite, std::uint64_t seed, unsigned jobs,
                                  const std::filesystem::path& out_dir, const std::map<std::string, double>& tolerances)
{
    std::vector<JobOutcome> outcomes = parallel_map<JobOutcome>(suite.jobs.size(), jobs, [&](std::size_t i) {
        JobOutcome o = run_job(suite.jobs[i], seed, tolerances);
        if (!out_dir.empty()) {
            const json config = job_config(o.job, suite.name, suite.version);
            const json doc = o.error.empty() ? report_document(o.report, seed, config) : error_document(o, seed, config);
            write_atomic(out_dir / (o.job.id + ".json"), doc.dump(2) + "\n");
        }
        return o;
    });
    if (!out_dir.empty()) {
        json index = {{"suite", suite.name}, {"version", suite.version}, {"seed", seed},
                      {"artifact_version", kArtifactVersion}, {"jobs", json::array()}};
        for (const auto& o : outcomes) {
            index["jobs"].push_back({{"id", o.job.id},
                                     {"group", o.job.group},
                                     {"kind", o.job.kind},
                                     {"verdict", o.error.empty() ? to_string(o.report.verdict) : "error"}});
        }
        write_atomic(out_dir / "index.json", index.dump(2) + "\n");
    }
    return outcomes;
}

int exit_code(const std::vector<Verdict>& verdicts)
{
    bool inconclusive = false;
    for (Verdict v : verdicts) {
        if (v == Verdict::fail) {
            return 1;
        }
        inconclusive = inconclusive || v == Verdict::inconclusive;
    }
    return inconclusive ? 2 : 0;
}

std::vector<SummaryRow> collect_reports(const std::filesystem::path& dir)
{
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json" && entry.path().filename() != "index.json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<SummaryRow> rows;
    for (const auto& f : files) {
        SummaryRow row;
        row.file = f.filename().string();
        try {
            const json j = json::parse(read_text(f));
            if (is_rotopt_result(j)) {
                continue;
            }
            row.name = j.at("name").get<std::string>();
            if (j.value("verdict", "") == "error") {
                row.verdict = "error";
            } else {
                const CheckReport r = report_from_json(j);
                row.slack = r.slack;
                row.z = r.z();
                row.verdict = to_string(r.verdict);
            }
        } catch (const std::exception&) {
            row.verdict = "error";
        }
        rows.push_back(row);
    }
    return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows)
{
    std::string out = "file,name,slack,slack_over_se,verdict\n";
    char buf[64];
    for (const auto& r : rows) {
        out += r.file + "," + r.name + ",";
        std::snprintf(buf, sizeof buf, "%.17g", r.slack);
        out += buf;
        out += ",";
        std::snprintf(buf, sizeof buf, "%.6g", r.z);
        out += buf;
        out += "," + r.verdict + "\n";
    }
    return out;
}

std::string summary_text(const std::vector<SummaryRow>& rows)
{
    std::size_t width = 4;
    for (const auto& r : rows) {
        width = std::max(width, r.file.size());
    }
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %-24s %14s %10s  %s\n", static_cast<int>(width), "file", "name", "slack",
                  "slack/se", "verdict");
    out += buf;
    std::map<std::string, int> counts;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-*s  %-24s %14.6g %10.3g  %s\n", static_cast<int>(width), r.file.c_str(),
                      r.name.c_str(), r.slack, r.z, r.verdict.c_str());
        out += buf;
        ++counts[r.verdict];
    }
    std::snprintf(buf, sizeof buf, "%zu reports: %d pass, %d inconclusive, %d fail, %d error\n", rows.size(),
                  counts["pass"], counts["inconclusive"], counts["fail"], counts["error"]);
    out += buf;
    return out;
}

std::string trace_csv(const json& rotopt_result)
{
    std::string out = "iteration,value\n";
    char buf[64];
    for (const auto& row : rotopt_result.at("trace")) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", row.at(0).get<int>(), row.at(1).get<double>());
        out += buf;
    }
    return out;
}

} // namespace gcl

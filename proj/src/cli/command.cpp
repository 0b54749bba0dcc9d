#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "gcl/body_json.hpp"
#include "gcl/cli.hpp"
#include "gcl/errors.hpp"
#include "gcl/measure.hpp"
#include "gcl/rotopt.hpp"

namespace gcl {
namespace {

using nlohmann::json;

void emit(const json& doc, const std::string& out_path, std::ostream& out)
{
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
    } else {
        write_atomic(out_path, text);
    }
}

json config_json(const JobConfig& cfg)
{
    json c = to_json(cfg);
    // Worker count and output location do not affect results.
    c.erase("jobs");
    c.erase("out");
    return c;
}

Body measure_body(const JobConfig& cfg)
{
    if (cfg.inputs.empty()) {
        if (!cfg.n || !cfg.r) {
            throw ParseError("measure: need --body or both --n and --r");
        }
        return Body::ball(*cfg.n, *cfg.r);
    }
    Body body = body_from_json(read_json_file(cfg.inputs.front()), cfg.inputs.front());
    if (cfg.n || cfg.r) {
        const auto* ball = body.as<shape::Ball>();
        if (ball == nullptr) {
            throw ContractViolation("measure: --n/--r only apply to a ball body");
        }
        body = Body::ball(cfg.n.value_or(ball->dim), cfg.r.value_or(ball->radius));
    }
    return body;
}

int run_measure(const JobConfig& cfg, std::ostream& out)
{
    const Body body = measure_body(cfg);
    Estimate e;
    if (auto exact = closed_form_measure(body)) {
        e = *exact;
    } else {
        e = mc_measure(body, GaussianSpec::standard(body.dim()), cfg.samples.value_or(1000000),
                       job_stream(cfg.seed, "measure"));
    }
    json doc = {{"body", to_json(body)}, {"estimate", to_json(e)}, {"seed", cfg.seed}};
    json c = config_json(cfg);
    doc["config"] = c;
    doc["config"]["digest"] = report_document(CheckReport{}, cfg.seed, c)["config"]["digest"];
    doc["artifact_version"] = kArtifactVersion;
    emit(doc, cfg.out, out);
    return 0;
}

int run_single_check(const JobConfig& cfg, std::ostream& out)
{
    json params = json::object();
    if (!cfg.inputs.empty()) {
        params = read_json_file(cfg.inputs.front());
    }
    const std::uint64_t n = cfg.samples.value_or(default_samples(cfg.check));
    CheckReport r = run_check(cfg.check, params, n, job_stream(cfg.seed, cfg.check));
    json c = config_json(cfg);
    c["params"] = params;
    emit(report_document(r, cfg.seed, c), cfg.out, out);
    if (!cfg.out.empty()) {
        out << r.name << ": " << to_string(r.verdict) << " (slack " << r.slack << ", se " << r.slack_se << ")\n";
    }
    return exit_code({r.verdict});
}

int run_all(const JobConfig& cfg, std::ostream& out)
{
    Suite suite = build_suite(cfg.suite);
    if (cfg.samples) {
        for (auto& job : suite.jobs) {
            if (job.samples > 0) {
                job.samples = *cfg.samples;
            }
        }
    }
    const auto outcomes = run_suite(suite, cfg.seed, cfg.jobs, cfg.out, cfg.tolerances);
    std::vector<Verdict> verdicts;
    std::vector<SummaryRow> rows;
    for (const auto& o : outcomes) {
        verdicts.push_back(o.report.verdict);
        rows.push_back({o.job.id, o.report.name, o.report.slack, o.report.z(),
                        o.error.empty() ? to_string(o.report.verdict) : "error"});
    }
    out << summary_text(rows);
    return exit_code(verdicts);
}

int run_rotopt(const JobConfig& cfg, std::ostream& out)
{
    if (cfg.e_radii.empty() || cfg.e_radii.size() != cfg.f_radii.size()) {
        throw ParseError("rotopt: --e-radii and --f-radii must be non-empty and of equal length");
    }
    const Vector e = Eigen::Map<const Vector>(cfg.e_radii.data(), static_cast<Eigen::Index>(cfg.e_radii.size()));
    const Vector f = Eigen::Map<const Vector>(cfg.f_radii.data(), static_cast<Eigen::Index>(cfg.f_radii.size()));
    const int n = static_cast<int>(e.size());
    const Stream stream = job_stream(cfg.seed, "rotopt");
    const QuadratureSpec quad =
        cfg.quad.empty() ? QuadratureSpec::default_for(n, stream.key()) : QuadratureSpec::parse(cfg.quad, stream.key());
    Stream start_stream = stream.derive("start", 0);
    const OrthogonalMatrix start = haar_orthogonal(start_stream, n);
    const RotOptResult res = minimize_over_rotations(e, f, SmoothProfile::exponential(cfg.beta), quad, {}, start);
    json doc = to_json(res);
    doc["quad"] = quad.to_string();
    doc["beta"] = cfg.beta;
    doc["seed"] = cfg.seed;
    doc["config"] = config_json(cfg);
    doc["artifact_version"] = kArtifactVersion;
    emit(doc, cfg.out, out);
    if (!cfg.out.empty()) {
        std::filesystem::path trace = cfg.out;
        trace.replace_extension(".trace.csv");
        write_atomic(trace, trace_csv(doc));
        out << "value " << res.value << ", diagnostic " << res.diagnostic << ", iterations " << res.iterations
            << "\n";
    }
    return 0;
}

int run_report(const JobConfig& cfg, std::ostream& out)
{
    if (cfg.inputs.empty()) {
        throw ParseError("report: need a report directory");
    }
    const std::filesystem::path dir = cfg.inputs.front();
    if (!std::filesystem::is_directory(dir)) {
        throw ParseError("report: '" + dir.string() + "' is not a directory");
    }
    const auto rows = collect_reports(dir);
    out << summary_text(rows);
    if (!cfg.out.empty()) {
        write_atomic(cfg.out, summary_csv(rows));
    }
    std::vector<Verdict> verdicts;
    for (const auto& r : rows) {
        if (r.verdict == "error") {
            return 1;
        }
        verdicts.push_back(verdict_from_string(r.verdict));
    }
    return exit_code(verdicts);
}

} // namespace

int run(const JobConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        switch (cfg.command) {
        case Command::measure:
            return run_measure(cfg, out);
        case Command::check:
            return run_single_check(cfg, out);
        case Command::check_all:
            return run_all(cfg, out);
        case Command::rotopt:
            return run_rotopt(cfg, out);
        case Command::report:
            return run_report(cfg, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return 1;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Numerical checks of Gaussian correlation inequalities", "gclab"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    Overrides flags;
    std::string out_path;
    std::string suite;
    std::map<std::string, double> tolerances;
    app.add_option("--config", config_file, "JSON job configuration supplying defaults");
    app.add_option("--seed", flags.seed, "root seed");
    app.add_option("--samples", flags.samples, "Monte Carlo sample count");
    app.add_option("--jobs", flags.jobs, "concurrent jobs")->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "output file or directory");
    app.add_option("--suite", suite, "built-in suite for `check all`");
    app.add_option("--quad", flags.quad, "direction quadrature, sph:L, gh:L or mc:N");
    app.add_option("--beta", flags.beta, "exponential profile rate");
    app.add_option("--tolerance", tolerances, "verdict tier override, e.g. --tolerance pass_z 4");

    auto* measure = app.add_subcommand("measure", "Gaussian measure of one body");
    std::string body_file;
    std::optional<int> n;
    std::optional<double> r;
    measure->add_option("--body", body_file, "body JSON");
    measure->add_option("--n", n, "ball dimension");
    measure->add_option("--r", r, "ball radius");

    auto* check = app.add_subcommand("check", "run one check, or `all` for a suite");
    std::string check_name;
    std::string bodies_file;
    check->add_option("name", check_name, "check name or all")->required();
    check->add_option("--bodies", bodies_file, "JSON object with the check's parameters");

    auto* rotopt = app.add_subcommand("rotopt", "minimize the smoothed objective over rotations");
    std::vector<double> e_radii;
    std::vector<double> f_radii;
    rotopt->add_option("--e-radii", e_radii)->required()->expected(1, -1);
    rotopt->add_option("--f-radii", f_radii)->required()->expected(1, -1);

    auto* report = app.add_subcommand("report", "summarize a report directory");
    std::string report_dir;
    report->add_option("dir", report_dir, "directory of report JSON files")->required();

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) {
        args.emplace_back(argv[i]);
    }
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    JobConfig cfg;
    try {
        if (!config_file.empty()) {
            cfg = job_config_from_json(read_json_file(config_file));
        }
        cfg = resolve_config(cfg, env_overrides([](const char* k) { return std::getenv(k); }), flags);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    if (!out_path.empty()) {
        cfg.out = out_path;
    }
    if (!suite.empty()) {
        cfg.suite = suite;
    }
    for (const auto& [k, v] : tolerances) {
        cfg.tolerances[k] = v;
    }
    if (measure->parsed()) {
        cfg.command = Command::measure;
        cfg.inputs = body_file.empty() ? std::vector<std::string>{} : std::vector<std::string>{body_file};
        cfg.n = n ? n : cfg.n;
        cfg.r = r ? r : cfg.r;
    } else if (check->parsed()) {
        cfg.command = check_name == "all" ? Command::check_all : Command::check;
        cfg.check = check_name == "all" ? "" : check_name;
        if (!bodies_file.empty()) {
            cfg.inputs = {bodies_file};
        }
    } else if (rotopt->parsed()) {
        cfg.command = Command::rotopt;
        cfg.e_radii = e_radii;
        cfg.f_radii = f_radii;
    } else {
        cfg.command = Command::report;
        cfg.inputs = {report_dir};
    }
    return run(cfg, out, err);
}

} // namespace gcl

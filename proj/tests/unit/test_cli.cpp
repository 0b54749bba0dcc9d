#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gcl/body_json.hpp"
#include "gcl/cli.hpp"
#include "gcl/errors.hpp"
#include "gcl/measure.hpp"

using namespace gcl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("gclab_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    args.insert(args.begin(), "gclab");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int rc = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text != nullptr) {
        *out_text = out.str();
    }
    if (err_text != nullptr) {
        *err_text = err.str();
    }
    return rc;
}

CheckReport simple_report(const std::string& name, double slack)
{
    CheckReport r;
    r.name = name;
    r.lhs = Estimate::exact(slack);
    r.rhs = Estimate::exact(0.0);
    r.finalize_from_sides();
    return r;
}

} // namespace

TEST_CASE("job config round trip")
{
    JobConfig c;
    c.command = Command::check_all;
    c.seed = 123456789012345ULL;
    c.samples = 5000;
    c.inputs = {"a.json", "b.json"};
    c.out = "out";
    c.jobs = 3;
    c.quad = "sph:20";
    c.beta = 2.5;
    c.e_radii = {1.0, 2.0};
    c.f_radii = {0.5, 0.25};
    c.n = 4;
    c.r = 1.5;
    c.tolerances = {{"pass_z", 3.5}};
    const JobConfig back = job_config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(job_config_from_json(nlohmann::json::parse(to_json(c).dump())).seed == c.seed);
    CHECK_THROWS_AS(job_config_from_json({{"command", "frobnicate"}}), ParseError);
    CHECK_THROWS_AS(job_config_from_json({{"tolerances", {{"pass_z", -1.0}}}}), ParseError);
}

TEST_CASE("flag beats environment beats file")
{
    JobConfig file;
    file.seed = 1;
    file.samples = 10;
    file.beta = 3.0;
    std::map<std::string, std::string> env{{"GCLAB_SEED", "2"}, {"GCLAB_SAMPLES", "20"}};
    const Overrides from_env = env_overrides([&](const char* k) -> const char* {
        auto it = env.find(k);
        return it == env.end() ? nullptr : it->second.c_str();
    });
    Overrides flags;
    flags.seed = 3;
    const JobConfig c = resolve_config(file, from_env, flags);
    CHECK(c.seed == 3);
    CHECK(c.samples == 20);
    CHECK(c.beta == 3.0);
    env["GCLAB_JOBS"] = "many";
    try {
        env_overrides([&](const char* k) -> const char* {
            auto it = env.find(k);
            return it == env.end() ? nullptr : it->second.c_str();
        });
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("GCLAB_JOBS") != std::string::npos);
    }
}

TEST_CASE("exit codes")
{
    CHECK(exit_code({}) == 0);
    CHECK(exit_code({Verdict::pass, Verdict::pass}) == 0);
    CHECK(exit_code({Verdict::pass, Verdict::inconclusive}) == 2);
    CHECK(exit_code({Verdict::inconclusive, Verdict::fail}) == 1);
}

TEST_CASE("measure command")
{
    const fs::path dir = scratch("measure");
    write(dir / "ball.json", R"({"kind": "ball", "dim": 2, "radius": 0.5})");
    std::string out;
    REQUIRE(cli({"measure", "--body", (dir / "ball.json").string(), "--n", "3", "--r", "1"}, &out) == 0);
    const auto doc = nlohmann::json::parse(out);
    CHECK(doc["estimate"]["method"] == "exact");
    CHECK(doc["estimate"]["value"].get<double>() == doctest::Approx(ball_measure(3, 1.0).value).epsilon(1e-14));
    CHECK(doc["estimate"]["value"].get<double>() == doctest::Approx(0.1987480430987992).epsilon(1e-12));
    CHECK(doc.contains("artifact_version"));

    write(dir / "bad.json", R"({"kind": "ball", "dim": 2, "radious": 0.5})");
    std::string err;
    CHECK(cli({"measure", "--body", (dir / "bad.json").string()}, &out, &err) == 1);
    CHECK(err.find("radius") != std::string::npos);
    write(dir / "broken.json", "{\"kind\": \"ball\",\n \"dim\": }");
    CHECK(cli({"measure", "--body", (dir / "broken.json").string()}, &out, &err) == 1);
    CHECK(err.find("broken.json") != std::string::npos);
}

TEST_CASE("single check writes a report")
{
    const fs::path dir = scratch("check");
    nlohmann::json params = {{"a", to_json(Body::ball(2, 1.0))}, {"b", to_json(Body::ball(2, 1.5))}};
    write(dir / "bodies.json", params.dump());
    const fs::path report = dir / "r.json";
    CHECK(cli({"check", "correlation", "--bodies", (dir / "bodies.json").string(), "--seed", "5", "--samples", "20000",
               "--out", report.string()}) == 0);
    const auto doc = nlohmann::json::parse(slurp(report));
    for (const char* key : {"name", "lhs", "rhs", "slack", "slack_se", "verdict", "seed", "config", "artifact_version"}) {
        CHECK(doc.contains(key));
    }
    CHECK(doc["seed"] == 5);
    CHECK(doc["config"].contains("digest"));

    nlohmann::json mismatch = {{"a", to_json(Body::ball(2, 1.0))}, {"b", to_json(Body::ball(3, 1.5))}};
    write(dir / "mismatch.json", mismatch.dump());
    std::string err;
    CHECK(cli({"check", "correlation", "--bodies", (dir / "mismatch.json").string()}, nullptr, &err) == 1);
    CHECK(err.find("params.a") != std::string::npos);
}

TEST_CASE("report rendering")
{
    const fs::path empty = scratch("empty");
    std::string out;
    CHECK(cli({"report", empty.string()}, &out) == 0);
    CHECK(collect_reports(empty).empty());

    const fs::path dir = scratch("mixed");
    write_atomic(dir / "a.json", report_document(simple_report("good", 1.0), 1, {}).dump());
    write_atomic(dir / "b.json", report_document(simple_report("bad", -1.0), 1, {}).dump());
    const auto rows = collect_reports(dir);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].verdict == "pass");
    CHECK(rows[1].verdict == "fail");
    const fs::path csv = dir / "summary.csv.out";
    CHECK(cli({"report", dir.string(), "--out", csv.string()}, &out) == 1);
    const std::string table = slurp(csv);
    CHECK(table.rfind("file,name,slack,slack_over_se,verdict\n", 0) == 0);
    CHECK(table.find("good") != std::string::npos);
    CHECK(table.find("bad") != std::string::npos);

    write(dir / "c.json", "{ not json");
    const auto with_corrupt = collect_reports(dir);
    REQUIRE(with_corrupt.size() == 3);
    CHECK(with_corrupt[2].verdict == "error");
}

TEST_CASE("rotopt command writes a trace table")
{
    const fs::path dir = scratch("rotopt");
    const fs::path result = dir / "result.json";
    std::string out;
    REQUIRE(cli({"rotopt", "--e-radii", "1", "2", "--f-radii", "2", "0.5", "--beta", "1", "--quad", "sph:24", "--seed",
                 "3", "--out", result.string()},
                &out) == 0);
    const auto doc = nlohmann::json::parse(slurp(result));
    CHECK(doc["quad"] == "sph:24");
    CHECK(doc["diagnostic"].get<double>() < 1e-6);
    const std::string csv = slurp(dir / "result.trace.csv");
    CHECK(csv.rfind("iteration,value\n", 0) == 0);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 1);
        ++rows;
    }
    CHECK(rows == static_cast<int>(doc["trace"].size()));
}

TEST_CASE("suite manifest and reproducibility")
{
    const Suite desk = build_suite("desk");
    const Suite again = build_suite("desk");
    REQUIRE(desk.jobs.size() == again.jobs.size());
    std::map<std::string, int> kinds;
    for (std::size_t k = 0; k < desk.jobs.size(); ++k) {
        CHECK(desk.jobs[k].params == again.jobs[k].params);
        if (desk.jobs[k].group.rfind("c", 0) == 0) {
            kinds[desk.jobs[k].group + ":" + desk.jobs[k].kind]++;
        }
    }
    CHECK(kinds["c03:khatri_sidak"] == 200);
    CHECK(kinds["c04:correlation"] == 100);
    CHECK(kinds["c05:correlation"] == 100);
    CHECK(kinds["c06:prop1"] == 50);
    CHECK(kinds["c06:pow2_bound"] == 100);
    CHECK(kinds["c07:small_sets"] == 50);
    CHECK(kinds["c07:cor6"] == 50);
    CHECK(kinds["c07:rotation_average"] == 20);
    CHECK(kinds["c08:tensor_lift"] == 20);
    CHECK(kinds["c09:orthant_conditions"] == 20);
    CHECK(kinds["c10:prop11"] == 50);
    CHECK(kinds["c11:rotopt_gradient"] == 100);
    CHECK(kinds["c13:marginal_logconcavity"] == 10);
    CHECK_THROWS_AS(build_suite("nightly"), ParseError);

    const fs::path a = scratch("smoke_a");
    const fs::path b = scratch("smoke_b");
    std::string out;
    CHECK(cli({"check", "all", "--suite", "smoke", "--seed", "7", "--out", a.string()}, &out) == 0);
    CHECK(cli({"check", "all", "--suite", "smoke", "--seed", "7", "--jobs", "4", "--out", b.string()}, &out) == 0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
        ++files;
    }
    CHECK(files == static_cast<int>(build_suite("smoke").jobs.size()) + 1);
}

TEST_CASE("job errors are reported, not thrown")
{
    Suite s;
    s.name = "adhoc";
    s.version = "adhoc-v1";
    s.jobs.push_back({"bad_job", "x", "no_such_check", nlohmann::json::object(), 10, {}});
    const fs::path dir = scratch("errors");
    const auto outcomes = run_suite(s, 1, 1, dir);
    REQUIRE(outcomes.size() == 1);
    CHECK_FALSE(outcomes[0].error.empty());
    const auto rows = collect_reports(dir);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].verdict == "error");
}

#include "gcl/report.hpp"

#include <cmath>
#include <limits>

#include "gcl/errors.hpp"
#include "gcl/special.hpp"

namespace gcl {

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::inconclusive:
        return "inconclusive";
    case Verdict::fail:
        return "fail";
    }
    return "fail";
}

Verdict verdict_from_string(const std::string& s)
{
    if (s == "pass") {
        return Verdict::pass;
    }
    if (s == "inconclusive") {
        return Verdict::inconclusive;
    }
    if (s == "fail") {
        return Verdict::fail;
    }
    throw ParseError("unknown verdict '" + s + "'");
}

const char* to_string(Relation r)
{
    switch (r) {
    case Relation::ge:
        return "ge";
    case Relation::le:
        return "le";
    case Relation::eq:
        return "eq";
    }
    return "ge";
}

Relation relation_from_string(const std::string& s)
{
    if (s == "ge") {
        return Relation::ge;
    }
    if (s == "le") {
        return Relation::le;
    }
    if (s == "eq") {
        return Relation::eq;
    }
    throw ParseError("unknown relation '" + s + "'");
}

Thresholds Thresholds::bonferroni(std::size_t m)
{
    if (m <= 1) {
        return {};
    }
    const double md = static_cast<double>(m);
    const double tail_pass = 1.0 - normal_cdf(3.0);
    const double tail_fail = 1.0 - normal_cdf(5.0);
    return {-normal_quantile(tail_pass / md), -normal_quantile(tail_fail / md)};
}

Verdict classify(double slack, double slack_se, Relation rel, const Thresholds& t)
{
    if (!std::isfinite(slack) || !(slack_se >= 0.0)) {
        return Verdict::fail;
    }
    const double s = rel == Relation::eq ? -std::abs(slack) : slack;
    if (s >= -t.pass_z * slack_se - kExactSlackFloor) {
        return Verdict::pass;
    }
    if (s < -t.fail_z * slack_se - kExactSlackFloor) {
        return Verdict::fail;
    }
    return Verdict::inconclusive;
}

Verdict combine(Verdict a, Verdict b)
{
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

void CheckReport::finalize_from_sides()
{
    slack = relation == Relation::le ? rhs.value - lhs.value : lhs.value - rhs.value;
    finalize();
}

void CheckReport::finalize()
{
    verdict = classify(slack, slack_se, relation, thresholds);
    for (const auto& p : parts) {
        verdict = combine(verdict, p.verdict);
    }
}

double CheckReport::z() const
{
    if (slack_se > 0.0) {
        return slack / slack_se;
    }
    if (slack == 0.0) {
        return 0.0;
    }
    return slack > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

nlohmann::json to_json(const CheckReport& r)
{
    nlohmann::json j = {
        {"name", r.name},
        {"lhs", to_json(r.lhs)},
        {"rhs", to_json(r.rhs)},
        {"relation", to_string(r.relation)},
        {"slack", r.slack},
        {"slack_se", r.slack_se},
        {"z_pass", r.thresholds.pass_z},
        {"z_fail", r.thresholds.fail_z},
        {"verdict", to_string(r.verdict)},
        {"inputs", r.inputs},
        {"details", r.details},
    };
    if (!r.parts.empty()) {
        nlohmann::json parts = nlohmann::json::array();
        for (const auto& p : r.parts) {
            parts.push_back(to_json(p));
        }
        j["parts"] = std::move(parts);
    }
    return j;
}

CheckReport report_from_json(const nlohmann::json& j)
{
    try {
        CheckReport r;
        r.name = j.at("name").get<std::string>();
        r.lhs = estimate_from_json(j.at("lhs"));
        r.rhs = estimate_from_json(j.at("rhs"));
        r.relation = relation_from_string(j.at("relation").get<std::string>());
        r.slack = j.at("slack").get<double>();
        r.slack_se = j.at("slack_se").get<double>();
        r.thresholds = {j.value("z_pass", 3.0), j.value("z_fail", 5.0)};
        r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
        r.inputs = j.value("inputs", nlohmann::json::object());
        r.details = j.value("details", nlohmann::json::object());
        if (j.contains("parts")) {
            for (const auto& p : j["parts"]) {
                r.parts.push_back(report_from_json(p));
            }
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
}

} // namespace gcl

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gcl/estimate.hpp"

namespace gcl {

enum class Verdict { pass, inconclusive, fail };

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// Which side is expected to dominate. For `ge` the slack is lhs - rhs,
/// for `le` it is rhs - lhs; `eq` tests |lhs - rhs|.
enum class Relation { ge, le, eq };

const char* to_string(Relation r);
Relation relation_from_string(const std::string& s);

/// Standard-error multiples for the verdict tiers.
struct Thresholds {
    double pass_z = 3.0;
    double fail_z = 5.0;

    /// Tiers adjusted for `m` simultaneous one-sided tests so the family
    /// keeps the single-test tail probabilities.
    static Thresholds bonferroni(std::size_t m);
};

/// Absolute slack below which a zero-SE comparison still counts as exact.
inline constexpr double kExactSlackFloor = 1e-12;

/// pass iff slack >= -pass_z*se, fail iff slack < -fail_z*se. For `eq`
/// the test uses -|slack|.
Verdict classify(double slack, double slack_se, Relation rel, const Thresholds& t = {});

/// fail dominates inconclusive dominates pass.
Verdict combine(Verdict a, Verdict b);

struct CheckReport {
    std::string name;
    Estimate lhs;
    Estimate rhs;
    Relation relation = Relation::ge;
    double slack = 0.0;
    double slack_se = 0.0;
    Thresholds thresholds;
    Verdict verdict = Verdict::pass;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json details = nlohmann::json::object();
    std::vector<CheckReport> parts;

    /// Sets slack from lhs/rhs and the relation, then the verdict.
    void finalize_from_sides();
    /// Sets the verdict from the current slack and slack_se, combined with
    /// the verdicts of the parts.
    void finalize();
    double z() const;
};

nlohmann::json to_json(const CheckReport& r);
CheckReport report_from_json(const nlohmann::json& j);

} // namespace gcl

#include <cmath>
#include <limits>

#include "gcl/checks.hpp"
#include "gcl/errors.hpp"

namespace gcl {

CheckReport logconcavity_check(std::span<const double> values, std::span<const double> ses)
{
    if (values.size() != ses.size()) {
        throw ContractViolation("logconcavity_check: values and ses differ in length");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !(ses[i] >= 0.0)) {
            throw ContractViolation("logconcavity_check: values and ses must be nonnegative");
        }
    }
    CheckReport r;
    r.name = "logconcavity";
    r.relation = Relation::ge;
    r.inputs = {{"values", std::vector<double>(values.begin(), values.end())},
                {"ses", std::vector<double>(ses.begin(), ses.end())}};

    // Positive values must occupy one contiguous run.
    std::size_t first = values.size();
    std::size_t last = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > 0.0) {
            first = std::min(first, i);
            last = i;
        }
    }
    bool interval = true;
    for (std::size_t i = first; i < last; ++i) {
        interval = interval && values[i] > 0.0;
    }
    r.details["support_interval"] = interval;
    if (!interval) {
        r.lhs = Estimate::exact(0.0);
        r.rhs = Estimate::exact(0.0);
        r.slack = -1.0;
        r.slack_se = 0.0;
        r.finalize();
        return r;
    }

    double worst_z = std::numeric_limits<double>::infinity();
    std::size_t worst = 0;
    bool any = false;
    for (std::size_t k = 1; k + 1 < values.size(); ++k) {
        const double v0 = values[k - 1];
        const double v1 = values[k];
        const double v2 = values[k + 1];
        const double d = v1 * v1 - v0 * v2;
        const double se = std::sqrt(std::pow(2.0 * v1 * ses[k], 2) + std::pow(v2 * ses[k - 1], 2) +
                                    std::pow(v0 * ses[k + 1], 2));
        constexpr double kBig = std::numeric_limits<double>::max();
        const double z = se > 0.0 ? d / se : (d >= 0.0 ? kBig : -kBig);
        if (!any || z < worst_z) {
            worst_z = z;
            worst = k;
            any = true;
        }
    }
    if (!any) {
        r.lhs = Estimate::exact(0.0);
        r.rhs = Estimate::exact(0.0);
        r.slack = 0.0;
        r.slack_se = 0.0;
        r.finalize();
        return r;
    }
    const double v0 = values[worst - 1];
    const double v1 = values[worst];
    const double v2 = values[worst + 1];
    r.lhs = Estimate{v1 * v1, 2.0 * v1 * ses[worst], 0, Method::mc};
    r.rhs = Estimate{v0 * v2, std::hypot(v2 * ses[worst - 1], v0 * ses[worst + 1]), 0, Method::mc};
    r.slack = v1 * v1 - v0 * v2;
    r.slack_se = std::hypot(r.lhs.std_error, r.rhs.std_error);
    r.details["worst_index"] = worst;
    r.details["worst_z"] = worst_z;
    r.finalize();
    return r;
}

} // namespace gcl

#pragma once

#include <initializer_list>
#include <string>
#include <utility>

#include <json.hpp>

#include "gcl/body.hpp"
#include "gcl/body_json.hpp"
#include "gcl/errors.hpp"
#include "gcl/estimate.hpp"
#include "gcl/gaussian.hpp"
#include "gcl/stream.hpp"

namespace gcl::detail {

inline nlohmann::json describe_inputs(std::initializer_list<std::pair<const char*, const Body*>> bodies,
                                      const Stream& stream)
{
    nlohmann::json j = nlohmann::json::object();
    nlohmann::json b = nlohmann::json::object();
    for (const auto& [name, body] : bodies) {
        b[name] = to_json(*body);
    }
    if (!b.empty()) {
        j["bodies"] = std::move(b);
    }
    j["stream"] = stream.describe();
    return j;
}

inline void require_same_dim(const Body& a, const Body& b, int n)
{
    if (a.dim() != n || b.dim() != n) {
        throw ContractViolation("bodies a (dim " + std::to_string(a.dim()) + ") and b (dim " +
                                std::to_string(b.dim()) + ") must both have dimension " + std::to_string(n));
    }
}

inline Estimate mc_value(double value, double se, std::uint64_t n)
{
    return Estimate{value, se, n, Method::mc};
}

} // namespace gcl::detail

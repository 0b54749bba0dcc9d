#include <cstdlib>
#include <stdexcept>

#include "gcl/cli.hpp"
#include "gcl/errors.hpp"

namespace gcl {

const char* to_string(Command c)
{
    switch (c) {
    case Command::measure:
        return "measure";
    case Command::check:
        return "check";
    case Command::check_all:
        return "check-all";
    case Command::rotopt:
        return "rotopt";
    case Command::report:
        return "report";
    }
    return "check";
}

Command command_from_string(const std::string& s)
{
    for (Command c : {Command::measure, Command::check, Command::check_all, Command::rotopt, Command::report}) {
        if (s == to_string(c)) {
            return c;
        }
    }
    throw ParseError("command: unknown value '" + s + "'");
}

nlohmann::json to_json(const JobConfig& c)
{
    nlohmann::json j = {
        {"command", to_string(c.command)},
        {"check", c.check},
        {"seed", c.seed},
        {"inputs", c.inputs},
        {"out", c.out},
        {"jobs", c.jobs},
        {"suite", c.suite},
        {"quad", c.quad},
        {"beta", c.beta},
        {"e_radii", c.e_radii},
        {"f_radii", c.f_radii},
        {"tolerances", c.tolerances},
    };
    j["samples"] = c.samples ? nlohmann::json(*c.samples) : nlohmann::json(nullptr);
    j["n"] = c.n ? nlohmann::json(*c.n) : nlohmann::json(nullptr);
    j["r"] = c.r ? nlohmann::json(*c.r) : nlohmann::json(nullptr);
    return j;
}

namespace {

template <class T>
T field(const nlohmann::json& j, const char* key, T fallback)
{
    if (!j.contains(key) || j[key].is_null()) {
        return fallback;
    }
    try {
        return j[key].get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config.") + key + ": " + e.what());
    }
}

template <class T>
std::optional<T> optional_field(const nlohmann::json& j, const char* key)
{
    if (!j.contains(key) || j[key].is_null()) {
        return std::nullopt;
    }
    return field<T>(j, key, T{});
}

template <class T>
std::optional<T> parse_number(const char* name, const char* text)
{
    if (text == nullptr || *text == '\0') {
        return std::nullopt;
    }
    const std::string s(text);
    std::size_t used = 0;
    try {
        if constexpr (std::is_floating_point_v<T>) {
            const double v = std::stod(s, &used);
            if (used == s.size()) {
                return static_cast<T>(v);
            }
        } else {
            if (!s.empty() && s[0] == '-') {
                throw ParseError(std::string(name) + ": must be nonnegative, got '" + s + "'");
            }
            const unsigned long long v = std::stoull(s, &used);
            if (used == s.size()) {
                return static_cast<T>(v);
            }
        }
    } catch (const std::logic_error&) {
    }
    throw ParseError(std::string(name) + ": not a number: '" + s + "'");
}

} // namespace

JobConfig job_config_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw ParseError("config: expected a JSON object");
    }
    JobConfig c;
    c.command = command_from_string(field<std::string>(j, "command", "check"));
    c.check = field<std::string>(j, "check", "");
    c.seed = field<std::uint64_t>(j, "seed", c.seed);
    c.samples = optional_field<std::uint64_t>(j, "samples");
    c.inputs = field<std::vector<std::string>>(j, "inputs", {});
    c.out = field<std::string>(j, "out", "");
    c.jobs = field<unsigned>(j, "jobs", c.jobs);
    c.suite = field<std::string>(j, "suite", c.suite);
    c.quad = field<std::string>(j, "quad", "");
    c.beta = field<double>(j, "beta", c.beta);
    c.e_radii = field<std::vector<double>>(j, "e_radii", {});
    c.f_radii = field<std::vector<double>>(j, "f_radii", {});
    c.n = optional_field<int>(j, "n");
    c.r = optional_field<double>(j, "r");
    c.tolerances = field<std::map<std::string, double>>(j, "tolerances", {});
    for (const auto& [k, v] : c.tolerances) {
        if (k != "pass_z" && k != "fail_z") {
            throw ParseError("config.tolerances." + k + ": unknown tolerance");
        }
        if (!(v > 0.0)) {
            throw ParseError("config.tolerances." + k + ": must be positive");
        }
    }
    return c;
}

Overrides env_overrides(const std::function<const char*(const char*)>& getenv)
{
    Overrides o;
    o.seed = parse_number<std::uint64_t>("GCLAB_SEED", getenv("GCLAB_SEED"));
    o.samples = parse_number<std::uint64_t>("GCLAB_SAMPLES", getenv("GCLAB_SAMPLES"));
    o.jobs = parse_number<unsigned>("GCLAB_JOBS", getenv("GCLAB_JOBS"));
    o.beta = parse_number<double>("GCLAB_BETA", getenv("GCLAB_BETA"));
    if (const char* q = getenv("GCLAB_QUAD"); q != nullptr && *q != '\0') {
        o.quad = std::string(q);
    }
    return o;
}

void apply(JobConfig& cfg, const Overrides& o)
{
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    if (o.samples) {
        cfg.samples = *o.samples;
    }
    if (o.jobs) {
        cfg.jobs = *o.jobs;
    }
    if (o.quad) {
        cfg.quad = *o.quad;
    }
    if (o.beta) {
        cfg.beta = *o.beta;
    }
}

JobConfig resolve_config(JobConfig file_defaults, const Overrides& env, const Overrides& flags)
{
    apply(file_defaults, env);
    apply(file_defaults, flags);
    return file_defaults;
}

} // namespace gcl

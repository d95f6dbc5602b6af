#pragma once

// Per-run settings. Defaults, then the file named by TORICPO_CONFIG, then
// command-line overrides.

#include <cstdlib>
#include <string>

#include "io.hpp"

namespace toricpo {

struct RunConfig {
    Rational truncation = default_truncation();
    double eps_c = 1e-12;
    double eps_s = 1e-8;
    double tol_abs = 1e-9;
    bool assume_fano = false;
    int grid = 10;
    std::string format;  // json or text; empty: the subcommand's default
    int jobs = 1;

    CriticalOptions critical() const {
        CriticalOptions o;
        o.order = truncation;
        o.jobs = jobs;
        o.solve.eps_s = eps_s;
        return o;
    }
    LTEOptions lte() const {
        LTEOptions o;
        o.solve.eps_s = eps_s;
        return o;
    }
    ResidueOptions residue() const { return ResidueOptions{truncation, tol_abs}; }
};

inline void validate(const RunConfig& c) {
    if (c.truncation <= 0) throw Error(ErrorCode::ParamOutOfRange, "truncation must be positive");
    if (!(c.eps_c > 0) || !(c.eps_s > 0) || !(c.tol_abs > 0)) throw Error(ErrorCode::ParamOutOfRange, "tolerances must be positive");
    if (c.grid < 1) throw Error(ErrorCode::ParamOutOfRange, "grid must be at least 1");
    if (c.jobs < 1) throw Error(ErrorCode::ParamOutOfRange, "jobs must be at least 1");
    if (!c.format.empty() && c.format != "json" && c.format != "text") throw Error(ErrorCode::ParamOutOfRange, "format must be json or text");
}

inline RunConfig config_from_json(const io::json& j, RunConfig c = {}) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "config: expected an object");
    for (const auto& [key, v] : j.items()) {
        try {
            if (key == "truncation") c.truncation = io::rational_from(v, key);
            else if (key == "eps_c") c.eps_c = v.get<double>();
            else if (key == "eps_s") c.eps_s = v.get<double>();
            else if (key == "tol_abs") c.tol_abs = v.get<double>();
            else if (key == "assume_fano") c.assume_fano = v.get<bool>();
            else if (key == "grid") c.grid = v.get<int>();
            else if (key == "format") c.format = v.get<std::string>();
            else if (key == "jobs") c.jobs = v.get<int>();
            else throw Error(ErrorCode::ParseError, "config: unknown key \"" + key + "\"");
        } catch (const io::json::type_error&) {
            throw Error(ErrorCode::ParseError, "config: wrong type for \"" + key + "\"");
        }
    }
    validate(c);
    return c;
}

inline io::json config_json(const RunConfig& c) {
    return io::json{{"truncation", io::rational(c.truncation)}, {"eps_c", c.eps_c}, {"eps_s", c.eps_s}, {"tol_abs", c.tol_abs},
                    {"assume_fano", c.assume_fano}, {"grid", c.grid}, {"format", c.format}, {"jobs", c.jobs}};
}

inline RunConfig load_config(const std::string& path) { return config_from_json(io::parse(io::read_file(path), path)); }

/// Defaults, overridden by $TORICPO_CONFIG when set.
inline RunConfig default_config() {
    const char* path = std::getenv("TORICPO_CONFIG");
    if (path && *path) return load_config(path);
    return {};
}

}  // namespace toricpo

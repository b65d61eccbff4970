#include "isopyc/config.hpp"

#include "isopyc/errors.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace isopyc {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Binder {
    std::map<std::string, std::function<void(RunConfig&, const std::string&)>> setters;
    std::vector<std::pair<std::string, std::function<std::string(const RunConfig&)>>> getters;

    void dbl(const std::string& key, double RunConfig::* f) {
        setters[key] = [f, key](RunConfig& c, const std::string& v) {
            try {
                c.*f = std::stod(v);
            } catch (...) {
                throw ConfigError("config key " + key + ": expected a number, got '" + v + "'");
            }
        };
        getters.emplace_back(key, [f](const RunConfig& c) { return fmt_double(c.*f); });
    }
    void dbl(const std::string& key, double SimParams::* f) {
        setters[key] = [f, key](RunConfig& c, const std::string& v) {
            try {
                c.params.*f = std::stod(v);
            } catch (...) {
                throw ConfigError("config key " + key + ": expected a number, got '" + v + "'");
            }
        };
        getters.emplace_back(key, [f](const RunConfig& c) { return fmt_double(c.params.*f); });
    }
    void integer(const std::string& key, int RunConfig::* f) {
        setters[key] = [f, key](RunConfig& c, const std::string& v) {
            try {
                c.*f = std::stoi(v);
            } catch (...) {
                throw ConfigError("config key " + key + ": expected an integer, got '" + v + "'");
            }
        };
        getters.emplace_back(key, [f](const RunConfig& c) { return std::to_string(c.*f); });
    }
    void integer(const std::string& key, int SimParams::* f) {
        setters[key] = [f, key](RunConfig& c, const std::string& v) {
            try {
                c.params.*f = std::stoi(v);
            } catch (...) {
                throw ConfigError("config key " + key + ": expected an integer, got '" + v + "'");
            }
        };
        getters.emplace_back(key, [f](const RunConfig& c) { return std::to_string(c.params.*f); });
    }
    void integer(const std::string& key, int Grid::* f) {
        setters[key] = [f, key](RunConfig& c, const std::string& v) {
            try {
                c.grid.*f = std::stoi(v);
            } catch (...) {
                throw ConfigError("config key " + key + ": expected an integer, got '" + v + "'");
            }
        };
        getters.emplace_back(key, [f](const RunConfig& c) { return std::to_string(c.grid.*f); });
    }
    void dbl(const std::string& key, double Grid::* f) {
        setters[key] = [f, key](RunConfig& c, const std::string& v) {
            try {
                c.grid.*f = std::stod(v);
            } catch (...) {
                throw ConfigError("config key " + key + ": expected a number, got '" + v + "'");
            }
        };
        getters.emplace_back(key, [f](const RunConfig& c) { return fmt_double(c.grid.*f); });
    }
    void str(const std::string& key, std::string RunConfig::* f) {
        setters[key] = [f](RunConfig& c, const std::string& v) { c.*f = v; };
        getters.emplace_back(key, [f](const RunConfig& c) { return c.*f; });
    }
    void uns(const std::string& key, unsigned RunConfig::* f) {
        setters[key] = [f, key](RunConfig& c, const std::string& v) {
            try {
                c.*f = static_cast<unsigned>(std::stoul(v));
            } catch (...) {
                throw ConfigError("config key " + key + ": expected an unsigned integer, got '" +
                                  v + "'");
            }
        };
        getters.emplace_back(key, [f](const RunConfig& c) { return std::to_string(c.*f); });
    }
};

const Binder& binder() {
    static const Binder b = [] {
        Binder b;
        b.integer("grid.d", &Grid::d);
        b.integer("grid.Nx", &Grid::Nx);
        b.dbl("grid.L", &Grid::L);
        b.integer("grid.Nr", &Grid::Nr);

        b.dbl("params.epsilon", &SimParams::epsilon);
        b.dbl("params.mu", &SimParams::mu);
        b.dbl("params.h_star", &SimParams::h_star);
        b.dbl("params.h_sup", &SimParams::h_sup);
        b.dbl("params.c_star", &SimParams::c_star);
        b.dbl("params.rho_min", &SimParams::rho_min);
        b.dbl("params.rho_max", &SimParams::rho_max);
        b.integer("params.s_diag", &SimParams::s_diag);
        b.integer("params.k_diag", &SimParams::k_diag);
        b.dbl("params.energy_ceiling", &SimParams::energy_ceiling);

        b.dbl("dynamics.dt", &SimParams::dt);
        b.dbl("dynamics.cfl", &SimParams::cfl);
        b.dbl("dynamics.delta", &SimParams::delta);
        b.dbl("dynamics.t_end", &SimParams::t_end);
        b.dbl("dynamics.snapshot_every", &RunConfig::snapshot_every);

        b.dbl("pressure.tol", &SimParams::pressure_tol);
        b.integer("pressure.max_iter", &SimParams::pressure_max_iter);

        b.str("profile.name", &RunConfig::profile_name);
        b.dbl("profile.rho0", &RunConfig::profile_rho0);
        b.dbl("profile.rate", &RunConfig::profile_rate);
        b.dbl("profile.slope", &RunConfig::profile_slope);
        b.dbl("profile.drho", &RunConfig::profile_drho);
        b.dbl("profile.center", &RunConfig::profile_center);
        b.dbl("profile.width", &RunConfig::profile_width);
        b.dbl("profile.n2", &RunConfig::profile_n2);
        b.str("profile.csv", &RunConfig::profile_csv);
        b.str("profile.vbar", &RunConfig::vbar_kind);
        b.dbl("profile.vbar_amplitude", &RunConfig::vbar_amplitude);

        b.str("init.kind", &RunConfig::init_kind);
        b.dbl("init.amplitude", &RunConfig::init_amplitude);
        b.integer("init.k", &RunConfig::init_k);
        b.integer("init.n", &RunConfig::init_n);
        b.uns("init.seed", &RunConfig::init_seed);

        b.str("output.dir", &RunConfig::output_dir);
        b.dbl("output.series_every", &RunConfig::series_every);

        b.str("verify.suites", &RunConfig::verify_suites);
        b.dbl("verify.tol_scale", &RunConfig::verify_tol_scale);

        b.integer("cli.threads", &RunConfig::threads);
        return b;
    }();
    return b;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto z = s.find_last_not_of(" \t\r\n");
    return s.substr(a, z - a + 1);
}

} // namespace

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        const auto it = binder().setters.find(key);
        if (it == binder().setters.end())
            throw ConfigError("unknown config key: " + key);
        it->second(cfg, val);
    }
    cfg.grid.validate();
    cfg.params.validate();
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string RunConfig::to_text() const {
    std::string out;
    for (const auto& [key, get] : binder().getters) {
        out += key;
        out += "=";
        out += get(*this);
        out += "\n";
    }
    return out;
}

StratificationProfile RunConfig::build_profile_from_config() const {
    VbarSpec vb{vbar_kind, vbar_amplitude};
    if (profile_name == "exp")
        return make_profile_exp(grid, params, profile_rho0, profile_rate, vb);
    if (profile_name == "linear")
        return make_profile_linear(grid, params, profile_rho0, profile_slope, vb);
    if (profile_name == "tanh-pycnocline" || profile_name == "tanh")
        return make_profile_tanh(grid, params, profile_rho0, profile_drho, profile_center,
                                 profile_width, vb);
    if (profile_name == "boussinesq")
        return make_profile_boussinesq(grid, params, profile_n2, vb);
    if (profile_name == "csv") return make_profile_from_csv(profile_csv, grid, params);
    throw ConfigError("unknown profile.name: " + profile_name);
}

} // namespace isopyc

#include "isopyc/params.hpp"

#include "isopyc/errors.hpp"

#include <cmath>
#include <string>

namespace isopyc {

void SimParams::validate(std::vector<std::string>* warnings) const {
    if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("params.epsilon must be in [0,1]");
    if (!(mu > 0.0) || mu > 1.0) throw ConfigError("params.mu must be in (0,1]");
    if (delta < 0.0) throw ConfigError("params.delta must be >= 0");
    if (!(h_star > 0.0) || h_star > h_sup)
        throw ConfigError("params must satisfy 0 < h_star <= h_sup");
    if (!(c_star > 0.0)) throw ConfigError("params.c_star must be positive");
    if (rho_min < 0.0 || (rho_max != 0.0 && rho_min >= rho_max))
        throw ConfigError("params must satisfy 0 < rho_min < rho_max");
    if (s_diag < 2) throw ConfigError("params.s_diag must be >= 2");
    if (k_diag < 0 || k_diag > s_diag)
        throw ConfigError("params.k_diag must satisfy 0 <= k_diag <= s_diag");
    if (warnings && epsilon > std::sqrt(mu))
        warnings->push_back("epsilon > sqrt(mu): outside the weakly non-linear regime");
}

} // namespace isopyc

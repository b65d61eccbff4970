#pragma once

#include <vector>
#include <string>

namespace isopyc {

/// Physical and numerical parameters of a run. Perturbation size epsilon may
/// be zero (the linearized regime is a valid input everywhere); the
/// shallowness mu is restricted to (0,1] -- the hydrostatic limit mu = 0 is
/// excluded.
struct SimParams {
    double epsilon = 0.1;
    double mu = 1.0;
    double delta = 0.0; ///< mollifier cutoff, 0 = dealiasing only

    double dt = 1e-2;
    double t_end = 1.0;
    double cfl = 0.4;

    // safety thresholds
    double h_star = 0.1;
    double h_sup = 10.0;
    double c_star = 1e-3;
    double rho_min = 0.0; ///< 0 means "derive permissive default", see validate()
    double rho_max = 0.0;

    // diagnostics
    int s_diag = 2;
    int k_diag = 2;
    double energy_ceiling = 1e6; ///< blow-up threshold on the H^{s_diag} norm

    // pressure solver
    double pressure_tol = 1e-10;
    int pressure_max_iter = 500;

    /// s0 used for fractional norm indices; the theory needs s0 > d/2.
    double s0(int d) const { return 0.5 * d + 0.01; }

    /// Throws ConfigError on hard violations; appends soft warnings
    /// (epsilon > sqrt(mu), sup|Vbar'| > sqrt(mu)) to `warnings`.
    void validate(std::vector<std::string>* warnings = nullptr) const;
};

} // namespace isopyc

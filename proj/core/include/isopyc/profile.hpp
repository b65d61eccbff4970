#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isopyc/grid.hpp"
#include "isopyc/params.hpp"

namespace isopyc {

using Closure = std::function<double(double)>;

/// Analytic closures for the equilibrium profiles. rho_b is the density used
/// by the buoyancy term; it defaults to rho, and differs from it only under
/// the strong Boussinesq configuration (constant momentum density with a
/// prescribed restoring N^2).
struct ProfileClosures {
    Closure rho;
    Closure rho_prime;
    Closure rho_b;
    Closure rho_b_prime;
    std::vector<Closure> vbar;
    std::vector<Closure> vbar_prime;
};

/// Equilibrium stratification sampled on the r-grid: density per level set,
/// shear velocity, and their derivatives. Depends on r only; immutable after
/// construction.
struct StratificationProfile {
    Grid grid;
    std::vector<double> rho_of_r;   ///< momentum density at levels
    std::vector<double> rho_prime;  ///< d/dr of rho_of_r
    std::vector<double> rho_b_of_r; ///< buoyancy density at levels
    std::vector<double> rho_b_prime;
    std::vector<double> rho_half; ///< momentum density at half levels r_{i+1/2}
    std::vector<std::vector<double>> vbar_of_r; ///< d components
    std::vector<std::vector<double>> vbar_prime;
    bool has_closures = false;
    ProfileClosures closures;

    double n2(int ir) const { return rho_b_prime[ir] / rho_b_of_r[ir]; }
    double vbar_prime_sup() const;
    /// Buoyancy density evaluated off-grid (closure, or monotone interpolant
    /// of the samples). Throws DomainEscape outside [-margin, 1+margin].
    double rho_b_at(double r) const;
    double vbar_at(double r, int c) const;
    double vbar_prime_at(double r, int c) const;
    bool boussinesq() const; ///< true when rho_b differs from rho
};

/// Samples the closures, fills derivative arrays (analytic when supplied,
/// else 4th-order central differences) and checks the stability and
/// non-cavitation bounds.
StratificationProfile build_profile(const ProfileClosures& closures, const Grid& grid,
                                    const SimParams& params);

// -- named built-ins ---------------------------------------------------------

struct VbarSpec {
    std::string kind = "zero"; ///< zero | linear | cos
    double amplitude = 0.0;
};

/// rho(r) = rho0 * exp(rate * r); N^2 = rate.
StratificationProfile make_profile_exp(const Grid&, const SimParams&, double rho0 = 1.0,
                                       double rate = 1.0, const VbarSpec& vbar = {});
/// rho(r) = rho0 + slope * r.
StratificationProfile make_profile_linear(const Grid&, const SimParams&, double rho0 = 1.0,
                                          double slope = 1.0, const VbarSpec& vbar = {});
/// rho(r) = rho0 + drho * tanh((r - center)/width), a smoothed pycnocline.
StratificationProfile make_profile_tanh(const Grid&, const SimParams&, double rho0 = 2.0,
                                        double drho = 0.5, double center = 0.5,
                                        double width = 0.1, const VbarSpec& vbar = {});
/// Constant momentum density 1 with buoyancy density exp(n2 * r), so the
/// buoyancy term carries N^2 = n2 while 1/rho stays 1.
StratificationProfile make_profile_boussinesq(const Grid&, const SimParams&, double n2 = 1.0,
                                              const VbarSpec& vbar = {});
/// Columns r,rho[,vbar[,vbar2]]; resampled onto the grid, derivatives by
/// 4th-order differences.
StratificationProfile make_profile_from_csv(const std::string& path, const Grid&,
                                            const SimParams&);

/// N^2(r) = rho'/rho sampled on the r-grid (buoyancy density).
std::vector<double> brunt_vaisala(const StratificationProfile&);

/// inf over the grid of g * N^2 / |Vbar'|^2 - 1/4, through the equilibrium
/// correspondence rho_eq(-r) = rho(r); +infinity when Vbar' == 0.
double miles_howard_margin(const StratificationProfile&, double g_nondim = 1.0);

} // namespace isopyc

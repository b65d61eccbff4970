#pragma once

#include <memory>
#include <vector>

#include "isopyc/calculus.hpp"
#include "isopyc/field.hpp"
#include "isopyc/params.hpp"
#include "isopyc/profile.hpp"
#include "isopyc/spectral.hpp"
#include "isopyc/state.hpp"

namespace isopyc {

/// Provenance of the right-hand side: assembled from a divergence-form
/// vector G or from a pointwise interior source.
enum class RhsForm { divergence_form, pointwise_form };

/// Geometry and coefficient snapshot of the anisotropic Neumann operator
///   grad_mu^phi . (1/rho) grad_mu^phi P.
/// The discrete quadratic form lives on half levels r_{i+1/2}: vertical
/// differences are exact midpoint differences, horizontal derivatives are
/// spectral and averaged to half levels, which keeps the assembled operator
/// symmetric and second-order down to the boundary rows. Coefficients are
/// split into their horizontal mean and a dealiased fluctuation so that
/// truncated modes keep the flat vertical coupling.
struct EllipticGeometry {
    double mu = 1.0;
    DiffOpSet ops;                    ///< level geometry (eta snapshot)
    Field Jh;                         ///< 1+eps*h at half levels
    Field coeff_half;                 ///< 1/rho at half levels
    std::vector<double> coeff_level;  ///< 1/rho at levels
    std::vector<double> cbar;         ///< per-half-level mean of 1/Jh
    Field cfluc;                      ///< dealiased fluctuation of 1/Jh
    std::vector<std::vector<double>> mbar; ///< [c] mean of M(d_c eta)/Jh
    std::vector<Field> mfluc;              ///< dealiased fluctuations
};

/// The Neumann problem data. Both RHS carriers may be populated (their
/// contributions add); `form` records the primary provenance.
struct EllipticProblem {
    EllipticGeometry geom;
    RhsForm form = RhsForm::pointwise_form;
    Field rhs_pointwise;     ///< interior F at levels (empty = absent)
    VecField rhs_divergence; ///< G at levels, d+1 components (empty = absent)
    /// When true the Neumann data is the vertical trace of rhs_divergence
    /// (the natural boundary condition); when false the explicit
    /// neumann_top/bottom slices are used and the divergence trace is
    /// subtracted.
    bool neumann_from_divergence = false;
    std::vector<double> neumann_top;    ///< data at r=0 (size nx)
    std::vector<double> neumann_bottom; ///< data at r=1
    double compat_defect = 0.0;         ///< filled during assembly
};

/// Zero-mean pressure with cached curved gradients.
struct PressureField {
    Field P;
    std::vector<Field> grad_mu_P; ///< d+1 comps: sqrt(mu) grad_x^phi P, dr^phi P
    std::vector<Field> grad_P;    ///< d+1 comps: grad_x^phi P, dr^phi P
    double residual_norm = 0.0;   ///< final relative CG residual
    int iterations = 0;
    double compat_defect = 0.0;
};

/// Preconditioned conjugate-gradient solver for the weighted weak form
///   <(1+eps h)/rho grad_mu^phi P, grad_mu^phi q> = l(q),
/// preconditioned by the eta=0 operator, which is block-diagonal per
/// horizontal Fourier mode (one tridiagonal vertical solve per mode).
/// Iterates in the zero-mean subspace; the returned P carries the
/// (1+eps*h)-weighted zero-mean gauge.
class PressureSolver {
public:
    explicit PressureSolver(const Grid& grid, int nthreads = 1);

    SpectralWorkspace& ws() { return ws_level_; }
    SpectralWorkspace& ws_half() { return ws_half_; }

    /// Throws CompatibilityDefect when the relative defect exceeds
    /// tol_compat, NoConvergence past max_iter.
    PressureField solve(EllipticProblem& prob, double tol, int max_iter,
                        double tol_compat = 1e-8);

    /// Discrete weak operator application (exposed for the self-adjointness
    /// and operator-composition checks).
    Field apply_operator(const EllipticGeometry& geom, const Field& P);
    /// Assembled load vector l(e_i) as a field.
    Field assemble_rhs(const EllipticProblem& prob);

private:
    Grid grid_;
    int nthreads_;
    SpectralWorkspace ws_level_;
    SpectralWorkspace ws_half_;

    // flat preconditioner cache, keyed on (rho_half, mu)
    struct Precond;
    std::shared_ptr<Precond> precond_;
    void ensure_precond(const std::vector<double>& rho_half, double mu);
    void apply_precond(const Field& r, Field& z);

    void gradient_half(const EllipticGeometry& geom, const Field& P, std::vector<Field>& g);
    void adjoint_gradient(const EllipticGeometry& geom, const std::vector<Field>& u, Field& y);
    void finalize_gradients(const EllipticGeometry& geom, PressureField& pf);
};

/// Builds the geometry snapshot; rho sampled at levels and half levels
/// (pass ones for the Leray instance).
EllipticGeometry make_elliptic_geometry(const Field& eta, const std::vector<double>& rho_level,
                                        const std::vector<double>& rho_half,
                                        const SimParams& params, double mu,
                                        SpectralWorkspace& ws_level, SpectralWorkspace& ws_half);

/// Assembles the pressure problem of the evolution system: the
/// epsilon-cancelled quadratic source and the buoyancy in divergence form,
/// with Neumann data -b at both boundaries.
EllipticProblem assemble_pressure_rhs(const FlowState& state, const StratificationProfile& prof,
                                      const SimParams& params, const Field& b,
                                      PressureSolver& solver);

/// Hydrostatic pressure P_h = int_0^r rho*b dr' (cumulative trapezoid) and
/// the pointwise identity residual (1/rho) dr^phi P_h + b - eps*h/(1+eps*h)*b,
/// which vanishes in the continuum.
std::pair<Field, Field> hydrostatic_split(const FlowState& state,
                                          const StratificationProfile& prof,
                                          const SimParams& params, const Field& b,
                                          SpectralWorkspace& ws);

struct LerayResult {
    std::vector<Field> V;
    Field w;
    Field psi;
    double div_before = 0.0;
    double div_after = 0.0;
    int iterations = 0;
};

/// Removes the curved-gradient part of (V,w) in the geometry of eta: solves
/// grad^phi . grad^phi psi = grad^phi . U (+ extra_source) with
/// dr^phi psi = 0 at r = 0,1 (the mu=1, rho=1 instance) and returns
/// U - grad^phi psi. With extra_source = S the output satisfies
/// grad^phi . U_out = -S weakly.
LerayResult leray_project(const std::vector<Field>& V, const Field& w, const Field& eta,
                          const SimParams& params, PressureSolver& solver, double tol,
                          const Field* extra_source = nullptr);

} // namespace isopyc

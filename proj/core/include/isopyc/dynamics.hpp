#pragma once

#include "isopyc/elliptic.hpp"
#include "isopyc/field.hpp"
#include "isopyc/params.hpp"
#include "isopyc/profile.hpp"
#include "isopyc/spectral.hpp"
#include "isopyc/state.hpp"

namespace isopyc {

/// Buoyancy b = (1 - rho_b(r - eps*eta)/rho_b(r))/eps, evaluated from the
/// analytic closure; the eps = 0 path returns the Taylor limit N^2 * eta.
Field buoyancy(const FlowState& state, const StratificationProfile& prof,
               const SimParams& params);

/// Taylor remainder b~ = (b - N^2 eta)/eps; bounded as eps -> 0, with the
/// analytic second-order coefficient -(eta^2/2) rho_b''/rho_b at eps = 0.
Field buoyancy_remainder(const FlowState& state, const StratificationProfile& prof,
                         const SimParams& params);

/// Integrates d_r w = (1+eps h) grad_x^phi . V + grad_x eta . Vbar' upward
/// from w(r=0) = 0 by cumulative trapezoid. The returned defect
/// max_x |w(r=1)| vanishes for divergence-compatible data.
std::pair<Field, double> reconstruct_w(const std::vector<Field>& V, const DiffOpSet& ops,
                                       const StratificationProfile& prof, SpectralWorkspace& ws);

/// Full divergence constraint of the evolution system, with the (1/eps)
/// background term cancelled symbolically:
///   grad_x^phi . V + dr^phi w + (grad_x eta . Vbar')/(1+eps h).
Field full_divergence(const FlowState& state, const StratificationProfile& prof,
                      const SimParams& params, SpectralWorkspace& ws);

/// Projects raw fields onto admissible initial data: builds the full
/// velocity in the geometry of eta_raw, removes its curved-gradient part,
/// extracts the perturbation and re-enforces the boundary rows.
FlowState prepare_initial_data(const std::vector<Field>& V_raw, const Field& w_raw,
                               const Field& eta_raw, const StratificationProfile& prof,
                               const SimParams& params, PressureSolver& solver);

struct RhsResult {
    Tendency tend;
    PressureField pressure;
    Field b;
};

/// Right-hand side of the (optionally mollified) evolution system: solves
/// the pressure, then
///   dV   = -J_d[J_d(Vbar+eps V) . grad_x J_d V] - (1/rho) grad_x^phi P,
///   dw   = -J_d[...w] - (1/mu)((1/rho) dr^phi P + b),
///   deta = -J_d[...eta] + w,
/// with delta = 0 the plain dealiased pseudo-spectral right-hand side.
RhsResult rhs(const FlowState& state, const StratificationProfile& prof, const SimParams& params,
              double delta, PressureSolver& solver);

/// Classical four-stage explicit Runge-Kutta step; geometry and pressure are
/// recomputed each stage and the boundary rows of w, eta re-imposed.
/// Throws CFLViolation before touching the state when
/// |dt| > cfl * dx / max|Vbar + eps V|.
FlowState step(const FlowState& state, const StratificationProfile& prof, const SimParams& params,
               PressureSolver& solver);
FlowState step(const FlowState& state, const StratificationProfile& prof, const SimParams& params,
               PressureSolver& solver, double dt);

/// L2 norm of eps*(h_after - h_before)/dt + grad_x . ((1+eps h)(Vbar+eps V))
/// at the midpoint state -- the discrete residual of the layer-thickness
/// continuity equation.
double h_continuity_residual(const FlowState& before, const FlowState& after, double dt,
                             const StratificationProfile& prof, const SimParams& params,
                             SpectralWorkspace& ws);

} // namespace isopyc

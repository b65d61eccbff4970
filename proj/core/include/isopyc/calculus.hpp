#pragma once

#include "isopyc/field.hpp"
#include "isopyc/params.hpp"
#include "isopyc/spectral.hpp"
#include "isopyc/state.hpp"

namespace isopyc {

/// Geometry snapshot of a state's eta: the coefficient fields entering the
/// curved-gradient operators. Rebuilt each time-stage; consistent with the
/// eta it was built from.
struct DiffOpSet {
    double eps = 0.0;
    double min_jacobian = 1.0;
    Field h;            ///< -d_r eta
    Field one_plus_eh;  ///< coordinate Jacobian 1 + eps*h
    Field inv_ope;      ///< 1/(1+eps*h)
    std::vector<Field> grad_eta; ///< d components of grad_x eta
    std::vector<Field> mx;       ///< grad_eta[c]/(1+eps*h)
};

/// Builds a DiffOpSet; throws JacobianDegenerate when min(1+eps*h) < h_star.
DiffOpSet make_diff_ops(const FlowState& state, const SimParams& params, SpectralWorkspace& ws);
DiffOpSet make_diff_ops(const Field& eta, const SimParams& params, SpectralWorkspace& ws);

/// grad_x f + eps * (grad_x eta / (1+eps h)) d_r f, products dealiased.
std::vector<Field> grad_phi_x(const Field& f, const DiffOpSet& ops, SpectralWorkspace& ws);
/// Single component of grad_phi_x.
Field grad_phi_x_comp(const Field& f, int c, const DiffOpSet& ops, SpectralWorkspace& ws);
/// -(1/(1+eps h)) d_r f.
Field dr_phi(const Field& f, const DiffOpSet& ops, SpectralWorkspace& ws);
/// sqrt(mu) * grad_phi_x . V + dr_phi w; mu = 1 is the full isopycnal
/// divergence.
Field div_phi_mu(const std::vector<Field>& V, const Field& w, const DiffOpSet& ops, double mu,
                 SpectralWorkspace& ws);

// -- quadrature: trapezoid in r, exact (collocation) in x --------------------

double integral(const Field& f, const Grid& g);
double l2_inner(const Field& f, const Field& g, const Grid& grid);
/// <w f, g> with a pointwise weight field.
double weighted_l2_inner(const Field& f, const Field& g, const Field& w, const Grid& grid);
double l2_norm(const Field& f, const Grid& g);

/// Anisotropic Sobolev norm: sum_{l=0}^{k} || Lambda^{s-l} d_r^l f ||_{L2}.
double sobolev_norm(const Field& f, double s, int k, const Grid& g, SpectralWorkspace& ws);

} // namespace isopyc

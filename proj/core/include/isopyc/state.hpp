#pragma once

#include "isopyc/field.hpp"
#include "isopyc/grid.hpp"
#include "isopyc/params.hpp"

namespace isopyc {

/// Prognostic perturbation fields (V, w, eta) plus the derived layer
/// thickness h = -d_r eta, recomputed whenever eta changes.
///
/// Invariants: eta and w vanish on both boundary rows; h_star <= 1+eps*h
/// <= h_sup for healthy states (violations are flagged via the blow-up
/// monitor, not silently repaired). Mutated only by the owning time loop.
struct FlowState {
    double t = 0.0;
    std::vector<Field> V; ///< d horizontal components
    Field w;
    Field eta;
    Field h; ///< derived: -d_r eta

    static FlowState equilibrium(const Grid& g);

    /// Replaces eta and recomputes h.
    void set_eta(const Field& eta_new, const Grid& g);
    /// Zeroes the boundary rows of w and eta (then refreshes h).
    void enforce_boundary_rows(const Grid& g);

    double min_jacobian(double eps) const;
    bool finite() const;
    int dim() const { return static_cast<int>(V.size()); }
};

/// Right-hand side of the evolution system, matching FlowState shape.
struct Tendency {
    std::vector<Field> dV;
    Field dw;
    Field deta;

    static Tendency zeros(const Grid& g);
};

/// Second-order vertical derivative: central in the interior, one-sided
/// second-order at r = 0 and r = 1.
Field dr_fd(const Field& f, double dr);

} // namespace isopyc

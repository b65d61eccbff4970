#include "isopyc/state.hpp"

#include <algorithm>
#include <cmath>

namespace isopyc {

Field dr_fd(const Field& f, double dr) {
    Field out(f.nr, f.nx);
    const int nr = f.nr;
    const int nx = f.nx;
    const double inv2 = 1.0 / (2.0 * dr);
    for (int ix = 0; ix < nx; ++ix) {
        out(0, ix) = (-3.0 * f(0, ix) + 4.0 * f(1, ix) - f(2, ix)) * inv2;
        out(nr - 1, ix) = (3.0 * f(nr - 1, ix) - 4.0 * f(nr - 2, ix) + f(nr - 3, ix)) * inv2;
    }
    for (int ir = 1; ir < nr - 1; ++ir)
        for (int ix = 0; ix < nx; ++ix) out(ir, ix) = (f(ir + 1, ix) - f(ir - 1, ix)) * inv2;
    return out;
}

FlowState FlowState::equilibrium(const Grid& g) {
    FlowState s;
    s.t = 0.0;
    s.V.assign(g.d, Field::zeros(g));
    s.w = Field::zeros(g);
    s.eta = Field::zeros(g);
    s.h = Field::zeros(g);
    return s;
}

void FlowState::set_eta(const Field& eta_new, const Grid& g) {
    eta = eta_new;
    h = dr_fd(eta, g.dr());
    scale(h, -1.0);
}

void FlowState::enforce_boundary_rows(const Grid& g) {
    const int last = g.Nr - 1;
    bool touched = false;
    for (int ix = 0; ix < g.nx_total(); ++ix) {
        if (w(0, ix) != 0.0 || w(last, ix) != 0.0 || eta(0, ix) != 0.0 || eta(last, ix) != 0.0)
            touched = true;
        w(0, ix) = 0.0;
        w(last, ix) = 0.0;
        eta(0, ix) = 0.0;
        eta(last, ix) = 0.0;
    }
    if (touched) {
        h = dr_fd(eta, g.dr());
        scale(h, -1.0);
    }
}

double FlowState::min_jacobian(double eps) const {
    double m = 1.0 + eps * (h.a.empty() ? 0.0 : h.a[0]);
    for (double v : h.a) m = std::min(m, 1.0 + eps * v);
    return m;
}

bool FlowState::finite() const {
    for (const Field& f : V)
        if (!f.finite()) return false;
    return w.finite() && eta.finite() && h.finite();
}

Tendency Tendency::zeros(const Grid& g) {
    Tendency t;
    t.dV.assign(g.d, Field::zeros(g));
    t.dw = Field::zeros(g);
    t.deta = Field::zeros(g);
    return t;
}

} // namespace isopyc

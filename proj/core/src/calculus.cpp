#include "isopyc/calculus.hpp"

#include "isopyc/errors.hpp"
#include "isopyc/pairwise_sum.hpp"

#include <cmath>
#include <string>

namespace isopyc {

namespace {
DiffOpSet build_ops(const Field& eta, const Field& h, const SimParams& params,
                    SpectralWorkspace& ws) {
    DiffOpSet ops;
    ops.eps = params.epsilon;
    ops.h = h;
    ops.one_plus_eh = h;
    for (double& v : ops.one_plus_eh.a) v = 1.0 + params.epsilon * v;
    ops.min_jacobian = ops.one_plus_eh.min_value();
    if (ops.min_jacobian < params.h_star)
        throw JacobianDegenerate("min(1+eps*h) = " + std::to_string(ops.min_jacobian) +
                                 " < h_star = " + std::to_string(params.h_star));
    ops.inv_ope = ops.one_plus_eh;
    for (double& v : ops.inv_ope.a) v = 1.0 / v;
    const int d = ws.grid().d;
    ops.grad_eta.reserve(d);
    ops.mx.reserve(d);
    for (int c = 0; c < d; ++c) {
        ops.grad_eta.push_back(ws.dx(eta, c));
        // metric coefficient for the curved gradient, kept band-limited so
        // products with it need only the output mask
        ops.mx.push_back(ws.masked_product(ops.grad_eta[c], ops.inv_ope));
    }
    return ops;
}
} // namespace

DiffOpSet make_diff_ops(const FlowState& state, const SimParams& params, SpectralWorkspace& ws) {
    return build_ops(state.eta, state.h, params, ws);
}

DiffOpSet make_diff_ops(const Field& eta, const SimParams& params, SpectralWorkspace& ws) {
    Field h = dr_fd(eta, ws.grid().dr());
    scale(h, -1.0);
    return build_ops(eta, h, params, ws);
}

Field grad_phi_x_comp(const Field& f, int c, const DiffOpSet& ops, SpectralWorkspace& ws) {
    Field out = ws.dx(f, c);
    if (ops.eps != 0.0) {
        const Field drf = dr_fd(f, ws.grid().dr());
        Field corr = ws.masked_product(ops.mx[c], drf);
        add_scaled(out, ops.eps, corr);
    }
    return out;
}

std::vector<Field> grad_phi_x(const Field& f, const DiffOpSet& ops, SpectralWorkspace& ws) {
    std::vector<Field> out;
    const int d = ws.grid().d;
    out.reserve(d);
    if (ops.eps == 0.0) {
        for (int c = 0; c < d; ++c) out.push_back(ws.dx(f, c));
        return out;
    }
    const Field drf = dr_fd(f, ws.grid().dr());
    for (int c = 0; c < d; ++c) {
        Field comp = ws.dx(f, c);
        Field corr = ws.masked_product(ops.mx[c], drf);
        add_scaled(comp, ops.eps, corr);
        out.push_back(std::move(comp));
    }
    return out;
}

Field dr_phi(const Field& f, const DiffOpSet& ops, SpectralWorkspace& ws) {
    // exact pointwise quotient: (1+eps h) * dr_phi(f) = -dr(f) holds to rounding
    Field drf = dr_fd(f, ws.grid().dr());
    for (std::size_t i = 0; i < drf.a.size(); ++i) drf.a[i] *= -ops.inv_ope.a[i];
    return drf;
}

Field div_phi_mu(const std::vector<Field>& V, const Field& w, const DiffOpSet& ops, double mu,
                 SpectralWorkspace& ws) {
    Field out = dr_phi(w, ops, ws);
    const double smu = std::sqrt(mu);
    for (int c = 0; c < static_cast<int>(V.size()); ++c) {
        Field g = grad_phi_x_comp(V[c], c, ops, ws);
        add_scaled(out, smu, g);
    }
    return out;
}

double integral(const Field& f, const Grid& g) {
    std::vector<double> rows(f.nr);
    for (int ir = 0; ir < f.nr; ++ir) rows[ir] = g.rweight(ir) * pairwise_sum(f.row(ir));
    return g.cell_volume() * pairwise_sum(rows);
}

double l2_inner(const Field& f, const Field& h, const Grid& grid) {
    std::vector<double> rows(f.nr);
    for (int ir = 0; ir < f.nr; ++ir)
        rows[ir] = grid.rweight(ir) * pairwise_dot(f.row(ir), h.row(ir));
    return grid.cell_volume() * pairwise_sum(rows);
}

double weighted_l2_inner(const Field& f, const Field& h, const Field& w, const Grid& grid) {
    std::vector<double> prod(f.nx);
    std::vector<double> rows(f.nr);
    for (int ir = 0; ir < f.nr; ++ir) {
        auto fr = f.row(ir);
        auto hr = h.row(ir);
        auto wr = w.row(ir);
        for (int ix = 0; ix < f.nx; ++ix) prod[ix] = wr[ix] * fr[ix] * hr[ix];
        rows[ir] = grid.rweight(ir) * pairwise_sum(prod);
    }
    return grid.cell_volume() * pairwise_sum(rows);
}

double l2_norm(const Field& f, const Grid& g) { return std::sqrt(l2_inner(f, f, g)); }

double sobolev_norm(const Field& f, double s, int k, const Grid& g, SpectralWorkspace& ws) {
    double total = 0.0;
    Field drl = f;
    for (int l = 0; l <= k; ++l) {
        if (l > 0) drl = dr_fd(drl, g.dr());
        Field lam = ws.lambda_pow(drl, s - l);
        total += l2_norm(lam, g);
    }
    return total;
}

} // namespace isopyc

#include "isopyc/diagnostics.hpp"

#include "isopyc/dynamics.hpp"
#include "isopyc/errors.hpp"
#include "isopyc/interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isopyc {

std::string OperatorLabel::name() const {
    if (kind == Kind::LamDr) return "lam" + std::to_string(s - l) + "_dr" + std::to_string(l);
    return "dsq_lam" + std::to_string(s - 2);
}

std::vector<OperatorLabel> operator_set(int s) {
    std::vector<OperatorLabel> ops;
    for (int l = 1; l <= s; ++l) ops.push_back(OperatorLabel::lam_dr(s, l));
    ops.push_back(OperatorLabel::dsq_lam(s));
    return ops;
}

Field apply_operator(const Field& f, const OperatorLabel& op, SpectralWorkspace& ws) {
    if (op.kind == OperatorLabel::Kind::DsqLam) return ws.dsq_lambda(f, op.s);
    Field g = f;
    for (int k = 0; k < op.l; ++k) g = dr_fd(g, ws.grid().dr());
    return ws.lambda_pow(g, op.s - op.l);
}

Field good_unknown(const Field& f, const FlowState& state, const SimParams& params,
                   const OperatorLabel& op, SpectralWorkspace& ws) {
    Field out = apply_operator(f, op, ws);
    if (params.epsilon == 0.0) return out;
    DiffOpSet ops = make_diff_ops(state, params, ws);
    Field leta = apply_operator(state.eta, op, ws);
    Field coeff = ws.dealiased_product(leta, ops.inv_ope);
    Field corr = ws.dealiased_product(coeff, dr_fd(f, ws.grid().dr()));
    add_scaled(out, params.epsilon, corr);
    return out;
}

double alinhac_commutation_residual(const Field& f, const FlowState& state,
                                    const SimParams& params, const OperatorLabel& op,
                                    SpectralWorkspace& ws) {
    const Grid& grid = ws.grid();
    const int d = grid.d;
    const double eps = params.epsilon;
    DiffOpSet ops = make_diff_ops(state, params, ws);

    // g = grad^phi f (d+1 components)
    std::vector<Field> g = grad_phi_x(f, ops, ws);
    g.push_back(dr_phi(f, ops, ws));

    Field fL = good_unknown(f, state, params, op, ws);
    std::vector<Field> grad_fL = grad_phi_x(fL, ops, ws);
    grad_fL.push_back(dr_phi(fL, ops, ws));

    Field leta = apply_operator(state.eta, op, ws);

    // symmetric commutator [L; J_pert, g]: only the vertical entry is
    // nonzero, J_pert = [[0,0],[(grad_x eta)^T, -h]]
    Field jg(grid.Nr, grid.nx_total());
    for (int c = 0; c < d; ++c) {
        Field t = ws.dealiased_product(ops.grad_eta[c], g[c]);
        add_scaled(jg, 1.0, t);
    }
    {
        Field t = ws.dealiased_product(ops.h, g[d]);
        add_scaled(jg, -1.0, t);
    }
    Field comm = apply_operator(jg, op, ws);
    for (int c = 0; c < d; ++c) {
        Field lg = apply_operator(ops.grad_eta[c], op, ws);
        Field t = ws.dealiased_product(lg, g[c]);
        add_scaled(comm, -1.0, t);
        Field lgc = apply_operator(g[c], op, ws);
        Field t2 = ws.dealiased_product(ops.grad_eta[c], lgc);
        add_scaled(comm, -1.0, t2);
    }
    {
        Field lh = apply_operator(ops.h, op, ws);
        Field t = ws.dealiased_product(lh, g[d]);
        add_scaled(comm, 1.0, t);
        Field lgr = apply_operator(g[d], op, ws);
        Field t2 = ws.dealiased_product(ops.h, lgr);
        add_scaled(comm, 1.0, t2);
    }
    // eps*R1 = (0,...,0, eps*comm/(1+eps h))
    Field r1_vert = ws.dealiased_product(comm, ops.inv_ope);

    double total = 0.0;
    for (int c = 0; c <= d; ++c) {
        Field resid = apply_operator(g[c], op, ws);
        add_scaled(resid, -1.0, grad_fL[c]);
        if (eps != 0.0) {
            Field corr = ws.dealiased_product(leta, dr_phi(g[c], ops, ws));
            add_scaled(resid, -eps, corr);
            if (c == d) add_scaled(resid, -eps, r1_vert);
        }
        const double n = l2_norm(resid, grid);
        total += n * n;
    }
    return std::sqrt(total);
}

const char* to_string(HealthStatus s) {
    switch (s) {
    case HealthStatus::Healthy: return "Healthy";
    case HealthStatus::JacobianNearDegenerate: return "JacobianNearDegenerate";
    case HealthStatus::BlownUp: return "BlownUp";
    }
    return "?";
}

namespace {

Field weight_rho_jac(const FlowState& state, const StratificationProfile& prof, double eps) {
    const Grid& grid = prof.grid;
    Field w(grid.Nr, grid.nx_total());
    for (int ir = 0; ir < grid.Nr; ++ir) {
        const double rho = prof.rho_of_r[ir];
        auto wr = w.row(ir);
        auto hr = state.h.row(ir);
        for (int ix = 0; ix < grid.nx_total(); ++ix) wr[ix] = rho * (1.0 + eps * hr[ix]);
    }
    return w;
}

} // namespace

EnergyReport energy(const FlowState& state, const StratificationProfile& prof,
                    const SimParams& params, SpectralWorkspace& ws) {
    const Grid& grid = ws.grid();
    EnergyReport rep;
    rep.min_jacobian = state.min_jacobian(params.epsilon);
    rep.mh_margin = miles_howard_margin(prof);
    const bool finite = state.finite();
    rep.blown_up = (rep.min_jacobian < params.h_star) || !finite;
    if (!finite) {
        rep.E0 = rep.E = std::numeric_limits<double>::infinity();
        return rep;
    }

    const double slow = params.s0(grid.d) + 1.5;
    double e0 = 0.0;
    for (int c = 0; c < grid.d; ++c) {
        const double n = sobolev_norm(state.V[c], slow, 2, grid, ws);
        e0 += n * n;
    }
    {
        const double nw = sobolev_norm(state.w, slow, 2, grid, ws);
        e0 += params.mu * nw * nw;
        const double ne = sobolev_norm(state.eta, slow, 2, grid, ws);
        e0 += ne * ne;
    }
    rep.E0 = e0;

    if (rep.blown_up) {
        rep.E = std::numeric_limits<double>::infinity();
        return rep;
    }

    const Field wfield = weight_rho_jac(state, prof, params.epsilon);
    double e = e0;
    for (const OperatorLabel& op : operator_set(params.s_diag)) {
        EnergyContribution contrib;
        for (int c = 0; c < grid.d; ++c) {
            Field gu = good_unknown(state.V[c], state, params, op, ws);
            contrib.v_part += weighted_l2_inner(gu, gu, wfield, grid);
        }
        {
            Field gu = good_unknown(state.w, state, params, op, ws);
            contrib.w_part = params.mu * weighted_l2_inner(gu, gu, wfield, grid);
        }
        {
            Field le = apply_operator(state.eta, op, ws);
            // eta weight rho*N^2 (= rho' when buoyancy and momentum densities agree)
            Field weta(grid.Nr, grid.nx_total());
            for (int ir = 0; ir < grid.Nr; ++ir) {
                const double wv = prof.rho_of_r[ir] * prof.n2(ir);
                auto wr = weta.row(ir);
                for (int ix = 0; ix < grid.nx_total(); ++ix) wr[ix] = wv;
            }
            contrib.eta_part = weighted_l2_inner(le, le, weta, grid);
        }
        rep.contributions[op.name()] = contrib;
        e += contrib.v_part + contrib.w_part + contrib.eta_part;
    }
    rep.E = e;
    rep.div_residual = l2_norm(full_divergence(state, prof, params, ws), grid);
    return rep;
}

EquivalenceCheck energy_equivalence_check(const FlowState& state,
                                          const StratificationProfile& prof,
                                          const SimParams& params, SpectralWorkspace& ws) {
    const Grid& grid = ws.grid();
    const int s = params.s_diag;
    EquivalenceCheck out;

    double S = 0.0;
    for (int c = 0; c < grid.d; ++c) {
        const double n = sobolev_norm(state.V[c], s, s, grid, ws);
        S += n * n;
    }
    {
        const double nw = sobolev_norm(state.w, s, s, grid, ws);
        S += params.mu * nw * nw;
        const double ne = sobolev_norm(state.eta, s, s, grid, ws);
        S += ne * ne;
    }
    if (S == 0.0) {
        out.degenerate = true;
        return out;
    }
    EnergyReport rep = energy(state, prof, params, ws);
    out.ratio = rep.E / S;

    // realized weight extrema
    double wmin = std::numeric_limits<double>::infinity();
    double wmax = 0.0;
    for (int ir = 0; ir < grid.Nr; ++ir) {
        const double weta = prof.rho_of_r[ir] * prof.n2(ir);
        wmin = std::min(wmin, weta);
        wmax = std::max(wmax, weta);
    }
    const double eps = params.epsilon;
    for (int ir = 0; ir < grid.Nr; ++ir) {
        const double rho = prof.rho_of_r[ir];
        auto hr = state.h.row(ir);
        for (int ix = 0; ix < grid.nx_total(); ++ix) {
            const double wv = rho * (1.0 + eps * hr[ix]);
            wmin = std::min(wmin, wv);
            wmax = std::max(wmax, wv);
        }
    }
    wmin = std::min(wmin, 1.0);
    wmax = std::max(wmax, 1.0);

    // mode-wise overlap constants: ||f||_{H^s}^2 <= (s+1) sum_l ||.||^2 and
    // (1+xi^2)^s <= 4 |xi|^4 (1+xi^2)^{s-2} + 2^{s-s0-3/2} (1+xi^2)^{s0+3/2}
    const double s0 = params.s0(grid.d);
    const double c_low = std::pow(2.0, s - s0 - 1.5);
    const double overlap = (s + 1.0) * std::max(4.0, c_low);
    out.lower = 1.0 / (overlap * std::max(1.0 / wmin, 1.0));
    // E0 uses the low index s0+3/2, which may exceed s for small s_diag;
    // the resolved-band factor (1+xi_max^2)^(slow-s) covers the overhang
    double ximax2 = 0.0;
    for (int m = 0; m < ws.nmodes(); ++m) ximax2 = std::max(ximax2, ws.xi2(m));
    const double kappa = std::pow(1.0 + ximax2, std::max(0.0, (s0 + 1.5) - s));
    out.upper = kappa + wmax;
    if (eps != 0.0) {
        // slack absorbing the good-unknown cross terms
        out.lower *= 0.25;
        out.upper *= 4.0;
    }
    out.within = out.ratio >= out.lower && out.ratio <= out.upper;
    return out;
}

MonitorResult blowup_monitor(const FlowState& state, const SimParams& params,
                             SpectralWorkspace& ws) {
    const Grid& grid = ws.grid();
    MonitorResult m;
    m.min_jacobian = state.min_jacobian(params.epsilon);
    if (!state.finite()) {
        m.status = HealthStatus::BlownUp;
        return m;
    }
    double un2 = 0.0;
    for (int c = 0; c < grid.d; ++c) {
        const double n = sobolev_norm(state.V[c], params.s_diag, params.k_diag, grid, ws);
        un2 += n * n;
    }
    {
        const double n = sobolev_norm(state.w, params.s_diag, params.k_diag, grid, ws);
        un2 += n * n;
    }
    m.u_norm = std::sqrt(un2);
    if (m.min_jacobian < params.h_star || m.u_norm > params.energy_ceiling) {
        m.status = HealthStatus::BlownUp;
    } else if (m.min_jacobian < 2.0 * params.h_star) {
        m.status = HealthStatus::JacobianNearDegenerate;
    } else {
        m.status = HealthStatus::Healthy;
    }
    return m;
}

double growth_rate_fit(std::span<const double> t, std::span<const double> E) {
    std::vector<double> ts, logs;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (E[i] > 0.0) {
            ts.push_back(t[i]);
            logs.push_back(std::log(E[i]));
        }
    }
    if (ts.size() < 10) throw InsufficientData("growth_rate_fit needs >= 10 positive samples");
    return lsq_slope(ts, logs);
}

} // namespace isopyc

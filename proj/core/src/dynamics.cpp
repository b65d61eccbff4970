#include "isopyc/dynamics.hpp"

#include "isopyc/errors.hpp"
#include "isopyc/interp.hpp"

#include <algorithm>
#include <cmath>

namespace isopyc {

Field buoyancy(const FlowState& state, const StratificationProfile& prof,
               const SimParams& params) {
    const Grid& grid = prof.grid;
    Field b(grid.Nr, grid.nx_total());
    const double eps = params.epsilon;
    if (eps == 0.0) {
        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double n2 = prof.n2(ir);
            auto br = b.row(ir);
            auto er = state.eta.row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix) br[ix] = n2 * er[ix];
        }
        return b;
    }
    const double inv_eps = 1.0 / eps;
    for (int ir = 0; ir < grid.Nr; ++ir) {
        const double r = grid.r(ir);
        const double rho_r = prof.rho_b_of_r[ir];
        auto br = b.row(ir);
        auto er = state.eta.row(ir);
        for (int ix = 0; ix < grid.nx_total(); ++ix)
            br[ix] = inv_eps * (1.0 - prof.rho_b_at(r - eps * er[ix]) / rho_r);
    }
    return b;
}

Field buoyancy_remainder(const FlowState& state, const StratificationProfile& prof,
                         const SimParams& params) {
    const Grid& grid = prof.grid;
    Field bt(grid.Nr, grid.nx_total());
    const double eps = params.epsilon;
    if (eps == 0.0) {
        // second-order Taylor coefficient: -(eta^2/2) rho_b''/rho_b
        std::vector<double> second(grid.Nr);
        {
            // differentiate the sampled rho_b' once more (4th order)
            std::vector<double> rp = prof.rho_b_prime;
            const double h = grid.dr();
            for (int i = 0; i < grid.Nr; ++i) {
                auto at = [&](int k) { return rp[std::clamp(k, 0, grid.Nr - 1)]; };
                if (i >= 2 && i < grid.Nr - 2)
                    second[i] =
                        (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
                else if (i < 2)
                    second[i] = (-25.0 * at(i) + 48.0 * at(i + 1) - 36.0 * at(i + 2) +
                                 16.0 * at(i + 3) - 3.0 * at(i + 4)) /
                                (12.0 * h);
                else
                    second[i] = (25.0 * at(i) - 48.0 * at(i - 1) + 36.0 * at(i - 2) -
                                 16.0 * at(i - 3) + 3.0 * at(i - 4)) /
                                (12.0 * h);
            }
        }
        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double c = -0.5 * second[ir] / prof.rho_b_of_r[ir];
            auto br = bt.row(ir);
            auto er = state.eta.row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix) br[ix] = c * er[ix] * er[ix];
        }
        return bt;
    }
    Field b = buoyancy(state, prof, params);
    const double inv_eps = 1.0 / eps;
    for (int ir = 0; ir < grid.Nr; ++ir) {
        const double n2 = prof.n2(ir);
        auto br = bt.row(ir);
        auto bb = b.row(ir);
        auto er = state.eta.row(ir);
        for (int ix = 0; ix < grid.nx_total(); ++ix)
            br[ix] = inv_eps * (bb[ix] - n2 * er[ix]);
    }
    return bt;
}

std::pair<Field, double> reconstruct_w(const std::vector<Field>& V, const DiffOpSet& ops,
                                       const StratificationProfile& prof, SpectralWorkspace& ws) {
    const Grid& grid = ws.grid();
    const int d = grid.d;
    Field divx(grid.Nr, grid.nx_total());
    for (int c = 0; c < d; ++c) {
        Field g = grad_phi_x_comp(V[c], c, ops, ws);
        add_scaled(divx, 1.0, g);
    }
    Field integrand = ws.masked_product(ops.one_plus_eh, divx);
    for (int c = 0; c < d; ++c)
        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double vp = prof.vbar_prime[c][ir];
            auto it = integrand.row(ir);
            auto ge = ops.grad_eta[c].row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix) it[ix] += vp * ge[ix];
        }
    Field w(grid.Nr, grid.nx_total());
    const double dr = grid.dr();
    for (int ir = 1; ir < grid.Nr; ++ir)
        for (int ix = 0; ix < grid.nx_total(); ++ix)
            w(ir, ix) = w(ir - 1, ix) + 0.5 * dr * (integrand(ir - 1, ix) + integrand(ir, ix));
    double defect = 0.0;
    for (int ix = 0; ix < grid.nx_total(); ++ix)
        defect = std::max(defect, std::abs(w(grid.Nr - 1, ix)));
    return {std::move(w), defect};
}

Field full_divergence(const FlowState& state, const StratificationProfile& prof,
                      const SimParams& params, SpectralWorkspace& ws) {
    DiffOpSet ops = make_diff_ops(state, params, ws);
    Field div = div_phi_mu(state.V, state.w, ops, 1.0, ws);
    Field svb(div.nr, div.nx);
    for (int c = 0; c < ws.grid().d; ++c)
        for (int ir = 0; ir < div.nr; ++ir) {
            const double vp = prof.vbar_prime[c][ir];
            auto sr = svb.row(ir);
            auto ge = ops.grad_eta[c].row(ir);
            for (int ix = 0; ix < div.nx; ++ix) sr[ix] += vp * ge[ix];
        }
    Field corr = ws.dealiased_product(svb, ops.inv_ope);
    add_scaled(div, 1.0, corr);
    return div;
}

FlowState prepare_initial_data(const std::vector<Field>& V_raw, const Field& w_raw,
                               const Field& eta_raw, const StratificationProfile& prof,
                               const SimParams& params, PressureSolver& solver) {
    SpectralWorkspace& ws = solver.ws();
    const Grid& grid = ws.grid();
    const int last = grid.Nr - 1;
    for (int ix = 0; ix < grid.nx_total(); ++ix)
        if (std::abs(eta_raw(0, ix)) > 1e-12 || std::abs(eta_raw(last, ix)) > 1e-12)
            throw ConfigError("initial eta must vanish on the boundary rows r = 0, 1");

    Field w0 = w_raw;
    for (int ix = 0; ix < grid.nx_total(); ++ix) {
        w0(0, ix) = 0.0;
        w0(last, ix) = 0.0;
    }

    DiffOpSet ops = make_diff_ops(eta_raw, params, ws);
    // background divergence (grad_x eta . Vbar')/(1+eps h), assembled so the
    // (1+eps h)-weighted load integrates to zero exactly
    Field svb(grid.Nr, grid.nx_total());
    for (int c = 0; c < grid.d; ++c)
        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double vp = prof.vbar_prime[c][ir];
            auto sr = svb.row(ir);
            auto ge = ops.grad_eta[c].row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix) sr[ix] += vp * ge[ix];
        }
    Field S = hadamard(svb, ops.inv_ope);

    LerayResult lr =
        leray_project(V_raw, w0, eta_raw, params, solver, params.pressure_tol, &S);

    FlowState out;
    out.t = 0.0;
    out.V = std::move(lr.V);
    for (int c = 0; c < grid.d; ++c) ws.dealias(out.V[c]);
    out.w = std::move(lr.w);
    ws.dealias(out.w);
    Field eta = ws.dealiased(eta_raw);
    out.set_eta(eta, grid);
    out.enforce_boundary_rows(grid);
    return out;
}

namespace {

/// J_d[ J_d(Vbar + eps V) . grad_x J_d f ]
Field advection(const Field& f, const std::vector<Field>& Uadv, double delta,
                SpectralWorkspace& ws) {
    const Grid& grid = ws.grid();
    const Field fm = delta > 0.0 ? ws.mollify(f, delta) : f;
    Field acc(grid.Nr, grid.nx_total());
    for (int c = 0; c < grid.d; ++c) {
        Field dxf = ws.dx(fm, c);
        Field t = ws.masked_product(Uadv[c], dxf);
        add_scaled(acc, 1.0, t);
    }
    return delta > 0.0 ? ws.mollify(acc, delta) : acc;
}

} // namespace

RhsResult rhs(const FlowState& state, const StratificationProfile& prof, const SimParams& params,
              double delta, PressureSolver& solver) {
    SpectralWorkspace& ws = solver.ws();
    const Grid& grid = ws.grid();
    const int d = grid.d;
    const double eps = params.epsilon;

    if (!state.finite()) throw BlownUpError("state has non-finite fields at t = " +
                                            std::to_string(state.t));

    RhsResult out;
    out.b = buoyancy(state, prof, params);
    EllipticProblem prob = assemble_pressure_rhs(state, prof, params, out.b, solver);
    out.pressure = solver.solve(prob, params.pressure_tol, params.pressure_max_iter);

    // advection velocity J_d(Vbar + eps V)
    std::vector<Field> Uadv(d);
    for (int c = 0; c < d; ++c) {
        Field u = state.V[c];
        scale(u, eps);
        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double vb = prof.vbar_of_r[c][ir];
            auto ur = u.row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix) ur[ix] += vb;
        }
        Uadv[c] = delta > 0.0 ? ws.mollify(u, delta) : std::move(u);
    }

    out.tend = Tendency::zeros(grid);
    for (int c = 0; c < d; ++c) {
        out.tend.dV[c] = advection(state.V[c], Uadv, delta, ws);
        scale(out.tend.dV[c], -1.0);
        // -(1/rho) grad_x^phi P
        const Field& gp = out.pressure.grad_P[c];
        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double coeff = 1.0 / prof.rho_of_r[ir];
            auto tr = out.tend.dV[c].row(ir);
            auto gr = gp.row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix) tr[ix] -= coeff * gr[ix];
        }
    }

    out.tend.dw = advection(state.w, Uadv, delta, ws);
    scale(out.tend.dw, -1.0);
    {
        const double inv_mu = 1.0 / params.mu;
        const Field& gpr = out.pressure.grad_P[d];
        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double coeff = 1.0 / prof.rho_of_r[ir];
            auto tr = out.tend.dw.row(ir);
            auto gr = gpr.row(ir);
            auto br = out.b.row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix)
                tr[ix] -= inv_mu * (coeff * gr[ix] + br[ix]);
        }
    }

    out.tend.deta = advection(state.eta, Uadv, delta, ws);
    scale(out.tend.deta, -1.0);
    add_scaled(out.tend.deta, 1.0, state.w);
    // deta vanishes on the boundary rows whenever the state satisfies its
    // boundary conditions; pin it exactly
    for (int ix = 0; ix < grid.nx_total(); ++ix) {
        out.tend.deta(0, ix) = 0.0;
        out.tend.deta(grid.Nr - 1, ix) = 0.0;
    }
    return out;
}

namespace {

// Stage states are re-truncated to the 2/3 band, maintaining the invariant
// that every prognostic field entering a product is band-limited.
FlowState advance(const FlowState& base, const Tendency& k, double coeff, const Grid& grid,
                  SpectralWorkspace& ws) {
    FlowState s;
    s.t = base.t;
    s.V = base.V;
    for (std::size_t c = 0; c < s.V.size(); ++c) {
        add_scaled(s.V[c], coeff, k.dV[c]);
        ws.dealias(s.V[c]);
    }
    s.w = base.w;
    add_scaled(s.w, coeff, k.dw);
    ws.dealias(s.w);
    Field eta = base.eta;
    add_scaled(eta, coeff, k.deta);
    ws.dealias(eta);
    s.set_eta(eta, grid);
    s.enforce_boundary_rows(grid);
    return s;
}

} // namespace

FlowState step(const FlowState& state, const StratificationProfile& prof, const SimParams& params,
               PressureSolver& solver, double dt) {
    const Grid& grid = solver.ws().grid();
    // CFL on the horizontal advection speed, checked before any work
    double maxspeed = 0.0;
    for (int c = 0; c < grid.d; ++c)
        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double vb = prof.vbar_of_r[c][ir];
            auto vr = state.V[c].row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix)
                maxspeed = std::max(maxspeed, std::abs(vb + params.epsilon * vr[ix]));
        }
    if (maxspeed > 0.0 && std::abs(dt) > params.cfl * grid.dx() / maxspeed)
        throw CFLViolation("dt = " + std::to_string(dt) + " exceeds CFL bound " +
                           std::to_string(params.cfl * grid.dx() / maxspeed));

    SpectralWorkspace& ws = solver.ws();
    const double delta = params.delta;
    RhsResult k1 = rhs(state, prof, params, delta, solver);
    FlowState s2 = advance(state, k1.tend, 0.5 * dt, grid, ws);
    s2.t = state.t + 0.5 * dt;
    RhsResult k2 = rhs(s2, prof, params, delta, solver);
    FlowState s3 = advance(state, k2.tend, 0.5 * dt, grid, ws);
    s3.t = state.t + 0.5 * dt;
    RhsResult k3 = rhs(s3, prof, params, delta, solver);
    FlowState s4 = advance(state, k3.tend, dt, grid, ws);
    s4.t = state.t + dt;
    RhsResult k4 = rhs(s4, prof, params, delta, solver);

    FlowState out;
    out.t = state.t + dt;
    out.V = state.V;
    const double c16 = dt / 6.0;
    const double c13 = dt / 3.0;
    for (int c = 0; c < grid.d; ++c) {
        add_scaled(out.V[c], c16, k1.tend.dV[c]);
        add_scaled(out.V[c], c13, k2.tend.dV[c]);
        add_scaled(out.V[c], c13, k3.tend.dV[c]);
        add_scaled(out.V[c], c16, k4.tend.dV[c]);
    }
    for (int c = 0; c < grid.d; ++c) ws.dealias(out.V[c]);
    out.w = state.w;
    add_scaled(out.w, c16, k1.tend.dw);
    add_scaled(out.w, c13, k2.tend.dw);
    add_scaled(out.w, c13, k3.tend.dw);
    add_scaled(out.w, c16, k4.tend.dw);
    ws.dealias(out.w);
    Field eta = state.eta;
    add_scaled(eta, c16, k1.tend.deta);
    add_scaled(eta, c13, k2.tend.deta);
    add_scaled(eta, c13, k3.tend.deta);
    add_scaled(eta, c16, k4.tend.deta);
    ws.dealias(eta);
    out.set_eta(eta, grid);
    out.enforce_boundary_rows(grid);
    return out;
}

FlowState step(const FlowState& state, const StratificationProfile& prof, const SimParams& params,
               PressureSolver& solver) {
    return step(state, prof, params, solver, params.dt);
}

double h_continuity_residual(const FlowState& before, const FlowState& after, double dt,
                             const StratificationProfile& prof, const SimParams& params,
                             SpectralWorkspace& ws) {
    const Grid& grid = ws.grid();
    const double eps = params.epsilon;
    Field resid(grid.Nr, grid.nx_total());
    for (std::size_t i = 0; i < resid.a.size(); ++i)
        resid.a[i] = eps * (after.h.a[i] - before.h.a[i]) / dt;

    Field jac_mid(grid.Nr, grid.nx_total());
    for (std::size_t i = 0; i < jac_mid.a.size(); ++i)
        jac_mid.a[i] = 1.0 + eps * 0.5 * (before.h.a[i] + after.h.a[i]);
    for (int c = 0; c < grid.d; ++c) {
        Field vfull(grid.Nr, grid.nx_total());
        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double vb = prof.vbar_of_r[c][ir];
            auto vr = vfull.row(ir);
            auto b4 = before.V[c].row(ir);
            auto af = after.V[c].row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix)
                vr[ix] = vb + eps * 0.5 * (b4[ix] + af[ix]);
        }
        Field flux = ws.masked_product(jac_mid, vfull);
        Field dflux = ws.dx(flux, c);
        add_scaled(resid, 1.0, dflux);
    }
    return l2_norm(resid, grid);
}

} // namespace isopyc

#include "isopyc/elliptic.hpp"

#include "isopyc/dynamics.hpp"
#include "isopyc/errors.hpp"
#include "isopyc/pairwise_sum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <thread>

namespace isopyc {

namespace {

// -- half-level transfer operators -------------------------------------------

Field mavg(const Field& f) {
    Field out(f.nr - 1, f.nx);
    for (int j = 0; j < out.nr; ++j)
        for (int ix = 0; ix < f.nx; ++ix) out(j, ix) = 0.5 * (f(j, ix) + f(j + 1, ix));
    return out;
}

Field mavg_t(const Field& u, int nr_levels) {
    Field out(nr_levels, u.nx);
    for (int i = 0; i < nr_levels; ++i)
        for (int ix = 0; ix < u.nx; ++ix) {
            double v = 0.0;
            if (i > 0) v += 0.5 * u(i - 1, ix);
            if (i < nr_levels - 1) v += 0.5 * u(i, ix);
            out(i, ix) = v;
        }
    return out;
}

Field ddiff(const Field& f, double dr) {
    Field out(f.nr - 1, f.nx);
    const double inv = 1.0 / dr;
    for (int j = 0; j < out.nr; ++j)
        for (int ix = 0; ix < f.nx; ++ix) out(j, ix) = (f(j + 1, ix) - f(j, ix)) * inv;
    return out;
}

Field ddiff_t(const Field& u, int nr_levels, double dr) {
    Field out(nr_levels, u.nx);
    const double inv = 1.0 / dr;
    for (int i = 0; i < nr_levels; ++i)
        for (int ix = 0; ix < u.nx; ++ix) {
            double v = 0.0;
            if (i > 0) v += u(i - 1, ix) * inv;
            if (i < nr_levels - 1) v -= u(i, ix) * inv;
            out(i, ix) = v;
        }
    return out;
}

void mul_rows(Field& f, const std::vector<double>& per_row) {
    for (int j = 0; j < f.nr; ++j) {
        auto row = f.row(j);
        const double s = per_row[j];
        for (double& v : row) v *= s;
    }
}

Field rowscaled(const Field& f, const std::vector<double>& per_row) {
    Field out = f;
    mul_rows(out, per_row);
    return out;
}

std::vector<double> row_means(const Field& f) {
    std::vector<double> m(f.nr);
    for (int j = 0; j < f.nr; ++j) m[j] = pairwise_sum(f.row(j)) / f.nx;
    return m;
}

double euclidean_mean(const Field& f) { return pairwise_sum(f.a) / static_cast<double>(f.size()); }

} // namespace

// -- geometry -----------------------------------------------------------------

EllipticGeometry make_elliptic_geometry(const Field& eta, const std::vector<double>& rho_level,
                                        const std::vector<double>& rho_half,
                                        const SimParams& params, double mu,
                                        SpectralWorkspace& ws_level, SpectralWorkspace& ws_half) {
    EllipticGeometry g;
    g.mu = mu;
    g.ops = make_diff_ops(eta, params, ws_level);
    g.Jh = mavg(g.ops.one_plus_eh);
    const Grid& grid = ws_level.grid();

    g.coeff_half = Field(grid.Nr - 1, grid.nx_total());
    for (int j = 0; j < grid.Nr - 1; ++j) {
        auto row = g.coeff_half.row(j);
        const double c = 1.0 / rho_half[j];
        for (double& v : row) v = c;
    }
    g.coeff_level.resize(grid.Nr);
    for (int i = 0; i < grid.Nr; ++i) g.coeff_level[i] = 1.0 / rho_level[i];

    Field inv_jh = g.Jh;
    for (double& v : inv_jh.a) v = 1.0 / v;
    g.cbar = row_means(inv_jh);
    g.cfluc = inv_jh;
    for (int j = 0; j < g.cfluc.nr; ++j) {
        auto row = g.cfluc.row(j);
        for (double& v : row) v -= g.cbar[j];
    }
    ws_half.dealias(g.cfluc);

    const int d = grid.d;
    g.mbar.resize(d);
    g.mfluc.reserve(d);
    for (int c = 0; c < d; ++c) {
        Field mh = hadamard(mavg(g.ops.grad_eta[c]), inv_jh);
        g.mbar[c] = row_means(mh);
        for (int j = 0; j < mh.nr; ++j) {
            auto row = mh.row(j);
            for (double& v : row) v -= g.mbar[c][j];
        }
        ws_half.dealias(mh);
        g.mfluc.push_back(std::move(mh));
    }
    return g;
}

// -- solver -------------------------------------------------------------------

struct PressureSolver::Precond {
    std::vector<double> rho_half;
    double mu = 0.0;
    int nr = 0;
    int nmodes = 0;
    // per-mode LU factors of the tridiagonal flat operator (pivoting-free,
    // matrices are SPD); mode entries with xi_eff = 0 use the pinned system
    // (first row/column dropped).
    std::vector<double> low, diag, up;
    std::vector<char> pinned;
};

PressureSolver::PressureSolver(const Grid& grid, int nthreads)
    : grid_(grid), nthreads_(std::max(1, nthreads)), ws_level_(grid),
      ws_half_(grid, grid.Nr - 1) {}

void PressureSolver::ensure_precond(const std::vector<double>& rho_half, double mu) {
    if (precond_ && precond_->mu == mu && precond_->rho_half == rho_half) return;
    auto pc = std::make_shared<Precond>();
    pc->rho_half = rho_half;
    pc->mu = mu;
    pc->nr = grid_.Nr;
    pc->nmodes = ws_level_.nmodes();
    const int nr = pc->nr;
    const double dr = grid_.dr();
    const double vol = grid_.cell_volume();
    pc->low.assign(static_cast<std::size_t>(pc->nmodes) * nr, 0.0);
    pc->diag.assign(static_cast<std::size_t>(pc->nmodes) * nr, 0.0);
    pc->up.assign(static_cast<std::size_t>(pc->nmodes) * nr, 0.0);
    pc->pinned.assign(pc->nmodes, 0);

    std::vector<double> w(nr - 1);
    for (int j = 0; j < nr - 1; ++j) w[j] = vol * dr / rho_half[j];

    for (int m = 0; m < pc->nmodes; ++m) {
        // spectral derivatives vanish on Nyquist lines, so the flat operator
        // sees the effective wavenumber
        const double xi_eff2 = ws_level_.xi2(m) * (ws_level_.deriv_ok(m) * ws_level_.deriv_ok(m));
        const bool pin = xi_eff2 == 0.0;
        pc->pinned[m] = pin ? 1 : 0;
        double* D = pc->diag.data() + static_cast<std::size_t>(m) * nr;
        double* U = pc->up.data() + static_cast<std::size_t>(m) * nr;
        double* Lw = pc->low.data() + static_cast<std::size_t>(m) * nr;
        const double kmu = mu * xi_eff2;
        for (int i = 0; i < nr; ++i) {
            double dv = 0.0;
            if (i > 0) dv += w[i - 1] * (1.0 / (dr * dr) + kmu / 4.0);
            if (i < nr - 1) dv += w[i] * (1.0 / (dr * dr) + kmu / 4.0);
            D[i] = dv;
            if (i < nr - 1) U[i] = w[i] * (-1.0 / (dr * dr) + kmu / 4.0);
        }
        // LU factorization (Thomas), on rows [pin, nr)
        const int i0 = pin ? 1 : 0;
        for (int i = i0 + 1; i < nr; ++i) {
            const double l = U[i - 1] / D[i - 1];
            Lw[i] = l;
            D[i] -= l * U[i - 1];
        }
    }
    precond_ = pc;
}

void PressureSolver::apply_precond(const Field& r, Field& z) {
    const int nr = grid_.Nr;
    const int nxc = ws_level_.nmodes();
    std::vector<std::complex<double>> modes;
    ws_level_.forward(r, modes);

    const Precond& pc = *precond_;
    auto solve_mode = [&](int m, std::complex<double>* v) {
        const double* D = pc.diag.data() + static_cast<std::size_t>(m) * nr;
        const double* U = pc.up.data() + static_cast<std::size_t>(m) * nr;
        const double* Lw = pc.low.data() + static_cast<std::size_t>(m) * nr;
        for (int i = 0; i < nr; ++i) v[i] = modes[static_cast<std::size_t>(i) * nxc + m];
        const bool pin = pc.pinned[m] != 0;
        const bool nyquist_line = ws_level_.deriv_ok(m) == 0.0 && ws_level_.xi2(m) > 0.0;
        if (nyquist_line) {
            // derivative-invisible content: keep it out of the iteration
            for (int i = 0; i < nr; ++i) v[i] = 0.0;
        } else {
            const int i0 = pin ? 1 : 0;
            if (pin) v[0] = 0.0;
            for (int i = i0 + 1; i < nr; ++i) v[i] -= Lw[i] * v[i - 1];
            v[nr - 1] /= D[nr - 1];
            for (int i = nr - 2; i >= i0; --i) v[i] = (v[i] - U[i] * v[i + 1]) / D[i];
            if (pin) {
                std::complex<double> mean = 0.0;
                for (int i = 0; i < nr; ++i) mean += v[i];
                mean /= static_cast<double>(nr);
                for (int i = 0; i < nr; ++i) v[i] -= mean;
            }
        }
        for (int i = 0; i < nr; ++i) modes[static_cast<std::size_t>(i) * nxc + m] = v[i];
    };

    if (nthreads_ > 1 && nxc >= 256) {
        std::vector<std::thread> pool;
        const int chunk = (nxc + nthreads_ - 1) / nthreads_;
        for (int t = 0; t < nthreads_; ++t) {
            const int lo = t * chunk;
            const int hi = std::min(nxc, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                std::vector<std::complex<double>> v(nr);
                for (int m = lo; m < hi; ++m) solve_mode(m, v.data());
            });
        }
        for (auto& th : pool) th.join();
    } else {
        std::vector<std::complex<double>> v(nr);
        for (int m = 0; m < nxc; ++m) solve_mode(m, v.data());
    }
    ws_level_.backward(modes, z);
}

void PressureSolver::gradient_half(const EllipticGeometry& geom, const Field& P,
                                   std::vector<Field>& g) {
    const Grid& grid = grid_;
    const int d = grid.d;
    const double smu = std::sqrt(geom.mu);
    const double eps = geom.ops.eps;
    g.assign(d + 1, Field());

    Field DP = ddiff(P, grid.dr());
    Field PiDP;
    const bool curved = eps != 0.0;
    if (curved) PiDP = ws_half_.dealiased(DP);

    for (int c = 0; c < d; ++c) {
        Field gx = mavg(ws_level_.dx(P, c));
        if (curved) {
            Field t = rowscaled(DP, geom.mbar[c]);
            Field t2 = hadamard(geom.mfluc[c], PiDP);
            ws_half_.dealias(t2);
            add_scaled(t, 1.0, t2);
            add_scaled(gx, eps, t);
        }
        scale(gx, smu);
        g[c] = std::move(gx);
    }
    Field gr = rowscaled(DP, geom.cbar);
    if (curved) {
        Field t2 = hadamard(geom.cfluc, PiDP);
        ws_half_.dealias(t2);
        add_scaled(gr, 1.0, t2);
    }
    scale(gr, -1.0);
    g[d] = std::move(gr);
}

void PressureSolver::adjoint_gradient(const EllipticGeometry& geom, const std::vector<Field>& u,
                                      Field& y) {
    const Grid& grid = grid_;
    const int d = grid.d;
    const double smu = std::sqrt(geom.mu);
    const double eps = geom.ops.eps;
    const bool curved = eps != 0.0;
    y = Field(grid.Nr, grid.nx_total());

    for (int c = 0; c < d; ++c) {
        Field t1 = ws_level_.dx(mavg_t(u[c], grid.Nr), c);
        add_scaled(y, -smu, t1);
        if (curved) {
            Field s = rowscaled(u[c], geom.mbar[c]);
            Field s2 = hadamard(geom.mfluc[c], ws_half_.dealiased(u[c]));
            ws_half_.dealias(s2);
            add_scaled(s, 1.0, s2);
            Field t2 = ddiff_t(s, grid.Nr, grid.dr());
            add_scaled(y, smu * eps, t2);
        }
    }
    Field s = rowscaled(u[d], geom.cbar);
    if (curved) {
        Field s2 = hadamard(geom.cfluc, ws_half_.dealiased(u[d]));
        ws_half_.dealias(s2);
        add_scaled(s, 1.0, s2);
    }
    Field t = ddiff_t(s, grid.Nr, grid.dr());
    add_scaled(y, -1.0, t);
}

Field PressureSolver::apply_operator(const EllipticGeometry& geom, const Field& P) {
    std::vector<Field> g;
    gradient_half(geom, P, g);
    const double wconst = grid_.cell_volume() * grid_.dr();
    for (Field& gc : g) {
        for (std::size_t i = 0; i < gc.a.size(); ++i)
            gc.a[i] *= wconst * geom.Jh.a[i] * geom.coeff_half.a[i];
    }
    Field y;
    adjoint_gradient(geom, g, y);
    return y;
}

Field PressureSolver::assemble_rhs(const EllipticProblem& prob) {
    const Grid& grid = grid_;
    Field b(grid.Nr, grid.nx_total());
    const double vol = grid.cell_volume();

    if (!prob.rhs_pointwise.a.empty()) {
        // l(q) -= int (1+eps h) F q
        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double wq = vol * grid.rweight(ir);
            auto br = b.row(ir);
            auto fr = prob.rhs_pointwise.row(ir);
            auto jr = prob.geom.ops.one_plus_eh.row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix) br[ix] -= wq * jr[ix] * fr[ix];
        }
    }
    if (prob.rhs_divergence.ncomp() > 0) {
        // l(q) += int (1+eps h) G . grad_mu^phi q
        const double wconst = vol * grid.dr();
        std::vector<Field> u(grid.d + 1);
        for (int c = 0; c <= grid.d; ++c) {
            u[c] = mavg(prob.rhs_divergence[c]);
            for (std::size_t i = 0; i < u[c].a.size(); ++i)
                u[c].a[i] *= wconst * prob.geom.Jh.a[i];
        }
        Field t;
        adjoint_gradient(prob.geom, u, t);
        add_scaled(b, 1.0, t);
        if (!prob.neumann_from_divergence) {
            const Field& gd = prob.rhs_divergence[grid.d];
            auto b0 = b.row(0);
            auto bl = b.row(grid.Nr - 1);
            auto g0 = gd.row(0);
            auto gl = gd.row(grid.Nr - 1);
            for (int ix = 0; ix < grid.nx_total(); ++ix) {
                b0[ix] -= vol * g0[ix];
                bl[ix] += vol * gl[ix];
            }
        }
    }
    if (!prob.neumann_top.empty()) {
        auto b0 = b.row(0);
        for (int ix = 0; ix < grid.nx_total(); ++ix) b0[ix] += vol * prob.neumann_top[ix];
    }
    if (!prob.neumann_bottom.empty()) {
        auto bl = b.row(grid.Nr - 1);
        for (int ix = 0; ix < grid.nx_total(); ++ix) bl[ix] -= vol * prob.neumann_bottom[ix];
    }
    return b;
}

PressureField PressureSolver::solve(EllipticProblem& prob, double tol, int max_iter,
                                    double tol_compat) {
    const Grid& grid = grid_;
    std::vector<double> rho_half(grid.Nr - 1);
    for (int j = 0; j < grid.Nr - 1; ++j) rho_half[j] = 1.0 / prob.geom.coeff_half(j, 0);
    ensure_precond(rho_half, prob.geom.mu);

    Field b = assemble_rhs(prob);

    PressureField out;
    out.P = Field(grid.Nr, grid.nx_total());

    std::vector<double> absb(b.a.size());
    for (std::size_t i = 0; i < b.a.size(); ++i) absb[i] = std::abs(b.a[i]);
    const double l1 = pairwise_sum(absb);
    const double sumb = pairwise_sum(b.a);
    if (l1 <= 1e-300) {
        // zero data: P = 0
        finalize_gradients(prob.geom, out);
        return out;
    }
    const double rel_defect = std::abs(sumb) / l1;
    prob.compat_defect = rel_defect;
    out.compat_defect = rel_defect;
    if (rel_defect > tol_compat)
        throw CompatibilityDefect("Neumann compatibility defect " + std::to_string(rel_defect) +
                                  " exceeds tolerance " + std::to_string(tol_compat));
    // subtract the defect uniformly
    const double shift = sumb / static_cast<double>(b.size());
    for (double& v : b.a) v -= shift;

    const double bnorm = std::sqrt(pairwise_dot(b.a, b.a));

    Field x(grid.Nr, grid.nx_total());
    Field r = b;
    Field z(grid.Nr, grid.nx_total());
    apply_precond(r, z);
    {
        const double m = euclidean_mean(z);
        for (double& v : z.a) v -= m;
    }
    Field p = z;
    double rz = pairwise_dot(r.a, z.a);
    int it = 0;
    double rel = 1.0;
    for (it = 1; it <= max_iter; ++it) {
        std::vector<Field> g;
        gradient_half(prob.geom, p, g);
        const double wconst = grid.cell_volume() * grid.dr();
        for (Field& gc : g)
            for (std::size_t i = 0; i < gc.a.size(); ++i)
                gc.a[i] *= wconst * prob.geom.Jh.a[i] * prob.geom.coeff_half.a[i];
        Field Ap;
        adjoint_gradient(prob.geom, g, Ap);

        const double pAp = pairwise_dot(p.a, Ap.a);
        if (pAp <= 0.0) throw NoConvergence(it, rel);
        const double alpha = rz / pAp;
        add_scaled(x, alpha, p);
        add_scaled(r, -alpha, Ap);
        rel = std::sqrt(pairwise_dot(r.a, r.a)) / bnorm;
        if (rel <= tol) break;
        apply_precond(r, z);
        const double m = euclidean_mean(z);
        for (double& v : z.a) v -= m;
        const double rz_new = pairwise_dot(r.a, z.a);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < p.a.size(); ++i) p.a[i] = z.a[i] + beta * p.a[i];
    }
    if (rel > tol) throw NoConvergence(max_iter, rel);

    // (1+eps h)-weighted zero-mean gauge
    {
        std::vector<double> rows(grid.Nr), wrows(grid.Nr), prod(grid.nx_total());
        for (int ir = 0; ir < grid.Nr; ++ir) {
            auto xr = x.row(ir);
            auto jr = prob.geom.ops.one_plus_eh.row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix) prod[ix] = xr[ix] * jr[ix];
            rows[ir] = grid.rweight(ir) * pairwise_sum(prod);
            wrows[ir] = grid.rweight(ir) * pairwise_sum(jr);
        }
        const double m = pairwise_sum(rows) / pairwise_sum(wrows);
        for (double& v : x.a) v -= m;
    }

    out.P = std::move(x);
    out.residual_norm = rel;
    out.iterations = it;
    finalize_gradients(prob.geom, out);
    return out;
}

void PressureSolver::finalize_gradients(const EllipticGeometry& geom, PressureField& pf) {
    const int d = grid_.d;
    pf.grad_P.assign(d + 1, Field());
    pf.grad_mu_P.assign(d + 1, Field());
    const double smu = std::sqrt(geom.mu);
    for (int c = 0; c < d; ++c) {
        pf.grad_P[c] = grad_phi_x_comp(pf.P, c, geom.ops, ws_level_);
        pf.grad_mu_P[c] = pf.grad_P[c];
        scale(pf.grad_mu_P[c], smu);
    }
    pf.grad_P[d] = dr_phi(pf.P, geom.ops, ws_level_);
    pf.grad_mu_P[d] = pf.grad_P[d];
}

// -- pressure problem of the evolution system ---------------------------------

EllipticProblem assemble_pressure_rhs(const FlowState& state, const StratificationProfile& prof,
                                      const SimParams& params, const Field& b,
                                      PressureSolver& solver) {
    SpectralWorkspace& ws = solver.ws();
    const Grid& grid = ws.grid();
    const int d = grid.d;
    const double eps = params.epsilon;
    const double mu = params.mu;

    EllipticProblem prob;
    prob.geom = make_elliptic_geometry(state.eta, prof.rho_of_r, prof.rho_half, params, mu,
                                       solver.ws(), solver.ws_half());
    const DiffOpSet& ops = prob.geom.ops;
    prob.form = RhsForm::pointwise_form;

    // The quadratic source -(mu/eps) d_i^phi(Ub+eps U)_j d_j^phi(Ub+eps U)_i with
    // the explicit epsilon powers divided out, so eps = 0 is a valid input:
    //   (mu/eps) T = mu [ eps*Q1 + 2 eps*Q2 - 2*Q3 + eps*Q4 ],
    //   Q1 = ((grad_x eta . Vbar')/(1+eps h))^2,
    //   Q2 = (1/(1+eps h)) sum_{i,j<=d} d_i eta Vbar_j' (grad_x^phi V_i)_j,
    //   Q3 = (1/(1+eps h)) sum_{j<=d} Vbar_j' (grad_x^phi w)_j,
    //   Q4 = sum_{i,j<=d+1} d_i^phi U_j d_j^phi U_i.
    Field F(grid.Nr, grid.nx_total());

    // Vbar'-weighted eta gradient, a product with an r-only coefficient
    Field svb(grid.Nr, grid.nx_total());
    for (int c = 0; c < d; ++c)
        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double vp = prof.vbar_prime[c][ir];
            auto sr = svb.row(ir);
            auto gr = ops.grad_eta[c].row(ir);
            for (int ix = 0; ix < grid.nx_total(); ++ix) sr[ix] += vp * gr[ix];
        }

    // curved gradients of the perturbation velocity
    std::vector<std::vector<Field>> gpxV(d); // gpxV[i][j] = (grad_x^phi V_i)_j
    for (int i = 0; i < d; ++i) gpxV[i] = grad_phi_x(state.V[i], ops, ws);
    std::vector<Field> gpxw = grad_phi_x(state.w, ops, ws);

    Field inv_da = ws.dealiased(ops.inv_ope);

    if (eps != 0.0) {
        Field a = ws.masked_product(svb, inv_da);
        Field q1 = ws.masked_product(a, a);
        add_scaled(F, -mu * eps, q1);

        Field acc(grid.Nr, grid.nx_total());
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Field t = ws.masked_product(ops.grad_eta[i], gpxV[i][j]);
                for (int ir = 0; ir < grid.Nr; ++ir) {
                    const double vp = prof.vbar_prime[j][ir];
                    auto ar = acc.row(ir);
                    auto tr = t.row(ir);
                    for (int ix = 0; ix < grid.nx_total(); ++ix) ar[ix] += vp * tr[ix];
                }
            }
        Field q2 = ws.masked_product(acc, inv_da);
        add_scaled(F, -2.0 * mu * eps, q2);
    }

    {
        Field acc(grid.Nr, grid.nx_total());
        for (int j = 0; j < d; ++j)
            for (int ir = 0; ir < grid.Nr; ++ir) {
                const double vp = prof.vbar_prime[j][ir];
                auto ar = acc.row(ir);
                auto gr = gpxw[j].row(ir);
                for (int ix = 0; ix < grid.nx_total(); ++ix) ar[ix] += vp * gr[ix];
            }
        Field q3 = ws.masked_product(acc, inv_da);
        add_scaled(F, 2.0 * mu, q3);
    }

    if (eps != 0.0) {
        // Q4: full perturbation block, D[i][f] with f in {V_0..V_{d-1}, w}
        std::vector<Field> drp(d + 1);
        for (int i = 0; i < d; ++i) drp[i] = ws.dealiased(dr_phi(state.V[i], ops, ws));
        drp[d] = ws.dealiased(dr_phi(state.w, ops, ws));
        auto Dif = [&](int i, int f) -> const Field& {
            // d_i^phi applied to component f of U
            if (i < d) return f < d ? gpxV[f][i] : gpxw[i];
            return drp[f];
        };
        Field q4(grid.Nr, grid.nx_total());
        for (int i = 0; i <= d; ++i)
            for (int j = 0; j <= d; ++j) {
                Field t = ws.masked_product(Dif(i, j), Dif(j, i));
                add_scaled(q4, 1.0, t);
            }
        add_scaled(F, -mu * eps, q4);
    }

    prob.rhs_pointwise = std::move(F);

    // buoyancy in divergence form: G = (0,...,0,-b); its vertical trace is the
    // Neumann data -b at r = 0,1
    prob.rhs_divergence = VecField(grid, d + 1);
    prob.rhs_divergence[d] = b;
    scale(prob.rhs_divergence[d], -1.0);
    prob.neumann_from_divergence = true;
    prob.neumann_top.assign(grid.nx_total(), 0.0);
    prob.neumann_bottom.assign(grid.nx_total(), 0.0);
    for (int ix = 0; ix < grid.nx_total(); ++ix) {
        prob.neumann_top[ix] = -b(0, ix);
        prob.neumann_bottom[ix] = -b(grid.Nr - 1, ix);
    }
    return prob;
}

std::pair<Field, Field> hydrostatic_split(const FlowState& state,
                                          const StratificationProfile& prof,
                                          const SimParams& params, const Field& b,
                                          SpectralWorkspace& ws) {
    const Grid& grid = ws.grid();
    Field Ph(grid.Nr, grid.nx_total());
    const double dr = grid.dr();
    for (int ir = 1; ir < grid.Nr; ++ir) {
        const double r0 = prof.rho_of_r[ir - 1];
        const double r1 = prof.rho_of_r[ir];
        for (int ix = 0; ix < grid.nx_total(); ++ix)
            Ph(ir, ix) = Ph(ir - 1, ix) + 0.5 * dr * (r0 * b(ir - 1, ix) + r1 * b(ir, ix));
    }

    DiffOpSet ops = make_diff_ops(state, params, ws);
    Field drphi_Ph = dr_phi(Ph, ops, ws);
    Field resid(grid.Nr, grid.nx_total());
    const double eps = params.epsilon;
    for (int ir = 0; ir < grid.Nr; ++ir) {
        const double coeff = 1.0 / prof.rho_of_r[ir];
        for (int ix = 0; ix < grid.nx_total(); ++ix) {
            const double jac = ops.one_plus_eh(ir, ix);
            resid(ir, ix) = coeff * drphi_Ph(ir, ix) + b(ir, ix) -
                            eps * (ops.h(ir, ix) / jac) * b(ir, ix);
        }
    }
    return {std::move(Ph), std::move(resid)};
}

LerayResult leray_project(const std::vector<Field>& V, const Field& w, const Field& eta,
                          const SimParams& params, PressureSolver& solver, double tol,
                          const Field* extra_source) {
    SpectralWorkspace& ws = solver.ws();
    const Grid& grid = ws.grid();
    const int d = grid.d;

    EllipticProblem prob;
    std::vector<double> ones_l(grid.Nr, 1.0);
    std::vector<double> ones_h(grid.Nr - 1, 1.0);
    prob.geom =
        make_elliptic_geometry(eta, ones_l, ones_h, params, 1.0, solver.ws(), solver.ws_half());
    prob.form = RhsForm::divergence_form;
    prob.rhs_divergence = VecField(grid, d + 1);
    for (int c = 0; c < d; ++c) prob.rhs_divergence[c] = V[c];
    prob.rhs_divergence[d] = w;
    prob.neumann_from_divergence = false; // BC is dr^phi psi = 0
    if (extra_source) prob.rhs_pointwise = *extra_source;

    auto strong_div = [&](const std::vector<Field>& Vc, const Field& wc) {
        Field div = div_phi_mu(Vc, wc, prob.geom.ops, 1.0, ws);
        if (extra_source) add_scaled(div, 1.0, *extra_source);
        return l2_norm(div, grid);
    };

    LerayResult out;
    out.div_before = strong_div(V, w);
    PressureField pf = solver.solve(prob, tol, 10000, 1e-6);
    out.psi = pf.P;
    out.iterations = pf.iterations;
    out.V = V;
    for (int c = 0; c < d; ++c) add_scaled(out.V[c], -1.0, pf.grad_P[c]);
    out.w = w;
    add_scaled(out.w, -1.0, pf.grad_P[d]);
    out.div_after = strong_div(out.V, out.w);
    return out;
}

} // namespace isopyc

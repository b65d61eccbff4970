#include "isopyc/verify.hpp"

#include "isopyc/bridge.hpp"
#include "isopyc/diagnostics.hpp"
#include "isopyc/dynamics.hpp"
#include "isopyc/errors.hpp"
#include "isopyc/interp.hpp"
#include "isopyc/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>

namespace isopyc {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

Field manufactured_cos(const Grid& g, int k, int n) {
    Field f(g.Nr, g.nx_total());
    for (int ir = 0; ir < g.Nr; ++ir) {
        const double vert = std::cos(n * M_PI * g.r(ir));
        for (int ix = 0; ix < g.nx_total(); ++ix) {
            const int i1 = g.d == 1 ? ix : ix / g.Nx;
            const double x = g.L * i1 / g.Nx;
            f(ir, ix) = std::cos(k * 2.0 * M_PI / g.L * x) * vert;
        }
    }
    return f;
}

Field bump_eta(const Grid& g, double amp) {
    // amp * sin(x) * r(1-r)
    Field f(g.Nr, g.nx_total());
    for (int ir = 0; ir < g.Nr; ++ir) {
        const double r = g.r(ir);
        const double vert = r * (1.0 - r);
        for (int ix = 0; ix < g.nx_total(); ++ix) {
            const int i1 = g.d == 1 ? ix : ix / g.Nx;
            const double x = g.L * i1 / g.Nx;
            f(ir, ix) = amp * std::sin(2.0 * M_PI / g.L * x) * vert;
        }
    }
    return f;
}

double fit_loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
    std::vector<double> lh(h.size()), le(err.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        lh[i] = std::log(h[i]);
        le[i] = std::log(std::max(err[i], 1e-300));
    }
    return lsq_slope(lh, le);
}

// frequency of a series c0 + c1 cos(om t) + c2 sin(om t): scan + refine on the
// linear-LSQ residual
double fit_oscillation_frequency(const std::vector<double>& t, const std::vector<double>& y,
                                 double om_lo, double om_hi) {
    auto residual = [&](double om) {
        double a11 = static_cast<double>(t.size()), a12 = 0, a13 = 0, a22 = 0, a23 = 0, a33 = 0;
        double b1 = 0, b2 = 0, b3 = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double c = std::cos(om * t[i]);
            const double s = std::sin(om * t[i]);
            a12 += c;
            a13 += s;
            a22 += c * c;
            a23 += c * s;
            a33 += s * s;
            b1 += y[i];
            b2 += y[i] * c;
            b3 += y[i] * s;
        }
        // solve the 3x3 normal equations by Cramer
        const double det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
                           a13 * (a12 * a23 - a22 * a13);
        if (std::abs(det) < 1e-30) return 1e300;
        const double c0 = (b1 * (a22 * a33 - a23 * a23) - a12 * (b2 * a33 - a23 * b3) +
                           a13 * (b2 * a23 - a22 * b3)) /
                          det;
        const double c1 = (a11 * (b2 * a33 - b3 * a23) - b1 * (a12 * a33 - a23 * a13) +
                           a13 * (a12 * b3 - b2 * a13)) /
                          det;
        const double c2 = (a11 * (a22 * b3 - a23 * b2) - a12 * (a12 * b3 - b2 * a13) +
                           b1 * (a12 * a23 - a22 * a13)) /
                          det;
        double r = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double m = c0 + c1 * std::cos(om * t[i]) + c2 * std::sin(om * t[i]);
            r += (y[i] - m) * (y[i] - m);
        }
        return r;
    };
    // coarse scan
    double best = om_lo, best_r = 1e301;
    const int nscan = 400;
    for (int i = 0; i <= nscan; ++i) {
        const double om = om_lo + (om_hi - om_lo) * i / nscan;
        const double r = residual(om);
        if (r < best_r) {
            best_r = r;
            best = om;
        }
    }
    // golden-section refine
    double a = std::max(om_lo, best - (om_hi - om_lo) / nscan);
    double b = std::min(om_hi, best + (om_hi - om_lo) / nscan);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = residual(x1), f2 = residual(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = residual(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = residual(x2);
        }
    }
    return 0.5 * (a + b);
}

// ----------------------------------------------------------------------------
// criterion 1: elliptic manufactured solution
// ----------------------------------------------------------------------------

SuiteReport criterion_elliptic_manufactured(const RunConfig& cfg) {
    SuiteReport rep{"elliptic.manufactured", {}};
    const std::vector<int> nrs = {17, 33, 65};
    for (double mu : {1.0, 0.25}) {
        std::vector<double> hs, errs;
        double horiz_err = 0.0;
        for (int Nr : nrs) {
            Grid g(cfg.grid.d, cfg.grid.Nx, cfg.grid.L, Nr);
            SimParams par = cfg.params;
            par.epsilon = 0.0;
            par.mu = mu;
            PressureSolver solver(g, cfg.threads);
            Field eta = Field::zeros(g);
            std::vector<double> ones_l(g.Nr, 1.0), ones_h(g.Nr - 1, 1.0);
            EllipticProblem prob;
            prob.geom = make_elliptic_geometry(eta, ones_l, ones_h, par, mu, solver.ws(),
                                               solver.ws_half());
            prob.form = RhsForm::pointwise_form;
            Field Pstar = manufactured_cos(g, 1, 1);
            prob.rhs_pointwise = Pstar;
            scale(prob.rhs_pointwise, -(mu + M_PI * M_PI));
            prob.neumann_top.assign(g.nx_total(), 0.0);
            prob.neumann_bottom.assign(g.nx_total(), 0.0);
            PressureField pf = solver.solve(prob, 1e-13, 2000);
            Field diff = difference(pf.P, Pstar);
            errs.push_back(l2_norm(diff, g));
            hs.push_back(g.dr());
            Field off = difference(pf.P, solver.ws().keep_single_mode(pf.P, 1));
            horiz_err = std::max(horiz_err, l2_norm(off, g));
        }
        const double slope = fit_loglog_slope(hs, errs);
        rep.checks.push_back({"manufactured slope (mu=" + fmt(mu) + ")",
                              std::abs(slope - 2.0) <= 0.2, slope, 2.0,
                              "errors " + fmt(errs[0]) + ", " + fmt(errs[1]) + ", " +
                                  fmt(errs[2])});
        rep.checks.push_back({"horizontal error (mu=" + fmt(mu) + ")", horiz_err <= 1e-10,
                              horiz_err, 1e-10, ""});
    }
    return rep;
}

// ----------------------------------------------------------------------------
// criterion 2: variable-coefficient robustness (preconditioner mesh independence)
// ----------------------------------------------------------------------------

SuiteReport criterion_elliptic_robustness(const RunConfig& cfg) {
    SuiteReport rep{"elliptic.robustness", {}};
    for (double mu : {1.0, 0.25}) {
        int worst_iters = 0;
        for (int Nr : {17, 33, 65}) {
            Grid g(cfg.grid.d, cfg.grid.Nx, cfg.grid.L, Nr);
            SimParams par = cfg.params;
            par.epsilon = 0.2;
            par.mu = mu;
            StratificationProfile prof = make_profile_exp(g, par);
            PressureSolver solver(g, cfg.threads);
            Field eta = bump_eta(g, 0.5);
            EllipticProblem prob;
            prob.geom = make_elliptic_geometry(eta, prof.rho_of_r, prof.rho_half, par, mu,
                                               solver.ws(), solver.ws_half());
            prob.form = RhsForm::divergence_form;
            prob.rhs_divergence = VecField(g, g.d + 1);
            prob.rhs_divergence[0] = manufactured_cos(g, 2, 1);
            prob.rhs_divergence[g.d] = manufactured_cos(g, 1, 2);
            prob.neumann_from_divergence = true;
            PressureField pf = solver.solve(prob, 1e-10, 500);
            worst_iters = std::max(worst_iters, pf.iterations);
        }
        rep.checks.push_back({"CG iterations to 1e-10 (mu=" + fmt(mu) + ")", worst_iters <= 60,
                              static_cast<double>(worst_iters), 60.0, ""});
    }
    return rep;
}

// ----------------------------------------------------------------------------
// criterion 3: hydrostatic identity
// ----------------------------------------------------------------------------

SuiteReport criterion_hydrostatic(const RunConfig& cfg) {
    SuiteReport rep{"identities.hydrostatic", {}};
    std::vector<double> hs, errs;
    bool scaled_ok = true;
    double worst_ratio = 0.0;
    for (int Nr : {17, 33, 65}) {
        Grid g(cfg.grid.d, cfg.grid.Nx, cfg.grid.L, Nr);
        SimParams par = cfg.params;
        par.epsilon = 0.2;
        StratificationProfile prof = make_profile_exp(g, par);
        SpectralWorkspace ws(g);
        FlowState st = FlowState::equilibrium(g);
        st.set_eta(bump_eta(g, 0.5), g);
        Field b = buoyancy(st, prof, par);
        auto [Ph, resid] = hydrostatic_split(st, prof, par, b, ws);
        double scale_rb = 0.0;
        for (int ir = 0; ir < g.Nr; ++ir)
            for (int ix = 0; ix < g.nx_total(); ++ix)
                scale_rb = std::max(scale_rb, std::abs(prof.rho_of_r[ir] * b(ir, ix)));
        const double m = resid.max_abs();
        hs.push_back(g.dr());
        errs.push_back(m);
        const double bound = 5.0 * g.dr() * g.dr() * scale_rb;
        worst_ratio = std::max(worst_ratio, m / bound);
        if (m > bound) scaled_ok = false;
    }
    const double slope = fit_loglog_slope(hs, errs);
    rep.checks.push_back({"hydrostatic residual <= 5 dr^2 scale", scaled_ok, worst_ratio, 1.0,
                          "max residual / bound over resolutions"});
    rep.checks.push_back({"hydrostatic refinement slope", std::abs(slope - 2.0) <= 0.2, slope,
                          2.0, ""});
    return rep;
}

// ----------------------------------------------------------------------------
// criterion 4: Alinhac commutation identity
// ----------------------------------------------------------------------------

SuiteReport criterion_alinhac(const RunConfig& cfg) {
    SuiteReport rep{"identities.alinhac", {}};
    const int s = 3;
    const std::vector<OperatorLabel> ops = {OperatorLabel::lam_dr(s, 1), OperatorLabel::dsq_lam(s)};
    for (const OperatorLabel& op : ops) {
        std::vector<double> hs, errs;
        for (int Nr : {17, 33, 65}) {
            Grid g(cfg.grid.d, cfg.grid.Nx, cfg.grid.L, Nr);
            SimParams par = cfg.params;
            par.epsilon = 0.1;
            SpectralWorkspace ws(g);
            FlowState st = FlowState::equilibrium(g);
            st.set_eta(bump_eta(g, 0.5), g);
            Field f = manufactured_cos(g, 1, 1);
            Field f2 = bump_eta(g, 0.3);
            add_scaled(f, 1.0, f2);
            errs.push_back(alinhac_commutation_residual(f, st, par, op, ws));
            hs.push_back(g.dr());
        }
        const double slope = fit_loglog_slope(hs, errs);
        rep.checks.push_back({"commutation slope (" + op.name() + ")",
                              std::abs(slope - 2.0) <= 0.3, slope, 2.0,
                              "residuals " + fmt(errs[0]) + ", " + fmt(errs[1]) + ", " +
                                  fmt(errs[2])});
    }
    // flat geometry: residual at rounding level
    {
        Grid g(cfg.grid.d, cfg.grid.Nx, cfg.grid.L, 33);
        SimParams par = cfg.params;
        par.epsilon = 0.1;
        SpectralWorkspace ws(g);
        FlowState st = FlowState::equilibrium(g);
        Field f = manufactured_cos(g, 2, 2);
        double worst = 0.0;
        for (const OperatorLabel& op : ops)
            worst = std::max(worst, alinhac_commutation_residual(f, st, par, op, ws));
        rep.checks.push_back({"flat-geometry residual", worst <= 1e-12, worst, 1e-12, ""});
    }
    return rep;
}

// ----------------------------------------------------------------------------
// criterion 5: internal-wave dispersion
// ----------------------------------------------------------------------------

struct WaveCase {
    int k, n;
    double mu;
};

CheckResult dispersion_case(const RunConfig& base, const WaveCase& wc) {
    Grid g(1, base.grid.Nx, base.grid.L, base.grid.Nr);
    SimParams par = base.params;
    par.epsilon = 1e-6;
    par.mu = wc.mu;
    par.dt = 1e-3;
    par.t_end = 20.0;
    StratificationProfile prof = make_profile_boussinesq(g, par, 1.0);
    PressureSolver solver(g, 1);
    RunConfig icfg = base;
    icfg.grid = g;
    icfg.params = par;
    icfg.init_kind = "single_mode";
    icfg.init_amplitude = 0.01;
    icfg.init_k = wc.k;
    icfg.init_n = wc.n;
    FlowState st = build_initial_state(icfg, prof, solver);

    const double xi = wc.k * 2.0 * M_PI / g.L;
    const double om2_theory = xi * xi / (wc.mu * xi * xi + wc.n * wc.n * M_PI * M_PI);
    const double om_theory = std::sqrt(om2_theory);

    // sample the squared eta-amplitude (the eta component of the energy, up
    // to its constant weight) every 10 steps
    std::vector<double> ts, ys;
    const int stride = 10;
    const int nsteps = static_cast<int>(std::llround(par.t_end / par.dt));
    for (int it = 0; it < nsteps; ++it) {
        st = step(st, prof, par, solver);
        if (it % stride == 0) {
            ts.push_back(st.t);
            ys.push_back(l2_inner(st.eta, st.eta, g));
        }
    }
    // the energy component oscillates at 2*omega
    const double om_fit =
        0.5 * fit_oscillation_frequency(ts, ys, 2.0 * 0.5 * om_theory, 2.0 * 1.5 * om_theory);
    const double rel = std::abs(om_fit * om_fit - om2_theory) / om2_theory;
    char nm[96];
    std::snprintf(nm, sizeof(nm), "dispersion (k=%d,n=%d,mu=%g)", wc.k, wc.n, wc.mu);
    return {nm, rel <= 0.01, rel, 0.01,
            "omega fit " + fmt(om_fit) + " vs " + fmt(om_theory)};
}

SuiteReport criterion_dispersion(const RunConfig& cfg) {
    SuiteReport rep{"waves.dispersion", {}};
    std::vector<WaveCase> cases;
    for (double mu : {1.0, 0.25})
        for (auto [k, n] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}})
            cases.push_back({k, n, mu});
    std::vector<std::future<CheckResult>> futs;
    futs.reserve(cases.size());
    for (const auto& wc : cases)
        futs.push_back(std::async(std::launch::async, dispersion_case, cfg, wc));
    for (auto& f : futs) rep.checks.push_back(f.get());
    return rep;
}

// ----------------------------------------------------------------------------
// criterion 6: equilibrium fixed point
// ----------------------------------------------------------------------------

SuiteReport criterion_equilibrium(const RunConfig& cfg) {
    SuiteReport rep{"divergence.equilibrium", {}};
    for (double eps : {0.0, 0.1, 0.3}) {
        for (double mu : {1.0, 0.25, 0.04}) {
            Grid g(1, cfg.grid.Nx, cfg.grid.L, cfg.grid.Nr);
            SimParams par = cfg.params;
            par.epsilon = eps;
            par.mu = mu;
            par.dt = 0.02;
            VbarSpec vb{"linear", 0.9 * std::sqrt(mu)};
            StratificationProfile prof = make_profile_exp(g, par, 1.0, 1.0, vb);
            PressureSolver solver(g, 1);
            FlowState st = FlowState::equilibrium(g);
            for (int it = 0; it < 1000; ++it) st = step(st, prof, par, solver);
            double amp = 0.0;
            for (int c = 0; c < g.d; ++c) amp = std::max(amp, st.V[c].max_abs());
            amp = std::max({amp, st.w.max_abs(), st.eta.max_abs()});
            char nm[80];
            std::snprintf(nm, sizeof(nm), "equilibrium drift (eps=%g,mu=%g)", eps, mu);
            rep.checks.push_back({nm, amp <= 1e-10, amp, 1e-10, "1000 steps"});
        }
    }
    return rep;
}

// ----------------------------------------------------------------------------
// criterion 7: divergence-free propagation
// ----------------------------------------------------------------------------

SuiteReport criterion_divergence(const RunConfig& cfg) {
    SuiteReport rep{"divergence.propagation", {}};
    struct Res {
        int Nx, Nr;
        double dt;
    };
    for (const Res& res : {Res{32, 17, 0.02}, Res{64, 33, 0.01}}) {
        Grid g(1, res.Nx, cfg.grid.L, res.Nr);
        SimParams par = cfg.params;
        par.epsilon = 0.1;
        par.mu = 0.25;
        par.dt = res.dt;
        VbarSpec vb{"linear", 0.4};
        StratificationProfile prof = make_profile_exp(g, par, 1.0, 1.0, vb);
        PressureSolver solver(g, 1);
        RunConfig icfg = cfg;
        icfg.grid = g;
        icfg.params = par;
        icfg.init_kind = "random";
        icfg.init_amplitude = 0.05;
        icfg.init_seed = 11;
        FlowState st = build_initial_state(icfg, prof, solver);
        const double div0 = l2_norm(full_divergence(st, prof, par, solver.ws()), g);
        double div_max = div0;
        const int nsteps = static_cast<int>(std::llround(1.0 / par.dt));
        for (int it = 0; it < nsteps; ++it) {
            st = step(st, prof, par, solver);
            div_max =
                std::max(div_max, l2_norm(full_divergence(st, prof, par, solver.ws()), g));
        }
        const double bound = 10.0 * (div0 + 1e-8);
        char nm[80];
        std::snprintf(nm, sizeof(nm), "div growth (Nx=%d,Nr=%d)", res.Nx, res.Nr);
        rep.checks.push_back({nm, div_max <= bound, div_max, bound,
                              "div(0) = " + fmt(div0) + ", max div(t<=1) = " + fmt(div_max)});
    }
    return rep;
}

// ----------------------------------------------------------------------------
// criterion 8: energy growth-rate trend over the (eps/sqrt(mu), |Vbar'|/sqrt(mu)) sweep
// ----------------------------------------------------------------------------

double sweep_rate(const RunConfig& base, double a, double bshear) {
    const double mu = 0.25;
    const double smu = std::sqrt(mu);
    Grid g(1, base.grid.Nx, base.grid.L, base.grid.Nr);
    SimParams par = base.params;
    par.epsilon = a * smu;
    par.mu = mu;
    par.dt = 0.01;
    VbarSpec vb{"linear", bshear * smu};
    StratificationProfile prof = make_profile_exp(g, par, 1.0, 1.0, vb);
    PressureSolver solver(g, 1);
    RunConfig icfg = base;
    icfg.grid = g;
    icfg.params = par;
    icfg.init_kind = "random";
    icfg.init_amplitude = 0.05;
    icfg.init_seed = 7;
    FlowState st = build_initial_state(icfg, prof, solver);
    std::vector<double> ts, Es;
    const double t_end = 5.0;
    const int stride = 10;
    const int nsteps = static_cast<int>(std::llround(t_end / par.dt));
    for (int it = 0; it < nsteps; ++it) {
        st = step(st, prof, par, solver);
        if (it % stride == 0) {
            EnergyReport er = energy(st, prof, par, solver.ws());
            ts.push_back(st.t);
            Es.push_back(er.E);
        }
    }
    return growth_rate_fit(ts, Es);
}

SuiteReport criterion_sweep(const RunConfig& cfg) {
    SuiteReport rep{"sweep.growth", {}};
    const std::vector<double> axis = {0.0, 0.5, 1.0};
    std::vector<double> rates, as, bs;
    std::vector<std::future<double>> futs;
    for (double a : axis)
        for (double b : axis) {
            as.push_back(a);
            bs.push_back(b);
            futs.push_back(std::async(std::launch::async, sweep_rate, cfg, a, b));
        }
    for (auto& f : futs) rates.push_back(f.get());
    const double rho_a = spearman_rho(rates, as);
    const double rho_b = spearman_rho(rates, bs);
    std::string detail = "rates:";
    for (double r : rates) detail += " " + fmt(r);
    rep.checks.push_back(
        {"growth trend vs eps/sqrt(mu)", rho_a >= 0.8, rho_a, 0.8, detail});
    rep.checks.push_back({"growth trend vs |Vbar'|/sqrt(mu)", rho_b >= 0.8, rho_b, 0.8, ""});
    return rep;
}

// ----------------------------------------------------------------------------
// criterion 9: Eulerian bridge round trip
// ----------------------------------------------------------------------------

SuiteReport criterion_bridge(const RunConfig& cfg) {
    SuiteReport rep{"bridge.roundtrip", {}};
    std::vector<double> hs, errs;
    for (int Nr : {33, 65, 129}) {
        Grid g(1, cfg.grid.Nx, cfg.grid.L, Nr);
        SimParams par = cfg.params;
        par.epsilon = 0.1;
        StratificationProfile prof = make_profile_exp(g, par, 1.0, 1.0, VbarSpec{"cos", 0.1});
        FlowState st = FlowState::equilibrium(g);
        {
            Field eta(g.Nr, g.nx_total());
            Field w(g.Nr, g.nx_total());
            Field V(g.Nr, g.nx_total());
            for (int ir = 0; ir < g.Nr; ++ir) {
                const double r = g.r(ir);
                const double sv = std::sin(M_PI * r);
                const double pv = r * r * (1.0 - r) * (1.0 - r);
                for (int ix = 0; ix < g.nx_total(); ++ix) {
                    const double x = g.L * ix / g.Nx;
                    eta(ir, ix) = 0.2 * std::sin(x) * sv;
                    w(ir, ix) = 0.1 * std::cos(x) * sv;
                    V(ir, ix) = std::cos(x) * (pv + 0.2);
                }
            }
            st.V[0] = V;
            st.w = w;
            st.set_eta(eta, g);
        }
        EulerianState eul = to_eulerian(st, prof, par, Nr);
        FlowState back = from_eulerian(eul, prof, par, g);
        double num = 0.0, den = 0.0;
        auto acc = [&](const Field& a, const Field& b) {
            Field dfd = difference(a, b);
            const double na = l2_norm(dfd, g);
            const double nb = l2_norm(b, g);
            num += na * na;
            den += nb * nb;
        };
        acc(back.V[0], st.V[0]);
        acc(back.w, st.w);
        acc(back.eta, st.eta);
        const double rel = std::sqrt(num / den);
        hs.push_back(g.dr());
        errs.push_back(rel);
        if (Nr == 129)
            rep.checks.push_back(
                {"round-trip relative L2 (Nr=Nz=129)", rel <= 1e-6, rel, 1e-6, ""});
    }
    const double slope = fit_loglog_slope(hs, errs);
    rep.checks.push_back({"round-trip contraction slope", slope >= 2.5, slope, 2.5,
                          "errors " + fmt(errs[0]) + ", " + fmt(errs[1]) + ", " + fmt(errs[2])});
    return rep;
}

// ----------------------------------------------------------------------------
// criterion 10: energy equivalence bracket
// ----------------------------------------------------------------------------

SuiteReport criterion_energy_bracket(const RunConfig& cfg) {
    SuiteReport rep{"energy.bracket", {}};
    Grid g(1, 32, cfg.grid.L, 17);
    SimParams par = cfg.params;
    par.epsilon = 0.0;
    par.mu = 0.25;
    par.s_diag = 3;
    par.k_diag = 3;
    StratificationProfile prof = make_profile_linear(g, par, 1.0, 1.0);
    SpectralWorkspace ws(g);
    int failures = 0;
    double worst_margin = 1e300;
    for (unsigned seed = 1; seed <= 100; ++seed) {
        RunConfig icfg = cfg;
        icfg.grid = g;
        icfg.params = par;
        icfg.init_kind = "random";
        icfg.init_amplitude = 0.1 + 0.01 * (seed % 7);
        icfg.init_seed = seed;
        RawInit raw = raw_initial_fields(icfg);
        FlowState st = FlowState::equilibrium(g);
        st.V = raw.V;
        st.w = raw.w;
        st.set_eta(raw.eta, g);
        EquivalenceCheck ec = energy_equivalence_check(st, prof, par, ws);
        if (ec.degenerate) continue;
        if (!ec.within) ++failures;
        worst_margin = std::min({worst_margin, ec.ratio - ec.lower, ec.upper - ec.ratio});
    }
    rep.checks.push_back({"bracket failures over 100 random states", failures == 0,
                          static_cast<double>(failures), 0.0,
                          "worst margin " + fmt(worst_margin)});
    return rep;
}

// ----------------------------------------------------------------------------
// criterion 11: blow-up detection through the min-jacobian channel
// ----------------------------------------------------------------------------

SuiteReport criterion_blowup(const RunConfig& cfg) {
    SuiteReport rep{"energy.blowup", {}};
    RunConfig rcfg = cfg;
    rcfg.grid = Grid(1, 64, cfg.grid.L, 33);
    rcfg.params.epsilon = 0.5;
    rcfg.params.mu = 1.0;
    rcfg.params.dt = 0.01;
    rcfg.params.t_end = 20.0;
    rcfg.params.h_star = 0.25;
    rcfg.params.cfl = 2.0; // generous: the compressive speed is order one
    rcfg.profile_name = "exp";
    rcfg.init_kind = "steepening";
    rcfg.init_amplitude = 1.0;
    rcfg.init_k = 1;
    rcfg.output_dir = (std::filesystem::temp_directory_path() / "isopyc_blowup").string();
    std::ostringstream log;
    const int code = run_simulation(rcfg, log);
    rep.checks.push_back({"blow-up exit code", code == 3, static_cast<double>(code), 3.0,
                          "run log tail: " + log.str().substr(log.str().size() > 160
                                                                  ? log.str().size() - 160
                                                                  : 0)});
    // last CSV row: blown up via the jacobian channel with finite fields
    std::ifstream csv(rcfg.output_dir + "/energy.csv");
    std::string line, last;
    std::getline(csv, line); // header
    bool finite_all = true;
    double last_minjac = 1.0;
    std::string last_status;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        last = line;
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (cols.size() == 7) {
            for (int c = 0; c < 6; ++c)
                if (cols[c] == "nan" || cols[c] == "-nan" || cols[c] == "inf") finite_all = false;
            last_minjac = std::stod(cols[4]);
            last_status = cols[6];
        }
    }
    rep.checks.push_back({"min-jacobian channel fired", last_status == "BlownUp" &&
                              last_minjac < rcfg.params.h_star,
                          last_minjac, rcfg.params.h_star, "status " + last_status});
    rep.checks.push_back({"fields finite at detection", finite_all, finite_all ? 1.0 : 0.0, 1.0,
                          ""});
    return rep;
}

} // namespace

std::vector<std::string> known_suites() {
    return {"elliptic", "identities", "waves", "divergence", "sweep", "bridge", "energy"};
}

SuiteReport run_criterion(int k, const RunConfig& cfg) {
    switch (k) {
    case 1: return criterion_elliptic_manufactured(cfg);
    case 2: return criterion_elliptic_robustness(cfg);
    case 3: return criterion_hydrostatic(cfg);
    case 4: return criterion_alinhac(cfg);
    case 5: return criterion_dispersion(cfg);
    case 6: return criterion_equilibrium(cfg);
    case 7: return criterion_divergence(cfg);
    case 8: return criterion_sweep(cfg);
    case 9: return criterion_bridge(cfg);
    case 10: return criterion_energy_bracket(cfg);
    case 11: return criterion_blowup(cfg);
    default: throw ConfigError("unknown acceptance criterion: " + std::to_string(k));
    }
}

SuiteReport run_suite(const std::string& name, const RunConfig& cfg) {
    auto merge = [&](std::initializer_list<int> ks) {
        SuiteReport rep{name, {}};
        for (int k : ks) {
            SuiteReport r = run_criterion(k, cfg);
            for (auto& c : r.checks) rep.checks.push_back(std::move(c));
        }
        return rep;
    };
    if (name == "elliptic") return merge({1, 2});
    if (name == "identities") return merge({3, 4});
    if (name == "waves") return merge({5});
    if (name == "divergence") return merge({6, 7});
    if (name == "sweep") return merge({8});
    if (name == "bridge") return merge({9});
    if (name == "energy") return merge({10, 11});
    throw ConfigError("unknown verify suite: " + name);
}

} // namespace isopyc

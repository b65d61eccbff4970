#include "isopyc/run.hpp"

#include "isopyc/diagnostics.hpp"
#include "isopyc/dynamics.hpp"
#include "isopyc/errors.hpp"
#include "isopyc/snapshot.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

namespace isopyc {

namespace {

void add_mode(Field& f, const Grid& g, double amp, int k, int n, double phase, bool sin_vert) {
    // amp * cos(k x1 + phase) * vertical(n pi r); d=2 modulates x2 with the same k
    for (int ir = 0; ir < g.Nr; ++ir) {
        const double r = g.r(ir);
        const double vert = sin_vert ? std::sin(n * M_PI * r) : std::cos(n * M_PI * r);
        for (int ix = 0; ix < g.nx_total(); ++ix) {
            const int i1 = g.d == 1 ? ix : ix / g.Nx;
            const int i2 = g.d == 1 ? 0 : ix % g.Nx;
            const double x1 = g.L * i1 / g.Nx;
            const double x2 = g.L * i2 / g.Nx;
            double val = std::cos(k * 2.0 * M_PI / g.L * x1 + phase);
            if (g.d == 2) val *= std::cos(k * 2.0 * M_PI / g.L * x2 + 0.5 * phase);
            f(ir, ix) += amp * val * vert;
        }
    }
}

} // namespace

RawInit raw_initial_fields(const RunConfig& cfg) {
    const Grid& g = cfg.grid;
    RawInit raw;
    raw.V.assign(g.d, Field::zeros(g));
    raw.w = Field::zeros(g);
    raw.eta = Field::zeros(g);

    if (cfg.init_kind == "equilibrium") return raw;

    if (cfg.init_kind == "single_mode") {
        add_mode(raw.eta, g, cfg.init_amplitude, cfg.init_k, cfg.init_n, 0.0, true);
        return raw;
    }
    if (cfg.init_kind == "steepening") {
        // compressive horizontal velocity over a gently displaced state
        add_mode(raw.eta, g, 0.25 * cfg.init_amplitude, cfg.init_k, 1, 0.3, true);
        for (int ir = 0; ir < g.Nr; ++ir)
            for (int ix = 0; ix < g.nx_total(); ++ix) {
                const int i1 = g.d == 1 ? ix : ix / g.Nx;
                const double x1 = g.L * i1 / g.Nx;
                raw.V[0](ir, ix) += cfg.init_amplitude * std::sin(2.0 * M_PI / g.L * x1);
            }
        return raw;
    }
    if (cfg.init_kind == "random") {
        std::mt19937 rng(cfg.init_seed);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const int kmax = 3;
        const int nmax = 3;
        for (int k = 1; k <= kmax; ++k)
            for (int n = 1; n <= nmax; ++n) {
                const double decay = 1.0 / (1.0 + k * k + n * n);
                for (int c = 0; c < g.d; ++c)
                    add_mode(raw.V[c], g, cfg.init_amplitude * decay * unit(rng), k, n,
                             phase(rng), false);
                add_mode(raw.w, g, cfg.init_amplitude * decay * unit(rng), k, n, phase(rng),
                         true);
                add_mode(raw.eta, g, cfg.init_amplitude * decay * unit(rng), k, n, phase(rng),
                         true);
            }
        return raw;
    }
    throw ConfigError("unknown init.kind: " + cfg.init_kind);
}

FlowState build_initial_state(const RunConfig& cfg, const StratificationProfile& prof,
                              PressureSolver& solver) {
    RawInit raw = raw_initial_fields(cfg);
    return prepare_initial_data(raw.V, raw.w, raw.eta, prof, cfg.params, solver);
}

namespace {

void csv_row(std::ofstream& csv, double t, const EnergyReport& rep, HealthStatus status) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", t, rep.E0, rep.E,
                  rep.div_residual, rep.min_jacobian, rep.mh_margin, to_string(status));
    csv << buf;
}

void write_state_snapshot(const std::string& path, const FlowState& state, const RunConfig& cfg) {
    Snapshot s;
    s.Nx = static_cast<uint32_t>(cfg.grid.Nx);
    s.Nvert = static_cast<uint32_t>(cfg.grid.Nr);
    s.L = cfg.grid.L;
    s.d = static_cast<uint32_t>(cfg.grid.d);
    s.eps = cfg.params.epsilon;
    s.mu = cfg.params.mu;
    s.t = state.t;
    s.coord = CoordTag::iso;
    for (int c = 0; c < cfg.grid.d; ++c)
        s.fields.emplace_back("V" + std::to_string(c), state.V[c]);
    s.fields.emplace_back("w", state.w);
    s.fields.emplace_back("eta", state.eta);
    write_snapshot(path, s);
}

} // namespace

int run_simulation(const RunConfig& cfg, std::ostream& log) {
    try {
        std::vector<std::string> warnings;
        cfg.grid.validate();
        cfg.params.validate(&warnings);
        StratificationProfile prof = cfg.build_profile_from_config();
        if (prof.vbar_prime_sup() > std::sqrt(cfg.params.mu))
            warnings.push_back("sup|Vbar'| > sqrt(mu): outside the small-shear regime");
        for (const auto& wmsg : warnings) log << "warning: " << wmsg << "\n";

        std::filesystem::create_directories(cfg.output_dir);
        std::ofstream csv(cfg.output_dir + "/energy.csv", std::ios::trunc);
        if (!csv) throw IOFailure("cannot open " + cfg.output_dir + "/energy.csv");
        csv << "t,E0,E,div_residual,min_jacobian,mh_margin,status\n";

        PressureSolver solver(cfg.grid, cfg.threads);
        FlowState state = build_initial_state(cfg, prof, solver);

        SpectralWorkspace& ws = solver.ws();
        EnergyReport rep = energy(state, prof, cfg.params, ws);
        MonitorResult mon = blowup_monitor(state, cfg.params, ws);
        csv_row(csv, state.t, rep, mon.status);

        double next_series = cfg.series_every > 0.0 ? cfg.series_every : 0.0;
        double next_snap = cfg.snapshot_every > 0.0 ? cfg.snapshot_every : -1.0;
        int snap_index = 0;
        const double t_end = cfg.params.t_end;
        bool blew_up = false;

        while (state.t < t_end - 1e-12) {
            const double dt = std::min(cfg.params.dt, t_end - state.t);
            try {
                state = step(state, prof, cfg.params, solver, dt);
            } catch (const JacobianDegenerate& e) {
                log << "blow-up (jacobian degenerate during step) at t = " << state.t << ": "
                    << e.what() << "\n";
                blew_up = true;
            } catch (const BlownUpError& e) {
                log << "blow-up at t = " << state.t << ": " << e.what() << "\n";
                blew_up = true;
            }
            if (!blew_up) {
                mon = blowup_monitor(state, cfg.params, ws);
                blew_up = mon.status == HealthStatus::BlownUp;
            } else {
                mon.status = HealthStatus::BlownUp;
            }
            const bool emit = blew_up || cfg.series_every <= 0.0 ||
                              state.t + 1e-12 >= next_series || state.t >= t_end - 1e-12;
            if (emit) {
                rep = energy(state, prof, cfg.params, ws);
                if (blew_up) rep.blown_up = true;
                csv_row(csv, state.t, rep, mon.status);
                while (cfg.series_every > 0.0 && next_series <= state.t + 1e-12)
                    next_series += cfg.series_every;
            }
            if (next_snap >= 0.0 && state.t + 1e-12 >= next_snap) {
                char name[64];
                std::snprintf(name, sizeof(name), "/snapshot_%06d.isopyc", snap_index++);
                write_state_snapshot(cfg.output_dir + name, state, cfg);
                next_snap += cfg.snapshot_every;
            }
            if (blew_up) {
                write_state_snapshot(cfg.output_dir + "/snapshot_final.isopyc", state, cfg);
                log << "run halted by blow-up monitor at t = " << state.t
                    << " (min_jacobian = " << mon.min_jacobian << ")\n";
                return 3;
            }
        }
        write_state_snapshot(cfg.output_dir + "/snapshot_final.isopyc", state, cfg);
        log << "run completed at t = " << state.t << ", E = " << rep.E << "\n";
        return 0;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return 1;
    } catch (const CFLViolation& e) {
        log << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        log << "solver failure: " << e.what() << "\n";
        return 2;
    }
}

} // namespace isopyc

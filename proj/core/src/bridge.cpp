#include "isopyc/bridge.hpp"

#include "isopyc/errors.hpp"
#include "isopyc/interp.hpp"

#include <algorithm>
#include <cmath>

namespace isopyc {

namespace {
constexpr double kTaylorSwitch = 1e-6; ///< below this, eps-differences switch to Taylor form
}

Field eta_to_z(const FlowState& state, const SimParams& params, const Grid& grid) {
    Field z(grid.Nr, grid.nx_total());
    const double eps = params.epsilon;
    for (int ir = 0; ir < grid.Nr; ++ir) {
        const double r = grid.r(ir);
        auto zr = z.row(ir);
        auto er = state.eta.row(ir);
        for (int ix = 0; ix < grid.nx_total(); ++ix) zr[ix] = -r + eps * er[ix];
    }
    // strict monotonicity in r = nondegenerate Jacobian
    if (state.min_jacobian(eps) <= 0.0)
        throw JacobianDegenerate("eta_to_z: coordinate map not strictly decreasing");
    return z;
}

EulerianState to_eulerian(const FlowState& state, const StratificationProfile& prof,
                          const SimParams& params, int Nz) {
    const Grid& grid = prof.grid;
    const double eps = params.epsilon;
    if (state.min_jacobian(eps) < params.h_star)
        throw JacobianDegenerate("to_eulerian: min(1+eps h) below h_star");

    EulerianState out;
    out.d = grid.d;
    out.Nx = grid.Nx;
    out.L = grid.L;
    out.Nz = Nz;
    out.t = state.t;
    out.z.resize(Nz);
    const double dz = 1.0 / (Nz - 1);
    for (int j = 0; j < Nz; ++j) out.z[j] = -1.0 + j * dz;
    const int nx = grid.nx_total();
    out.V.assign(grid.d, Field(Nz, nx));
    out.w = Field(Nz, nx);
    out.rho = Field(Nz, nx);

    std::vector<double> rlev(grid.Nr);
    for (int i = 0; i < grid.Nr; ++i) rlev[i] = grid.r(i);

    std::vector<double> zcol(grid.Nr), rrev(grid.Nr), col(grid.Nr);
    for (int ix = 0; ix < nx; ++ix) {
        // column map, reordered ascending in z (descending in r)
        for (int i = 0; i < grid.Nr; ++i) {
            const int k = grid.Nr - 1 - i;
            zcol[i] = -rlev[k] + eps * state.eta(k, ix);
            rrev[i] = rlev[k];
        }
        const Pchip r_of_z(zcol, rrev);
        if (out.z.front() < zcol.front() - 1e-12 || out.z.back() > zcol.back() + 1e-12)
            throw InterpolationDomain("to_eulerian: z-grid escapes the column range");

        std::vector<Pchip> field_i;
        field_i.reserve(grid.d + 2);
        for (int c = 0; c < grid.d; ++c) {
            for (int i = 0; i < grid.Nr; ++i) col[i] = state.V[c](i, ix);
            field_i.emplace_back(rlev, col);
        }
        for (int i = 0; i < grid.Nr; ++i) col[i] = state.w(i, ix);
        field_i.emplace_back(rlev, col);
        for (int i = 0; i < grid.Nr; ++i) col[i] = state.eta(i, ix);
        field_i.emplace_back(rlev, col);

        for (int j = 0; j < Nz; ++j) {
            const double zq = std::clamp(out.z[j], zcol.front(), zcol.back());
            const double rstar = std::clamp(r_of_z.eval(zq), 0.0, 1.0);
            out.rho(j, ix) = prof.has_closures && prof.closures.rho
                                 ? prof.closures.rho(rstar)
                                 : Pchip(rlev, prof.rho_of_r).eval(rstar);
            for (int c = 0; c < grid.d; ++c) {
                double v = field_i[c].eval(rstar);
                // shear compensation: Vbar(r) + eps*V_iso = Vbar_eul(z) + eps*V_eul
                double shift;
                if (eps >= kTaylorSwitch) {
                    shift = (prof.vbar_at(-out.z[j], c) - prof.vbar_at(rstar, c)) / eps;
                } else {
                    const double etaq = field_i[grid.d + 1].eval(rstar);
                    shift = -etaq * prof.vbar_prime_at(rstar, c);
                }
                out.V[c](j, ix) = v - shift;
            }
            out.w(j, ix) = field_i[grid.d].eval(rstar);
        }
        // impermeability at the exact boundaries
        out.w(0, ix) = 0.0;
        out.w(Nz - 1, ix) = 0.0;
    }
    return out;
}

FlowState from_eulerian(const EulerianState& eul, const StratificationProfile& prof,
                        const SimParams& params, const Grid& grid) {
    const double eps = params.epsilon;
    const int nx = grid.nx_total();
    if (eul.Nx != grid.Nx || eul.d != grid.d)
        throw ConfigError("from_eulerian: grid mismatch");

    FlowState out;
    out.t = eul.t;
    out.V.assign(grid.d, Field(grid.Nr, nx));
    out.w = Field(grid.Nr, nx);
    Field eta(grid.Nr, nx);

    std::vector<double> rhocol(eul.Nz), col(eul.Nz);
    const double dzv = eul.dz();
    for (int ix = 0; ix < nx; ++ix) {
        for (int j = 0; j < eul.Nz; ++j) rhocol[j] = eul.rho(j, ix);
        // stable stratification: rho strictly decreasing in z with margin
        for (int j = 0; j + 1 < eul.Nz; ++j)
            if (rhocol[j] - rhocol[j + 1] < 0.25 * params.c_star * dzv)
                throw MonotonicityViolation("from_eulerian: density not strictly decreasing at x-index " +
                                            std::to_string(ix));
        const Pchip rho_i(eul.z, rhocol);
        const double range = std::abs(rhocol.front() - rhocol.back());
        const double tol = 1e-12 * range;

        std::vector<Pchip> field_i;
        field_i.reserve(grid.d + 1);
        for (int c = 0; c < grid.d; ++c) {
            for (int j = 0; j < eul.Nz; ++j) col[j] = eul.V[c](j, ix);
            field_i.emplace_back(eul.z, col);
        }
        for (int j = 0; j < eul.Nz; ++j) col[j] = eul.w(j, ix);
        field_i.emplace_back(eul.z, col);

        for (int ir = 0; ir < grid.Nr; ++ir) {
            const double r = grid.r(ir);
            double target = prof.has_closures && prof.closures.rho ? prof.closures.rho(r)
                                                                   : prof.rho_of_r[ir];
            double zi;
            if (ir == 0)
                zi = 0.0;
            else if (ir == grid.Nr - 1)
                zi = -1.0;
            else
                zi = rho_i.invert(target, tol);
            const double etai = eps >= kTaylorSwitch ? (zi + r) / eps : 0.0;
            eta(ir, ix) = etai;
            for (int c = 0; c < grid.d; ++c) {
                double shift;
                if (eps >= kTaylorSwitch)
                    shift = (prof.vbar_at(-zi, c) - prof.vbar_at(r, c)) / eps;
                else
                    shift = -etai * prof.vbar_prime_at(r, c);
                out.V[c](ir, ix) = field_i[c].eval(zi) + shift;
            }
            out.w(ir, ix) = field_i[grid.d].eval(zi);
        }
    }
    out.set_eta(eta, grid);
    out.enforce_boundary_rows(grid);
    return out;
}

} // namespace isopyc

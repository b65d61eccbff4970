#include "isopyc/profile.hpp"

#include "isopyc/errors.hpp"
#include "isopyc/interp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace isopyc {

namespace {

constexpr double kDomainMargin = 0.5;

// 4th-order finite differences on a uniform grid, one-sided near boundaries.
std::vector<double> fd4(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<double> out(n);
    auto at = [&](int i) { return f[i]; };
    for (int i = 0; i < n; ++i) {
        if (i >= 2 && i < n - 2) {
            out[i] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
        } else if (i < 2) {
            out[i] = (-25.0 * at(i) + 48.0 * at(i + 1) - 36.0 * at(i + 2) + 16.0 * at(i + 3) -
                      3.0 * at(i + 4)) /
                     (12.0 * h);
        } else {
            out[i] = (25.0 * at(i) - 48.0 * at(i - 1) + 36.0 * at(i - 2) - 16.0 * at(i - 3) +
                      3.0 * at(i - 4)) /
                     (12.0 * h);
        }
    }
    return out;
}

std::vector<Closure> vbar_closures(const VbarSpec& spec, int d) {
    std::vector<Closure> v(d, [](double) { return 0.0; });
    const double A = spec.amplitude;
    if (spec.kind == "zero" || A == 0.0) return v;
    if (spec.kind == "linear")
        v[0] = [A](double r) { return A * r; };
    else if (spec.kind == "cos")
        v[0] = [A](double r) { return A * std::cos(M_PI * r); };
    else
        throw ConfigError("unknown vbar kind: " + spec.kind);
    return v;
}

std::vector<Closure> vbar_prime_closures(const VbarSpec& spec, int d) {
    std::vector<Closure> v(d, [](double) { return 0.0; });
    const double A = spec.amplitude;
    if (spec.kind == "zero" || A == 0.0) return v;
    if (spec.kind == "linear")
        v[0] = [A](double) { return A; };
    else if (spec.kind == "cos")
        v[0] = [A](double r) { return -A * M_PI * std::sin(M_PI * r); };
    return v;
}

} // namespace

double StratificationProfile::vbar_prime_sup() const {
    double m = 0.0;
    for (const auto& comp : vbar_prime)
        for (double v : comp) m = std::max(m, std::abs(v));
    return m;
}

bool StratificationProfile::boussinesq() const {
    for (std::size_t i = 0; i < rho_of_r.size(); ++i)
        if (rho_of_r[i] != rho_b_of_r[i]) return true;
    return false;
}

double StratificationProfile::rho_b_at(double r) const {
    if (r < -kDomainMargin || r > 1.0 + kDomainMargin)
        throw DomainEscape("buoyancy density evaluated at r = " + std::to_string(r));
    if (has_closures && closures.rho_b) return closures.rho_b(r);
    std::vector<double> rs(grid.Nr);
    for (int i = 0; i < grid.Nr; ++i) rs[i] = grid.r(i);
    const double rc = std::clamp(r, 0.0, 1.0);
    return Pchip(rs, rho_b_of_r).eval(rc);
}

double StratificationProfile::vbar_at(double r, int c) const {
    if (has_closures && !closures.vbar.empty() && closures.vbar[c]) return closures.vbar[c](r);
    std::vector<double> rs(grid.Nr);
    for (int i = 0; i < grid.Nr; ++i) rs[i] = grid.r(i);
    return Pchip(rs, vbar_of_r[c]).eval(std::clamp(r, 0.0, 1.0));
}

double StratificationProfile::vbar_prime_at(double r, int c) const {
    if (has_closures && !closures.vbar_prime.empty() && closures.vbar_prime[c])
        return closures.vbar_prime[c](r);
    std::vector<double> rs(grid.Nr);
    for (int i = 0; i < grid.Nr; ++i) rs[i] = grid.r(i);
    return Pchip(rs, vbar_prime[c]).eval(std::clamp(r, 0.0, 1.0));
}

StratificationProfile build_profile(const ProfileClosures& closures, const Grid& grid,
                                    const SimParams& params) {
    StratificationProfile p;
    p.grid = grid;
    p.has_closures = true;
    p.closures = closures;
    if (!p.closures.rho) throw ConfigError("profile: rho closure is required");
    if (!p.closures.rho_b) {
        p.closures.rho_b = p.closures.rho;
        p.closures.rho_b_prime = p.closures.rho_prime;
    }
    if (p.closures.vbar.empty())
        p.closures.vbar.assign(grid.d, [](double) { return 0.0; });

    const int Nr = grid.Nr;
    const double h = grid.dr();
    p.rho_of_r.resize(Nr);
    p.rho_b_of_r.resize(Nr);
    p.rho_half.resize(Nr - 1);
    for (int i = 0; i < Nr; ++i) {
        p.rho_of_r[i] = p.closures.rho(grid.r(i));
        p.rho_b_of_r[i] = p.closures.rho_b(grid.r(i));
    }
    for (int i = 0; i < Nr - 1; ++i) p.rho_half[i] = p.closures.rho(grid.r(i) + 0.5 * h);

    if (p.closures.rho_prime) {
        p.rho_prime.resize(Nr);
        for (int i = 0; i < Nr; ++i) p.rho_prime[i] = p.closures.rho_prime(grid.r(i));
    } else {
        p.rho_prime = fd4(p.rho_of_r, h);
    }
    if (p.closures.rho_b_prime) {
        p.rho_b_prime.resize(Nr);
        for (int i = 0; i < Nr; ++i) p.rho_b_prime[i] = p.closures.rho_b_prime(grid.r(i));
    } else {
        p.rho_b_prime = fd4(p.rho_b_of_r, h);
    }

    p.vbar_of_r.assign(grid.d, std::vector<double>(Nr, 0.0));
    p.vbar_prime.assign(grid.d, std::vector<double>(Nr, 0.0));
    for (int c = 0; c < grid.d; ++c) {
        const Closure& vb = p.closures.vbar[c];
        for (int i = 0; i < Nr; ++i) p.vbar_of_r[c][i] = vb ? vb(grid.r(i)) : 0.0;
        if (!p.closures.vbar_prime.empty() && p.closures.vbar_prime[c]) {
            for (int i = 0; i < Nr; ++i) p.vbar_prime[c][i] = p.closures.vbar_prime[c](grid.r(i));
        } else {
            p.vbar_prime[c] = fd4(p.vbar_of_r[c], h);
        }
    }
    if (p.closures.vbar_prime.empty()) {
        p.closures.vbar_prime.assign(grid.d, Closure{});
    }

    // invariants
    const double rmin = params.rho_min > 0.0 ? params.rho_min : 1e-12;
    const double rmax = params.rho_max > 0.0 ? params.rho_max : std::numeric_limits<double>::max();
    for (int i = 0; i < Nr; ++i) {
        if (p.rho_of_r[i] < rmin || p.rho_of_r[i] > rmax)
            throw CavitationViolation("density leaves [rho_min, rho_max] at r = " +
                                      std::to_string(grid.r(i)));
        if (p.rho_b_prime[i] < params.c_star)
            throw StabilityViolation("stratification not strictly stable: rho' = " +
                                     std::to_string(p.rho_b_prime[i]) + " < c_star at r = " +
                                     std::to_string(grid.r(i)));
    }
    return p;
}

StratificationProfile make_profile_exp(const Grid& g, const SimParams& par, double rho0,
                                       double rate, const VbarSpec& vbar) {
    ProfileClosures c;
    c.rho = [rho0, rate](double r) { return rho0 * std::exp(rate * r); };
    c.rho_prime = [rho0, rate](double r) { return rho0 * rate * std::exp(rate * r); };
    c.vbar = vbar_closures(vbar, g.d);
    c.vbar_prime = vbar_prime_closures(vbar, g.d);
    return build_profile(c, g, par);
}

StratificationProfile make_profile_linear(const Grid& g, const SimParams& par, double rho0,
                                          double slope, const VbarSpec& vbar) {
    ProfileClosures c;
    c.rho = [rho0, slope](double r) { return rho0 + slope * r; };
    c.rho_prime = [slope](double) { return slope; };
    c.vbar = vbar_closures(vbar, g.d);
    c.vbar_prime = vbar_prime_closures(vbar, g.d);
    return build_profile(c, g, par);
}

StratificationProfile make_profile_tanh(const Grid& g, const SimParams& par, double rho0,
                                        double drho, double center, double width,
                                        const VbarSpec& vbar) {
    ProfileClosures c;
    c.rho = [=](double r) { return rho0 + drho * std::tanh((r - center) / width); };
    c.rho_prime = [=](double r) {
        const double t = std::tanh((r - center) / width);
        return drho * (1.0 - t * t) / width;
    };
    c.vbar = vbar_closures(vbar, g.d);
    c.vbar_prime = vbar_prime_closures(vbar, g.d);
    return build_profile(c, g, par);
}

StratificationProfile make_profile_boussinesq(const Grid& g, const SimParams& par, double n2,
                                              const VbarSpec& vbar) {
    ProfileClosures c;
    c.rho = [](double) { return 1.0; };
    c.rho_prime = [](double) { return 0.0; };
    c.rho_b = [n2](double r) { return std::exp(n2 * r); };
    c.rho_b_prime = [n2](double r) { return n2 * std::exp(n2 * r); };
    c.vbar = vbar_closures(vbar, g.d);
    c.vbar_prime = vbar_prime_closures(vbar, g.d);
    return build_profile(c, g, par);
}

StratificationProfile make_profile_from_csv(const std::string& path, const Grid& g,
                                            const SimParams& par) {
    std::ifstream in(path);
    if (!in) throw IOFailure("cannot open profile CSV: " + path);
    std::vector<double> rs;
    std::vector<double> rho;
    std::vector<std::vector<double>> vb;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) {
            try {
                vals.push_back(std::stod(tok));
            } catch (...) {
                // header line
                vals.clear();
                break;
            }
        }
        if (vals.size() < 2) continue;
        rs.push_back(vals[0]);
        rho.push_back(vals[1]);
        if (vb.empty()) vb.assign(vals.size() - 2, {});
        for (std::size_t c = 2; c < vals.size(); ++c) vb[c - 2].push_back(vals[c]);
    }
    if (rs.size() < 5) throw FormatMismatch("profile CSV needs at least 5 rows (r,rho,...)");

    const Pchip rho_i(rs, rho);
    std::vector<Pchip> vb_i;
    for (const auto& col : vb) vb_i.emplace_back(rs, col);

    ProfileClosures c;
    c.rho = [rho_i](double r) { return rho_i.eval(r); };
    for (int cc = 0; cc < g.d; ++cc) {
        if (cc < static_cast<int>(vb_i.size())) {
            const Pchip vi = vb_i[cc];
            c.vbar.push_back([vi](double r) { return vi.eval(r); });
        } else {
            c.vbar.push_back([](double) { return 0.0; });
        }
    }
    // no analytic derivatives: build_profile falls back to 4th-order differences
    return build_profile(c, g, par);
}

std::vector<double> brunt_vaisala(const StratificationProfile& p) {
    std::vector<double> n2(p.grid.Nr);
    for (int i = 0; i < p.grid.Nr; ++i) n2[i] = p.n2(i);
    return n2;
}

double miles_howard_margin(const StratificationProfile& p, double g_nondim) {
    double inf_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p.grid.Nr; ++i) {
        double vp2 = 0.0;
        for (int c = 0; c < p.grid.d; ++c) vp2 += p.vbar_prime[c][i] * p.vbar_prime[c][i];
        if (vp2 < 1e-28) continue; // Vbar' = 0 contributes +infinity
        inf_ratio = std::min(inf_ratio, g_nondim * p.n2(i) / vp2);
    }
    if (!std::isfinite(inf_ratio)) return std::numeric_limits<double>::infinity();
    return inf_ratio - 0.25;
}

} // namespace isopyc

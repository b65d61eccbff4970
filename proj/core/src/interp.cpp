#include "isopyc/interp.hpp"

#include "isopyc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isopyc {

Pchip::Pchip(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const int n = static_cast<int>(x_.size());
    if (n < 3) throw Error("Pchip needs at least 3 nodes");
    m_.assign(n, 0.0);
    std::vector<double> hseg(n - 1), d(n - 1);
    for (int i = 0; i < n - 1; ++i) {
        hseg[i] = x_[i + 1] - x_[i];
        if (!(hseg[i] > 0.0)) throw Error("Pchip nodes must be strictly increasing");
        d[i] = (y_[i + 1] - y_[i]) / hseg[i];
    }
    // interior slopes: weighted harmonic mean, zero across sign changes
    for (int i = 1; i < n - 1; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m_[i] = 0.0;
        } else {
            const double w1 = 2.0 * hseg[i] + hseg[i - 1];
            const double w2 = hseg[i] + 2.0 * hseg[i - 1];
            m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // endpoints: non-centered three-point formula with monotonicity clipping
    auto endpoint = [](double h1, double h2, double d1, double d2) {
        double m = ((2.0 * h1 + h2) * d1 - h1 * d2) / (h1 + h2);
        if (m * d1 <= 0.0)
            m = 0.0;
        else if (d1 * d2 < 0.0 && std::abs(m) > 3.0 * std::abs(d1))
            m = 3.0 * d1;
        return m;
    };
    m_[0] = endpoint(hseg[0], hseg[1], d[0], d[1]);
    m_[n - 1] = endpoint(hseg[n - 2], hseg[n - 3], d[n - 2], d[n - 3]);
}

int Pchip::cell(double xq) const {
    const int n = static_cast<int>(x_.size());
    if (xq <= x_[0]) return 0;
    if (xq >= x_[n - 1]) return n - 2;
    int lo = std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin() - 1;
    return std::clamp(lo, 0, n - 2);
}

double Pchip::eval(double xq) const {
    const int i = cell(xq);
    const double hseg = x_[i + 1] - x_[i];
    const double s = (xq - x_[i]) / hseg;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[i] + h10 * hseg * m_[i] + h01 * y_[i + 1] + h11 * hseg * m_[i + 1];
}

double Pchip::deriv(double xq) const {
    const int i = cell(xq);
    const double hseg = x_[i + 1] - x_[i];
    const double s = (xq - x_[i]) / hseg;
    const double h00p = (6.0 * s * s - 6.0 * s) / hseg;
    const double h10p = 3.0 * s * s - 4.0 * s + 1.0;
    const double h01p = -h00p;
    const double h11p = 3.0 * s * s - 2.0 * s;
    return h00p * y_[i] + h10p * m_[i] + h01p * y_[i + 1] + h11p * m_[i + 1];
}

double Pchip::invert(double target, double tol) const {
    const bool increasing = y_.back() > y_.front();
    const double ylo = increasing ? y_.front() : y_.back();
    const double yhi = increasing ? y_.back() : y_.front();
    const double slack = 16.0 * tol + 1e-14 * (std::abs(ylo) + std::abs(yhi));
    if (target < ylo - slack || target > yhi + slack)
        throw RootFindFailure("invert target outside data range");
    double a = x_.front();
    double b = x_.back();
    auto g = [&](double z) { return eval(z) - target; };
    double ga = g(a);
    double gb = g(b);
    if (ga * gb > 0.0) {
        // target within slack of an endpoint
        return std::abs(ga) < std::abs(gb) ? a : b;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = g(mid);
        if (std::abs(gm) <= tol || b - a < 1e-15 * (std::abs(a) + std::abs(b) + 1.0)) {
            // Newton polish
            double z = mid;
            for (int k = 0; k < 4; ++k) {
                const double dv = deriv(z);
                if (dv == 0.0) break;
                z -= (eval(z) - target) / dv;
                z = std::clamp(z, x_.front(), x_.back());
            }
            return z;
        }
        if (ga * gm <= 0.0) {
            b = mid;
            gb = gm;
        } else {
            a = mid;
            ga = gm;
        }
    }
    throw RootFindFailure("bisection failed to converge");
}

double lsq_slope(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    if (n < 2) throw InsufficientData("lsq_slope needs at least 2 samples");
    double tm = 0.0;
    double ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tm += t[i];
        ym += y[i];
    }
    tm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (t[i] - tm) * (y[i] - ym);
        den += (t[i] - tm) * (t[i] - tm);
    }
    if (den == 0.0) throw InsufficientData("lsq_slope: degenerate abscissae");
    return num / den;
}

namespace {
std::vector<double> tied_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    return rank;
}
} // namespace

double spearman_rho(std::span<const double> a, std::span<const double> b) {
    const std::vector<double> ra = tied_ranks(a);
    const std::vector<double> rb = tied_ranks(b);
    const std::size_t n = a.size();
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double num = 0.0;
    double va = 0.0;
    double vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return num / std::sqrt(va * vb);
}

} // namespace isopyc

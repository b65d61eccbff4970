#pragma once

#include <span>
#include <vector>

namespace isopyc {

/// Shape-preserving cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Monotone data yields a monotone interpolant.
class Pchip {
public:
    Pchip() = default;
    /// x strictly increasing.
    Pchip(std::span<const double> x, std::span<const double> y);

    double eval(double xq) const;
    double deriv(double xq) const;
    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

    /// Solves eval(z) = target for a strictly monotone interpolant.
    /// Bisection to bracket, Newton polish to |f| <= tol. Throws
    /// RootFindFailure if the target is outside the data range.
    double invert(double target, double tol) const;

private:
    std::vector<double> x_, y_, m_;
    int cell(double xq) const;
};

/// Least-squares slope of y against t.
double lsq_slope(std::span<const double> t, std::span<const double> y);

/// Spearman rank correlation with average ranks for ties.
double spearman_rho(std::span<const double> a, std::span<const double> b);

} // namespace isopyc

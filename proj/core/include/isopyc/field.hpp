#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isopyc/grid.hpp"

namespace isopyc {

/// Scalar field sampled on the (r, x) grid, r-index outermost.
struct Field {
    int nr = 0;
    int nx = 0; ///< total horizontal points (Nx^d)
    std::vector<double> a;

    Field() = default;
    Field(int nr_, int nx_) : nr(nr_), nx(nx_), a(static_cast<size_t>(nr_) * nx_, 0.0) {}
    static Field zeros(const Grid& g) { return Field(g.Nr, g.nx_total()); }

    double& operator()(int ir, int ix) { return a[static_cast<size_t>(ir) * nx + ix]; }
    double operator()(int ir, int ix) const { return a[static_cast<size_t>(ir) * nx + ix]; }

    std::span<double> row(int ir) { return {a.data() + static_cast<size_t>(ir) * nx, static_cast<size_t>(nx)}; }
    std::span<const double> row(int ir) const {
        return {a.data() + static_cast<size_t>(ir) * nx, static_cast<size_t>(nx)};
    }

    std::size_t size() const { return a.size(); }
    void fill(double v) { a.assign(a.size(), v); }
    bool finite() const;
    double max_abs() const;
    double min_value() const;
};

/// Velocity-like bundle: d horizontal components followed by the vertical one.
struct VecField {
    std::vector<Field> comp;

    VecField() = default;
    VecField(const Grid& g, int ncomp) {
        comp.reserve(ncomp);
        for (int c = 0; c < ncomp; ++c) comp.push_back(Field::zeros(g));
    }
    int ncomp() const { return static_cast<int>(comp.size()); }
    Field& operator[](int c) { return comp[c]; }
    const Field& operator[](int c) const { return comp[c]; }
};

// -- elementwise helpers ------------------------------------------------------

/// y += s*x
void add_scaled(Field& y, double s, const Field& x);
/// out = a - b
Field difference(const Field& a, const Field& b);
void scale(Field& f, double s);
/// pointwise product, no dealiasing
Field hadamard(const Field& a, const Field& b);

} // namespace isopyc

#pragma once

#include <cmath>

namespace isopyc {

/// Discrete domain: a horizontal torus of period L in d directions (d = 1 or
/// 2, Nx points each) times the vertical interval r in [0,1] with Nr
/// collocated levels, both boundary rows included.
struct Grid {
    int d = 1;
    int Nx = 64;
    double L = 2.0 * M_PI;
    int Nr = 33;

    Grid() = default;
    Grid(int d_, int Nx_, double L_, int Nr_) : d(d_), Nx(Nx_), L(L_), Nr(Nr_) {
        validate();
    }

    /// Total horizontal points, Nx^d.
    int nx_total() const { return d == 1 ? Nx : Nx * Nx; }
    double dr() const { return 1.0 / (Nr - 1); }
    double dx() const { return L / Nx; }
    /// Horizontal cell volume (L/Nx)^d.
    double cell_volume() const {
        const double h = dx();
        return d == 1 ? h : h * h;
    }
    double r(int ir) const { return ir * dr(); }
    /// Trapezoid weight of level ir (includes dr).
    double rweight(int ir) const {
        return (ir == 0 || ir == Nr - 1) ? 0.5 * dr() : dr();
    }

    void validate() const; // throws ConfigError
};

} // namespace isopyc

#pragma once

#include <complex>
#include <vector>

#include "isopyc/field.hpp"
#include "isopyc/grid.hpp"

namespace isopyc {

/// Horizontal Fourier engine: batched real transforms over the r-levels,
/// multiplier application, 2/3-rule dealiasing and the smooth mollifier.
///
/// Holds scratch buffers, so a workspace must not be shared across concurrent
/// callers; create one per worker. All operations are deterministic.
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(const Grid& grid);
    /// Workspace for fields with a custom number of rows (e.g. half-level
    /// fields with Nr-1 rows).
    SpectralWorkspace(const Grid& grid, int levels);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const Grid& grid() const { return grid_; }
    int levels() const { return levels_; }
    /// Complex modes per level in the half-spectrum layout.
    int nmodes() const { return nxc_; }

    /// |xi|^2 of mode m.
    double xi2(int m) const { return xi2_[m]; }
    /// Component c of xi for mode m.
    double xi(int c, int m) const { return xi_[c][m]; }
    /// 2/3-rule mask of mode m (1 kept, 0 zeroed).
    double mask(int m) const { return mask_[m]; }
    /// 0 on Nyquist lines where spectral derivatives vanish, else 1.
    double deriv_ok(int m) const { return deriv_ok_[m]; }

    // -- transforms (copying in/out of internal aligned buffers) --
    void forward(const Field& f, std::vector<std::complex<double>>& out) const;
    void backward(std::vector<std::complex<double>>& modes, Field& out) const;

    // -- derivative / multiplier operations --
    /// Spectral d/dx_axis, exact on resolved modes (Nyquist derivative zeroed).
    void dx(const Field& f, int axis, Field& out) const;
    Field dx(const Field& f, int axis = 0) const;

    /// Fourier multiplier (1+|xi|^2)^{s/2}, level by level.
    Field lambda_pow(const Field& f, double s) const;
    /// Fourier multiplier |xi|^2 (1+|xi|^2)^{(s-2)/2}; vanishes on the mean mode.
    Field dsq_lambda(const Field& f, double s) const;
    /// Smooth horizontal cutoff: mode xi scaled by chi(delta*|xi|); delta = 0
    /// is the identity.
    Field mollify(const Field& f, double delta) const;

    /// 2/3-rule truncation.
    void dealias(Field& f) const;
    Field dealiased(const Field& f) const;
    /// mask(mask(a) * mask(b)) -- the product rule for arbitrary operands.
    Field dealiased_product(const Field& a, const Field& b) const;
    /// mask(a * b): exact 2/3 dealiasing when both operands are already
    /// band-limited (the invariant maintained on prognostic fields).
    Field masked_product(const Field& a, const Field& b) const;

    /// Zero every horizontal mode except |k| == keep_k (d=1 helper for tests).
    Field keep_single_mode(const Field& f, int keep_k) const;

    /// The cutoff profile chi: 1 on [0,1], smooth to 0 on [1,2], 0 beyond.
    static double chi(double t);

private:
    struct Impl;
    Grid grid_;
    int levels_ = 0;
    int nxc_ = 0;
    std::vector<double> xi2_;
    std::vector<std::vector<double>> xi_;
    std::vector<double> mask_;      // 2/3 rule
    std::vector<double> deriv_ok_;  // zero at Nyquist lines
    Impl* impl_ = nullptr;

    void apply_multiplier(const Field& f, const double* mult, Field& out) const;
};

} // namespace isopyc

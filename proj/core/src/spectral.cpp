#include "isopyc/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace isopyc {

namespace {
// FFTW planner calls are not thread-safe; execution is.
std::mutex g_planner_mutex;
} // namespace

struct SpectralWorkspace::Impl {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    double* rbuf = nullptr;
    fftw_complex* cbuf = nullptr;
    int nreal = 0;
    int ncplx = 0;

    ~Impl() {
        std::lock_guard<std::mutex> lock(g_planner_mutex);
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (rbuf) fftw_free(rbuf);
        if (cbuf) fftw_free(cbuf);
    }
};

SpectralWorkspace::SpectralWorkspace(const Grid& grid) : SpectralWorkspace(grid, grid.Nr) {}

SpectralWorkspace::SpectralWorkspace(const Grid& grid, int levels)
    : grid_(grid), levels_(levels) {
    const int Nx = grid.Nx;
    const int d = grid.d;
    const int half = Nx / 2 + 1;
    nxc_ = (d == 1) ? half : Nx * half;
    const int nx = grid.nx_total();

    impl_ = new Impl();
    impl_->nreal = levels * nx;
    impl_->ncplx = levels * nxc_;
    impl_->rbuf = static_cast<double*>(fftw_malloc(sizeof(double) * impl_->nreal));
    impl_->cbuf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * impl_->ncplx));

    int n[2] = {Nx, Nx};
    {
        std::lock_guard<std::mutex> lock(g_planner_mutex);
        impl_->fwd = fftw_plan_many_dft_r2c(d, n, levels, impl_->rbuf, nullptr, 1, nx,
                                            impl_->cbuf, nullptr, 1, nxc_, FFTW_ESTIMATE);
        impl_->bwd = fftw_plan_many_dft_c2r(d, n, levels, impl_->cbuf, nullptr, 1, nxc_,
                                            impl_->rbuf, nullptr, 1, nx, FFTW_ESTIMATE);
    }

    // mode tables
    xi2_.assign(nxc_, 0.0);
    mask_.assign(nxc_, 1.0);
    deriv_ok_.assign(nxc_, 1.0);
    xi_.assign(d, std::vector<double>(nxc_, 0.0));
    const double k0 = 2.0 * M_PI / grid.L;
    const int kcut = Nx / 3; // keep |k| <= Nx/3
    if (d == 1) {
        for (int m = 0; m < nxc_; ++m) {
            const int k = m;
            xi_[0][m] = k0 * k;
            xi2_[m] = xi_[0][m] * xi_[0][m];
            if (k > kcut) mask_[m] = 0.0;
            if (k == Nx / 2) deriv_ok_[m] = 0.0;
        }
    } else {
        for (int m1 = 0; m1 < Nx; ++m1) {
            const int k1 = (m1 <= Nx / 2) ? m1 : m1 - Nx;
            for (int m2 = 0; m2 < half; ++m2) {
                const int k2 = m2;
                const int m = m1 * half + m2;
                xi_[0][m] = k0 * k1;
                xi_[1][m] = k0 * k2;
                xi2_[m] = xi_[0][m] * xi_[0][m] + xi_[1][m] * xi_[1][m];
                if (std::abs(k1) > kcut || k2 > kcut) mask_[m] = 0.0;
                if (std::abs(k1) == Nx / 2 || k2 == Nx / 2) deriv_ok_[m] = 0.0;
            }
        }
    }
}

SpectralWorkspace::~SpectralWorkspace() { delete impl_; }

double SpectralWorkspace::chi(double t) {
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    const double s = t - 1.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

void SpectralWorkspace::forward(const Field& f, std::vector<std::complex<double>>& out) const {
    std::memcpy(impl_->rbuf, f.a.data(), sizeof(double) * impl_->nreal);
    fftw_execute(impl_->fwd);
    out.resize(impl_->ncplx);
    std::memcpy(out.data(), impl_->cbuf, sizeof(fftw_complex) * impl_->ncplx);
}

void SpectralWorkspace::backward(std::vector<std::complex<double>>& modes, Field& out) const {
    std::memcpy(impl_->cbuf, modes.data(), sizeof(fftw_complex) * impl_->ncplx);
    fftw_execute(impl_->bwd);
    out.nr = levels_;
    out.nx = grid_.nx_total();
    out.a.resize(impl_->nreal);
    const double norm = 1.0 / grid_.nx_total();
    for (int i = 0; i < impl_->nreal; ++i) out.a[i] = impl_->rbuf[i] * norm;
}

void SpectralWorkspace::apply_multiplier(const Field& f, const double* mult, Field& out) const {
    std::memcpy(impl_->rbuf, f.a.data(), sizeof(double) * impl_->nreal);
    fftw_execute(impl_->fwd);
    fftw_complex* c = impl_->cbuf;
    for (int ir = 0; ir < levels_; ++ir) {
        fftw_complex* row = c + static_cast<std::size_t>(ir) * nxc_;
        for (int m = 0; m < nxc_; ++m) {
            row[m][0] *= mult[m];
            row[m][1] *= mult[m];
        }
    }
    fftw_execute(impl_->bwd);
    out.nr = levels_;
    out.nx = grid_.nx_total();
    out.a.resize(impl_->nreal);
    const double norm = 1.0 / grid_.nx_total();
    for (int i = 0; i < impl_->nreal; ++i) out.a[i] = impl_->rbuf[i] * norm;
}

void SpectralWorkspace::dx(const Field& f, int axis, Field& out) const {
    std::memcpy(impl_->rbuf, f.a.data(), sizeof(double) * impl_->nreal);
    fftw_execute(impl_->fwd);
    fftw_complex* c = impl_->cbuf;
    const std::vector<double>& xi = xi_[axis];
    for (int ir = 0; ir < levels_; ++ir) {
        fftw_complex* row = c + static_cast<std::size_t>(ir) * nxc_;
        for (int m = 0; m < nxc_; ++m) {
            const double k = xi[m] * deriv_ok_[m];
            const double re = row[m][0];
            const double im = row[m][1];
            row[m][0] = -k * im; // multiply by i*xi
            row[m][1] = k * re;
        }
    }
    fftw_execute(impl_->bwd);
    out.nr = levels_;
    out.nx = grid_.nx_total();
    out.a.resize(impl_->nreal);
    const double norm = 1.0 / grid_.nx_total();
    for (int i = 0; i < impl_->nreal; ++i) out.a[i] = impl_->rbuf[i] * norm;
}

Field SpectralWorkspace::dx(const Field& f, int axis) const {
    Field out;
    dx(f, axis, out);
    return out;
}

Field SpectralWorkspace::lambda_pow(const Field& f, double s) const {
    std::vector<double> mult(nxc_);
    for (int m = 0; m < nxc_; ++m) mult[m] = std::pow(1.0 + xi2_[m], 0.5 * s);
    Field out;
    apply_multiplier(f, mult.data(), out);
    return out;
}

Field SpectralWorkspace::dsq_lambda(const Field& f, double s) const {
    std::vector<double> mult(nxc_);
    for (int m = 0; m < nxc_; ++m) mult[m] = xi2_[m] * std::pow(1.0 + xi2_[m], 0.5 * (s - 2.0));
    Field out;
    apply_multiplier(f, mult.data(), out);
    return out;
}

Field SpectralWorkspace::mollify(const Field& f, double delta) const {
    if (delta == 0.0) return f;
    std::vector<double> mult(nxc_);
    for (int m = 0; m < nxc_; ++m) mult[m] = chi(delta * std::sqrt(xi2_[m]));
    Field out;
    apply_multiplier(f, mult.data(), out);
    return out;
}

void SpectralWorkspace::dealias(Field& f) const {
    apply_multiplier(f, mask_.data(), f);
}

Field SpectralWorkspace::dealiased(const Field& f) const {
    Field out;
    apply_multiplier(f, mask_.data(), out);
    return out;
}

Field SpectralWorkspace::dealiased_product(const Field& a, const Field& b) const {
    Field da = dealiased(a);
    Field db = dealiased(b);
    for (std::size_t i = 0; i < da.a.size(); ++i) da.a[i] *= db.a[i];
    dealias(da);
    return da;
}

Field SpectralWorkspace::masked_product(const Field& a, const Field& b) const {
    Field out = a;
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] *= b.a[i];
    dealias(out);
    return out;
}

Field SpectralWorkspace::keep_single_mode(const Field& f, int keep_k) const {
    std::vector<double> mult(nxc_, 0.0);
    if (grid_.d == 1) {
        if (keep_k >= 0 && keep_k < nxc_) mult[keep_k] = 1.0;
    } else {
        const int half = grid_.Nx / 2 + 1;
        for (int m1 = 0; m1 < grid_.Nx; ++m1) {
            const int k1 = (m1 <= grid_.Nx / 2) ? m1 : m1 - grid_.Nx;
            for (int m2 = 0; m2 < half; ++m2)
                if (std::abs(k1) == keep_k && m2 == 0) mult[m1 * half + m2] = 1.0;
        }
    }
    Field out;
    apply_multiplier(f, mult.data(), out);
    return out;
}

} // namespace isopyc

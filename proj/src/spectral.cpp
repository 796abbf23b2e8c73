#include "sg/spectral.hpp"

#include <fftw3.h>

#include <cassert>

namespace sg {

namespace {
// Signed frequency of a DFT bin; the Nyquist bin maps to +n/2 (the
// conjugate-pairing below makes the choice immaterial for real fields).
inline int signed_freq(int k, int n) { return k <= n / 2 ? k : k - n; }
} // namespace

SpectralWorkspace::SpectralWorkspace(Grid grid)
    : grid_(grid),
      nky_(grid.n / 2 + 1),
      real_buf_(size_t(grid.size())),
      spec_(size_t(grid.n) * size_t(nky_)),
      lap_mult_(spec_.size()),
      inv_mult_(spec_.size()) {
    const int n = grid_.n;
    plan_fwd_ = reinterpret_cast<fftw_plan_s*>(fftw_plan_dft_r2c_2d(
        n, n, real_buf_.data(), reinterpret_cast<fftw_complex*>(spec_.data()),
        FFTW_ESTIMATE));
    plan_bwd_ = reinterpret_cast<fftw_plan_s*>(fftw_plan_dft_c2r_2d(
        n, n, reinterpret_cast<fftw_complex*>(spec_.data()), real_buf_.data(),
        FFTW_ESTIMATE));
    for (int kx = 0; kx < n; ++kx) {
        const double fx = signed_freq(kx, n);
        for (int ky = 0; ky < nky_; ++ky) {
            const double k2 = fx * fx + double(ky) * double(ky);
            const size_t idx = size_t(kx) * nky_ + ky;
            lap_mult_[idx] = -two_pi * two_pi * k2;
            inv_mult_[idx] = (kx == 0 && ky == 0) ? 0.0 : 1.0 / lap_mult_[idx];
        }
    }
}

SpectralWorkspace::~SpectralWorkspace() {
    if (plan_fwd_) fftw_destroy_plan(reinterpret_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(reinterpret_cast<fftw_plan>(plan_bwd_));
}

void SpectralWorkspace::forward(const ScalarField& f) {
    assert(f.grid == grid_);
    real_buf_ = f.values;
    fftw_execute(reinterpret_cast<fftw_plan>(plan_fwd_));
}

ScalarField SpectralWorkspace::backward() {
    fftw_execute(reinterpret_cast<fftw_plan>(plan_bwd_));
    ScalarField out(grid_);
    const double scale = grid_.area_element();
    for (size_t i = 0; i < out.size(); ++i) out[i] = real_buf_[i] * scale;
    return out;
}

ScalarField SpectralWorkspace::laplacian(const ScalarField& f) {
    require_finite(f, "laplacian");
    forward(f);
    for (size_t i = 0; i < spec_.size(); ++i) spec_[i] *= lap_mult_[i];
    return backward();
}

ScalarField SpectralWorkspace::solve_poisson(const ScalarField& rhs) {
    require_finite(rhs, "solve_poisson");
    const double mean = integrate(rhs);
    if (std::abs(mean) > 1e-12)
        throw validation_error(
            "solve_poisson: right-hand side must have zero mean on the torus, "
            "got mean = " +
            std::to_string(mean));
    forward(rhs);
    for (size_t i = 0; i < spec_.size(); ++i) spec_[i] *= inv_mult_[i];
    return backward();
}

ScalarField SpectralWorkspace::helmholtz_invert(const ScalarField& rhs,
                                                double c) {
    require_finite(rhs, "helmholtz_invert");
    if (!(c > 0))
        throw validation_error("helmholtz_invert: shift must be positive");
    forward(rhs);
    for (size_t i = 0; i < spec_.size(); ++i) spec_[i] /= (c - lap_mult_[i]);
    return backward();
}

double SpectralWorkspace::dirichlet_energy(const ScalarField& f) {
    require_finite(f, "dirichlet_energy");
    forward(f);
    const int n = grid_.n;
    const double norm = 1.0 / (double(grid_.size()) * double(grid_.size()));
    double sum = 0.0;
    for (int kx = 0; kx < n; ++kx) {
        for (int ky = 0; ky < nky_; ++ky) {
            const size_t idx = size_t(kx) * nky_ + ky;
            const double w = (ky == 0 || ky == n / 2) ? 1.0 : 2.0;
            sum += w * (-lap_mult_[idx]) * std::norm(spec_[idx]);
        }
    }
    return 0.5 * sum * norm;
}

std::pair<ScalarField, ScalarField> SpectralWorkspace::gradient(
    const ScalarField& f) {
    require_finite(f, "gradient");
    const int n = grid_.n;
    forward(f);
    std::vector<std::complex<double>> saved = spec_;
    for (int kx = 0; kx < n; ++kx) {
        const int fx = signed_freq(kx, n);
        const std::complex<double> mult =
            (kx == n / 2) ? 0.0 : std::complex<double>(0.0, two_pi * fx);
        for (int ky = 0; ky < nky_; ++ky) spec_[size_t(kx) * nky_ + ky] *= mult;
    }
    ScalarField dx = backward();
    spec_ = saved;
    for (int kx = 0; kx < n; ++kx) {
        for (int ky = 0; ky < nky_; ++ky) {
            const std::complex<double> mult =
                (ky == n / 2) ? 0.0 : std::complex<double>(0.0, two_pi * ky);
            spec_[size_t(kx) * nky_ + ky] *= mult;
        }
    }
    ScalarField dy = backward();
    return {std::move(dx), std::move(dy)};
}

std::vector<double> SpectralWorkspace::sample(const ScalarField& f,
                                              std::span<const Point> pts) {
    require_finite(f, "sample");
    forward(f);
    const int n = grid_.n;
    std::vector<double> out(pts.size());
    std::vector<double> exr(static_cast<size_t>(n)), exi(static_cast<size_t>(n));
    // Conjugate-pair weight folded into the y-phase table.
    std::vector<double> eyr(static_cast<size_t>(nky_)),
        eyi(static_cast<size_t>(nky_));
    for (size_t ip = 0; ip < pts.size(); ++ip) {
        const double x = pts[ip].x, y = pts[ip].y;
        for (int kx = 0; kx < n; ++kx) {
            const double ph = two_pi * signed_freq(kx, n) * x;
            exr[size_t(kx)] = std::cos(ph);
            exi[size_t(kx)] = std::sin(ph);
        }
        for (int ky = 0; ky < nky_; ++ky) {
            const double w = (ky == 0 || ky == n / 2) ? 1.0 : 2.0;
            const double ph = two_pi * ky * y;
            eyr[size_t(ky)] = w * std::cos(ph);
            eyi[size_t(ky)] = w * std::sin(ph);
        }
        double total = 0.0;
        for (int kx = 0; kx < n; ++kx) {
            const double* row =
                reinterpret_cast<const double*>(spec_.data() + size_t(kx) * nky_);
            double sr = 0.0, si = 0.0;
            for (int ky = 0; ky < nky_; ++ky) {
                const double fr = row[2 * ky], fi = row[2 * ky + 1];
                sr += fr * eyr[size_t(ky)] - fi * eyi[size_t(ky)];
                si += fr * eyi[size_t(ky)] + fi * eyr[size_t(ky)];
            }
            // Only the real part of the reconstruction survives.
            total += sr * exr[size_t(kx)] - si * exi[size_t(kx)];
        }
        out[ip] = total * grid_.area_element();
    }
    return out;
}

double SpectralWorkspace::sample(const ScalarField& f, Point p) {
    return sample(f, std::span<const Point>(&p, 1))[0];
}

} // namespace sg

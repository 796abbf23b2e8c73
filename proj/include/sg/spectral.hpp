#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "sg/field.hpp"

// Opaque FFTW handles; fftw3.h is only pulled into the implementation.
struct fftw_plan_s;

namespace sg {

/// FFT-based differential operators on the unit torus.
///
/// Owns FFTW plans and scratch buffers for one grid size. Mutable
/// single-owner scratch: do not share one workspace between threads;
/// fields themselves are plain values and move freely.
class SpectralWorkspace {
  public:
    explicit SpectralWorkspace(Grid grid);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const Grid& grid() const { return grid_; }

    /// Spectral Laplacian. Output has exactly zero mean.
    ScalarField laplacian(const ScalarField& f);

    /// Unique zero-mean phi with Delta(phi) = rhs. Requires |mean(rhs)| <= 1e-12.
    ScalarField solve_poisson(const ScalarField& rhs);

    /// Exact inverse of the constant-coefficient operator (c - Delta), c > 0.
    ScalarField helmholtz_invert(const ScalarField& rhs, double c);

    /// (1/2) * integral of |grad f|^2 via Parseval.
    double dirichlet_energy(const ScalarField& f);

    /// Spectral partial derivatives (d/dx, d/dy); Nyquist modes dropped.
    std::pair<ScalarField, ScalarField> gradient(const ScalarField& f);

    /// Evaluates the trigonometric interpolant of f at arbitrary points.
    /// Exact at grid nodes; periodic in both coordinates.
    std::vector<double> sample(const ScalarField& f, std::span<const Point> pts);
    double sample(const ScalarField& f, Point p);

  private:
    void forward(const ScalarField& f); // fills spec_
    ScalarField backward();             // consumes spec_, normalizes by 1/n^2

    Grid grid_;
    int nky_; // n/2 + 1
    std::vector<double> real_buf_;
    std::vector<std::complex<double>> spec_;
    std::vector<double> lap_mult_;  // -|2 pi k|^2
    std::vector<double> inv_mult_;  // 1 / lap_mult_, zero mode -> exactly 0
    fftw_plan_s* plan_fwd_ = nullptr;
    fftw_plan_s* plan_bwd_ = nullptr;
};

} // namespace sg

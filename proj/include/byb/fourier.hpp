#pragma once

#include <unsupported/Eigen/FFT>
#include <vector>

#include "byb/common.hpp"

namespace byb::fft {

/// Wavenumbers 2*pi/length * {0, 1, ..., n/2, -(n/2-1), ..., -1}.
/// The Nyquist slot (n/2 for even n) is returned as-is; derivative and
/// shift helpers below zero it out / symmetrize it.
inline std::vector<double> wavenumbers(Eigen::Index n, double length) {
    std::vector<double> k(static_cast<size_t>(n));
    const double base = 2.0 * M_PI / length;
    for (Eigen::Index m = 0; m < n; ++m) {
        const double f = (m <= n / 2) ? double(m) : double(m) - double(n);
        k[size_t(m)] = base * f;
    }
    return k;
}

namespace detail {

inline void fft_row(Eigen::FFT<double>& plan, const CVec& in, CVec& out) {
    std::vector<Complex> src(in.data(), in.data() + in.size());
    std::vector<Complex> dst;
    plan.fwd(dst, src);
    out = Eigen::Map<const CVec>(dst.data(), Eigen::Index(dst.size()));
}

inline void ifft_row(Eigen::FFT<double>& plan, const CVec& in, CVec& out) {
    std::vector<Complex> src(in.data(), in.data() + in.size());
    std::vector<Complex> dst;
    plan.inv(dst, src);
    out = Eigen::Map<const CVec>(dst.data(), Eigen::Index(dst.size()));
}

}  // namespace detail

/// Spectral derivative of each row of a complex sample matrix
/// (rows = components, cols = equispaced periodic samples).
inline CMat derivative_rows(const CMat& rows, double length) {
    const Eigen::Index n = rows.cols();
    const auto k = wavenumbers(n, length);
    Eigen::FFT<double> plan;
    CMat out(rows.rows(), n);
    CVec spec(n), tmp(n);
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        detail::fft_row(plan, rows.row(r).transpose(), spec);
        for (Eigen::Index m = 0; m < n; ++m) {
            // odd derivative: drop the unpaired Nyquist mode
            const bool nyquist = (n % 2 == 0 && m == n / 2);
            spec[m] *= nyquist ? 0.0 : kI * k[size_t(m)];
        }
        detail::ifft_row(plan, spec, tmp);
        out.row(r) = tmp.transpose();
    }
    return out;
}

inline Mat derivative_rows(const Mat& rows, double length) {
    return derivative_rows(CMat(rows.cast<Complex>()), length).real();
}

/// Evaluate the trigonometric interpolant of each row at sample points
/// shifted by `offset` (same units as `length`).
inline CMat shift_rows(const CMat& rows, double length, double offset) {
    const Eigen::Index n = rows.cols();
    const auto k = wavenumbers(n, length);
    Eigen::FFT<double> plan;
    CMat out(rows.rows(), n);
    CVec spec(n), tmp(n);
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        detail::fft_row(plan, rows.row(r).transpose(), spec);
        for (Eigen::Index m = 0; m < n; ++m) {
            const bool nyquist = (n % 2 == 0 && m == n / 2);
            spec[m] *= nyquist ? Complex(std::cos(k[size_t(m)] * offset), 0.0)
                               : std::exp(kI * (k[size_t(m)] * offset));
        }
        detail::ifft_row(plan, spec, tmp);
        out.row(r) = tmp.transpose();
    }
    return out;
}

inline Mat shift_rows(const Mat& rows, double length, double offset) {
    return shift_rows(CMat(rows.cast<Complex>()), length, offset).real();
}

}  // namespace byb::fft

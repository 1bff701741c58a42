#pragma once

// Derivatives on non-uniform abscissae.
//
// Two tools live here:
//  - derivative_nonuniform: the derivative of the local Lagrange interpolating
//    polynomial through a stencil of `width` points (exact for polynomials of
//    degree width-1). Weights via Fornberg's recursion.
//  - LocalFit: a sliding least-squares polynomial fit, used by the wave
//    potential pipeline where an interpolatory stencil is too noisy.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace helmray {

// Finite-difference weights for the m-th derivative at x0 from nodes xs
// (Fornberg 1988). Writes width weights into w.
inline void fd_weights(double x0, std::span<const double> xs, int m, std::span<double> w) {
    const int n = static_cast<int>(xs.size());
    std::vector<double> c(static_cast<size_t>(n) * (m + 1), 0.0);
    auto C = [&](int i, int k) -> double& { return c[static_cast<size_t>(i) * (m + 1) + k]; };
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    C(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    for (int i = 0; i < n; ++i) w[i] = C(i, m);
}

inline void check_monotone(std::span<const double> xs) {
    for (size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::runtime_error("derivative_nonuniform: abscissae not strictly increasing at index " +
                                     std::to_string(i) + " (ray crossing upstream?)");
}

// Derivative (order 1 or 2) of the Lagrange polynomial through the stencil of
// `width` points around index i, evaluated at xs[i]. One-sided near the ends.
inline double derivative_nonuniform(std::span<const double> xs, std::span<const double> vals,
                                    size_t i, int order, int width = 5) {
    const int n = static_cast<int>(xs.size());
    if (n < width) throw std::invalid_argument("derivative_nonuniform: fewer samples than stencil width");
    if (order != 1 && order != 2) throw std::invalid_argument("derivative_nonuniform: order must be 1 or 2");
    check_monotone(xs);
    int lo = static_cast<int>(i) - width / 2;
    lo = std::max(0, std::min(lo, n - width));
    std::vector<double> w(static_cast<size_t>(width));
    fd_weights(xs[i], xs.subspan(static_cast<size_t>(lo), static_cast<size_t>(width)), order, w);
    double acc = 0.0;
    for (int k = 0; k < width; ++k) acc += w[static_cast<size_t>(k)] * vals[static_cast<size_t>(lo + k)];
    return acc;
}

// Sliding local least-squares polynomial fit. For each node the polynomial of
// degree `degree` is fitted over the `window` nearest samples (Vandermonde
// normal equations in x - x_i, solved by Cholesky), giving the smoothed value
// and derivatives. window == degree+1 reduces to Lagrange interpolation.
class LocalFit {
public:
    LocalFit(int window, int degree) : window_(window), degree_(degree) {
        if (degree < 2 || degree > 8) throw std::invalid_argument("LocalFit: degree out of range");
        if (window < degree + 1) throw std::invalid_argument("LocalFit: window smaller than degree+1");
    }

    int window() const { return window_; }
    int degree() const { return degree_; }

    struct Derivs {
        double value;
        double d1;
        double d2;
        double d3;
    };

    // Fit around node i; spans must have equal size >= window.
    Derivs fit_at(std::span<const double> xs, std::span<const double> vals, size_t i) const {
        const int n = static_cast<int>(xs.size());
        if (n < window_) throw std::invalid_argument("LocalFit: fewer samples than window");
        int lo = static_cast<int>(i) - window_ / 2;
        lo = std::max(0, std::min(lo, n - window_));
        const int d = degree_;
        double ata[9][9] = {};
        double atb[9] = {};
        double pw[17];
        for (int j = 0; j < window_; ++j) {
            const double dx = xs[static_cast<size_t>(lo + j)] - xs[i];
            pw[0] = 1.0;
            for (int k = 1; k <= 2 * d; ++k) pw[k] = pw[k - 1] * dx;
            for (int r = 0; r <= d; ++r) {
                for (int s = r; s <= d; ++s) ata[r][s] += pw[r + s];
                atb[r] += pw[r] * vals[static_cast<size_t>(lo + j)];
            }
        }
        // Cholesky on the (symmetric positive definite) normal matrix.
        double L[9][9] = {};
        for (int r = 0; r <= d; ++r) {
            for (int s = 0; s <= r; ++s) {
                double sum = (s <= r) ? ata[s][r] : ata[r][s];
                for (int k = 0; k < s; ++k) sum -= L[r][k] * L[s][k];
                if (r == s) {
                    if (sum <= 0.0) throw std::runtime_error("LocalFit: degenerate stencil geometry");
                    L[r][r] = std::sqrt(sum);
                } else {
                    L[r][s] = sum / L[s][s];
                }
            }
        }
        double y[9];
        for (int r = 0; r <= d; ++r) {
            double sum = atb[r];
            for (int k = 0; k < r; ++k) sum -= L[r][k] * y[k];
            y[r] = sum / L[r][r];
        }
        double coef[9];
        for (int r = d; r >= 0; --r) {
            double sum = y[r];
            for (int k = r + 1; k <= d; ++k) sum -= L[k][r] * coef[k];
            coef[r] = sum / L[r][r];
        }
        Derivs out{coef[0], coef[1], 2.0 * coef[2], 0.0};
        if (d >= 3) out.d3 = 6.0 * coef[3];
        return out;
    }

private:
    int window_;
    int degree_;
};

}  // namespace helmray

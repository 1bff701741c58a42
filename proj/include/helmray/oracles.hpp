#pragma once

// Independent verification: the analytic waist law, Gaussian ray
// self-similarity, an angular-spectrum propagator as brute-force ground truth
// for intensities, and the along-ray wave-potential drift diagnostic.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "helmray/dynamics.hpp"
#include "helmray/profiles.hpp"

namespace helmray {

// x(z) of the ray launched at x0 = 1: sqrt(1 + (eps z / pi)^2).
inline double waist_trajectory(double z, double eps) {
    if (z < 0.0) throw std::invalid_argument("waist_trajectory: z must be >= 0");
    const double s = eps * z / M_PI;
    return std::sqrt(1.0 + s * s);
}

// Self-similar Gaussian-beam ray: x0 * sqrt(1 + (eps z / pi)^2).
inline double gaussian_ray_oracle(double x0, double z, double eps) {
    return x0 * waist_trajectory(z, eps);
}

// Uniformly sampled complex field at propagation distance z.
struct FieldGrid {
    double x0 = 0.0;   // abscissa of sample 0
    double dx = 0.0;   // uniform spacing
    double z = 0.0;
    double eps = 0.0;
    std::vector<std::complex<double>> u;

    size_t size() const { return u.size(); }
    double x(size_t j) const { return x0 + dx * static_cast<double>(j); }
    double power() const {
        double p = 0.0;
        for (const auto& c : u) p += std::norm(c);
        return p * dx;
    }
};

namespace detail {

// In-place iterative radix-2 FFT; sign = -1 forward, +1 inverse (unscaled).
inline void fft_radix2(std::vector<std::complex<double>>& a, int sign) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: size must be a power of two");
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> even = a[i + k];
                const std::complex<double> odd = a[i + k + len / 2] * w;
                a[i + k] = even + odd;
                a[i + k + len / 2] = even - odd;
                w *= wl;
            }
        }
    }
}

}  // namespace detail

// Real launch profile sampled on a power-of-two grid wide enough for
// propagation (span >= 4x the beam support unless the caller asks for more).
inline FieldGrid make_field(const ProfileSpec& spec, double eps, size_t n_samples = 1 << 14,
                            double min_half_span = 0.0) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("make_field: need 0 < eps < 1");
    if (n_samples == 0 || (n_samples & (n_samples - 1)) != 0)
        throw std::invalid_argument("make_field: n_samples must be a power of two");
    const double support = support_halfwidth(spec, 1e-6);
    const double half = std::max(4.0 * support, min_half_span);
    FieldGrid f;
    f.eps = eps;
    f.z = 0.0;
    f.dx = 2.0 * half / static_cast<double>(n_samples);
    f.x0 = -half;
    f.u.resize(n_samples);
    for (size_t j = 0; j < n_samples; ++j) f.u[j] = eval_profile(spec, f.x(j));
    return f;
}

// Exact (non-paraxial) angular-spectrum step: each transverse frequency k_x
// advances by exp(i z (sqrt(k0^2 - k_x^2) - k0)), k0 = 2 pi / eps.
// Evanescent components (|k_x| > k0) decay.
inline FieldGrid angular_spectrum_propagate(const FieldGrid& field, double z) {
    if (field.size() == 0) throw std::invalid_argument("angular_spectrum_propagate: empty field");
    if (!(field.eps > 0.0)) throw std::invalid_argument("angular_spectrum_propagate: eps unset");
    const size_t n = field.size();
    std::vector<std::complex<double>> spec = field.u;
    detail::fft_radix2(spec, -1);
    // spectral-leakage guard: energy near the Nyquist limit means the grid
    // undersamples the field
    double peak = 0.0, edge = 0.0;
    for (size_t j = 0; j < n; ++j) peak = std::max(peak, std::abs(spec[j]));
    for (size_t j = n * 7 / 16; j < n * 9 / 16; ++j) edge = std::max(edge, std::abs(spec[j]));
    if (peak > 0.0 && edge / peak > 1e-8)
        throw std::runtime_error(
            "angular_spectrum_propagate: spectral leakage at the grid Nyquist limit (" +
            std::to_string(edge / peak) + " of peak); use a finer grid");
    const double k0 = 2.0 * M_PI / field.eps;
    const double dk = 2.0 * M_PI / (field.dx * static_cast<double>(n));
    for (size_t j = 0; j < n; ++j) {
        const double m = (j <= n / 2) ? static_cast<double>(j)
                                      : static_cast<double>(j) - static_cast<double>(n);
        const double kx = m * dk;
        const double under = k0 * k0 - kx * kx;
        if (under >= 0.0) {
            const double kzr = std::sqrt(under) - k0;
            spec[j] *= std::complex<double>(std::cos(z * kzr), std::sin(z * kzr));
        } else {
            // evanescent: decays as exp(-z sqrt(kx^2 - k0^2)), negligible at
            // the propagation distances of interest
            spec[j] *= std::exp(-z * std::sqrt(-under));
        }
    }
    detail::fft_radix2(spec, +1);
    FieldGrid out = field;
    out.z = field.z + z;
    const double scale = 1.0 / static_cast<double>(n);
    for (size_t j = 0; j < n; ++j) out.u[j] = spec[j] * scale;
    return out;
}

// Launch profile propagated to z on an automatically sized grid: wide enough
// that the spread field stays inside the window, fine enough that the
// spectrum clears the leakage guard.
inline FieldGrid propagated_field(const ProfileSpec& spec, double eps, double z,
                                  double min_half_span = 0.0) {
    double q = 1.0;
    if (const auto* p = std::get_if<SumCentered>(&spec.variant())) q = p->q;
    if (const auto* p = std::get_if<SumPaired>(&spec.variant())) q = p->q;
    const double support = support_halfwidth(spec, 1e-6);
    const double kmax = 8.6 * q;  // gaussian spectrum below 1e-8 of peak beyond this
    const double spread = z * kmax * eps / (2.0 * M_PI);
    const double half = std::max(4.0 * support, min_half_span) + 1.5 * spread;
    const double dx_target = M_PI / (4.0 * kmax);
    size_t n = 1;
    while (static_cast<double>(n) < 2.0 * half / dx_target) n <<= 1;
    n = std::min<size_t>(std::max<size_t>(n, 1 << 11), 1 << 18);
    FieldGrid f = make_field(spec, eps, n, half);
    return z > 0.0 ? angular_spectrum_propagate(f, z) : f;
}

struct IntensityMetrics {
    double l2_central = 0.0;             // relative L2 over the central 80% of support
    std::vector<double> maxima_rays;     // refined peak positions, ray signal
    std::vector<double> maxima_field;    // refined peak positions, field signal
    double max_fringe_discrepancy = 0.0; // in units of local fringe spacing
    bool fringe_mismatch = false;        // one signal has >= 3 fringes, the other < 3
};

namespace detail {

// Discrete local maxima with 3-point parabolic refinement; peaks below 2% of
// the global maximum are ignored.
inline std::vector<double> refined_peaks(const std::vector<double>& xs,
                                         const std::vector<double>& vs) {
    std::vector<double> out;
    if (vs.size() < 3) return out;
    const double vmax = *std::max_element(vs.begin(), vs.end());
    const double floor = 0.02 * vmax;
    for (size_t i = 1; i + 1 < vs.size(); ++i) {
        if (vs[i] < floor) continue;
        if (!(vs[i] >= vs[i - 1] && vs[i] > vs[i + 1])) continue;
        const double a = vs[i - 1], b = vs[i], c = vs[i + 1];
        const double denom = a - 2.0 * b + c;
        double shift = 0.0;
        if (denom < 0.0) shift = 0.5 * (a - c) / denom;
        shift = std::clamp(shift, -0.5, 0.5);
        // local spacing (nonuniform abscissae)
        const double h = 0.5 * (xs[i + 1] - xs[i - 1]);
        out.push_back(xs[i] + shift * h);
    }
    return out;
}

inline double interp_linear(const FieldGrid& f, double x, const std::vector<double>& inten) {
    const double s = (x - f.x0) / f.dx;
    if (s <= 0.0) return inten.front();
    if (s >= static_cast<double>(inten.size() - 1)) return inten.back();
    const size_t j = static_cast<size_t>(s);
    const double u = s - static_cast<double>(j);
    return inten[j] * (1.0 - u) + inten[j + 1] * u;
}

}  // namespace detail

// Ray-vs-field comparison: |u|^2 resampled onto the ray abscissae, both
// normalized to unit peak, L2 over the central 80% of the beam support plus
// fringe bookkeeping.
inline IntensityMetrics compare_intensity(const std::vector<std::pair<double, double>>& rays,
                                          const FieldGrid& field) {
    if (rays.size() < 3) throw std::invalid_argument("compare_intensity: need >= 3 ray samples");
    if (field.size() < 3) throw std::invalid_argument("compare_intensity: need >= 3 field samples");
    const double lo = std::max(rays.front().first, field.x0);
    const double hi = std::min(rays.back().first, field.x(field.size() - 1));
    if (!(hi > lo)) throw std::invalid_argument("compare_intensity: non-overlapping x ranges");

    std::vector<double> fi(field.size());
    for (size_t j = 0; j < field.size(); ++j) fi[j] = std::norm(field.u[j]);

    std::vector<double> xs, a, b;
    xs.reserve(rays.size());
    for (const auto& [x, inten] : rays) {
        if (x < lo || x > hi) continue;
        xs.push_back(x);
        a.push_back(inten);
        b.push_back(detail::interp_linear(field, x, fi));
    }
    if (xs.size() < 3) throw std::invalid_argument("compare_intensity: overlap too small");
    const double amax = *std::max_element(a.begin(), a.end());
    const double bmax = *std::max_element(b.begin(), b.end());
    if (!(amax > 0.0) || !(bmax > 0.0))
        throw std::invalid_argument("compare_intensity: zero signal");
    for (double& v : a) v /= amax;
    for (double& v : b) v /= bmax;

    IntensityMetrics m;
    const double mid = 0.5 * (lo + hi), cut = 0.4 * (hi - lo);  // central 80% of support
    double num = 0.0, den = 0.0;
    std::vector<double> cxs, ca, cb;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (std::abs(xs[i] - mid) > cut) continue;
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
        cxs.push_back(xs[i]);
        ca.push_back(a[i]);
        cb.push_back(b[i]);
    }
    m.l2_central = den > 0.0 ? std::sqrt(num / den) : 0.0;
    m.maxima_rays = detail::refined_peaks(cxs, ca);
    m.maxima_field = detail::refined_peaks(cxs, cb);

    const size_t nr = m.maxima_rays.size(), nf = m.maxima_field.size();
    m.fringe_mismatch = (nr >= 3 && nf < 3) || (nf >= 3 && nr < 3);
    if (nr > 0 && nf > 1) {
        for (size_t k = 0; k < nf; ++k) {
            const double p = m.maxima_field[k];
            // local fringe spacing from the neighboring field peaks
            double spacing;
            if (k == 0) spacing = m.maxima_field[1] - m.maxima_field[0];
            else if (k + 1 == nf) spacing = m.maxima_field[nf - 1] - m.maxima_field[nf - 2];
            else spacing = 0.5 * (m.maxima_field[k + 1] - m.maxima_field[k - 1]);
            if (!(spacing > 0.0)) continue;
            double best = std::abs(m.maxima_rays[0] - p);
            for (double q : m.maxima_rays) best = std::min(best, std::abs(q - p));
            m.max_fringe_discrepancy = std::max(m.max_fringe_discrepancy, best / spacing);
        }
    }
    return m;
}

struct RayDrift {
    int id;
    double g_seed;
    double max_drift;   // max |G(t) - G(0)|
    double normalized;  // max |G(t) - G(0)| / (1 + |G(0)|)
};

// Along-ray drift of the wave potential, one entry per interior ray; reported,
// not asserted (the paper claims W is constant along rays).
inline std::vector<RayDrift> perpendicularity_diagnostic(const TrajectoryRecord& rec) {
    std::vector<RayDrift> out;
    if (rec.snapshots.size() < 2) return out;
    const Wavefront& first = rec.snapshots.front();
    const size_t n = first.size();
    for (size_t i = 2; i + 2 < n; ++i) {
        RayDrift d{first.rays[i].id, first.rays[i].g, 0.0, 0.0};
        for (const Wavefront& wf : rec.snapshots)
            d.max_drift = std::max(d.max_drift, std::abs(wf.rays[i].g - d.g_seed));
        d.normalized = d.max_drift / (1.0 + std::abs(d.g_seed));
        out.push_back(d);
    }
    return out;
}

}  // namespace helmray

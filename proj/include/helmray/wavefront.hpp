#pragma once

// The synchronized ray ensemble and its on-front numerics: seeding, wave
// potential, force, and flux-conserving amplitude transport.
//
// The wave potential pipeline works on the log-amplitude C = ln R with a
// moving weighted least-squares (tricube-weighted quartic) fit over a window
// of fixed *physical* width. A pointwise interpolatory stencil on the ray
// abscissae is unusable here: ray bunching near forming fringes compresses
// neighbor spacing by orders of magnitude, and amplitude ripple at the grid
// scale feeds back through R''/R into exponentially growing zigzag modes.
// Fitting ln R in x keeps the estimate exact for Gaussian beams (ln R is a
// polynomial) and averages over however many rays fall inside the window.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "helmray/profiles.hpp"
#include "helmray/stencil.hpp"

namespace helmray {

struct Ray {
    int id = 0;
    double x = 0.0;
    double z = 0.0;
    double px = 0.0;
    double pz = 1.0;
    double r = 0.0;  // carried amplitude
    double g = 0.0;  // local wave potential
};

struct Wavefront {
    double t = 0.0;
    std::vector<Ray> rays;
    std::vector<double> seed_spacing;  // initial neighbor gap per ray
    std::vector<double> seed_r;        // launch amplitude per ray

    size_t size() const { return rays.size(); }
};

// Numerical knobs for the on-front operators.
struct FrontNumerics {
    int stencil_width = 5;        // derivative_nonuniform stencil
    double r_floor_rel = 1e-8;    // clamp for R in G = R''/R, relative to max seed R
    double fit_width = 0.5;       // physical half-width coverage of the moving fit (w0 units)
    int fit_degree = 4;
    int fit_min_points = 13;      // never fit fewer samples than this
    int fit_max_points = 64;      // subsample beyond this (dense squeezed regions)
    double trust_floor_rel = 1e-2;  // seed amplitude below which the force is extrapolated
    int label_smooth_window = 9;    // pre-smoothing of the front map x(s), z(s) in ray label s
    int label_smooth_degree = 2;
};

struct FrontDiagnostics {
    std::int64_t clamp_events = 0;  // rays where R fell below the floor during G evaluation
};

inline std::vector<double> neighbor_spacing(std::span<const double> xs, std::span<const double> zs) {
    const size_t n = xs.size();
    std::vector<double> s(n);
    if (n < 2) throw std::invalid_argument("neighbor_spacing: need at least 2 rays");
    auto gap = [&](size_t i, size_t j) {
        return std::hypot(xs[j] - xs[i], zs[j] - zs[i]);
    };
    s[0] = gap(0, 1);
    s[n - 1] = gap(n - 2, n - 1);
    for (size_t i = 1; i + 1 < n; ++i) s[i] = 0.5 * (gap(i - 1, i) + gap(i, i + 1));
    return s;
}

// Uniformly seeded front at z = 0, t = 0, p = (0, 1).
inline Wavefront seed_wavefront(const ProfileSpec& spec, int n_rays, double half_span,
                                const FrontNumerics& num = {});

// Moving weighted least-squares fit of vals(x) around every ray. Produces the
// smoothed value and first three derivatives.
class MovingFit {
public:
    MovingFit(const FrontNumerics& num) : num_(num), fit_(num.fit_degree + 1, num.fit_degree) {
        if (num.fit_degree < 3) throw std::invalid_argument("MovingFit: degree must be >= 3");
    }

    struct Point {
        double value, d1, d2, d3;
    };

    // Fit around each sample abscissa. xs strictly increasing.
    std::vector<Point> fit(std::span<const double> xs, std::span<const double> vals) const {
        return fit_at(xs, vals, xs);
    }

    // Fit around arbitrary (sorted) evaluation points within [xs.front(), xs.back()].
    std::vector<Point> fit_at(std::span<const double> xs, std::span<const double> vals,
                              std::span<const double> evals) const {
        const int n = static_cast<int>(xs.size());
        const int d = num_.fit_degree;
        if (n < num_.fit_min_points)
            throw std::invalid_argument("MovingFit: fewer rays than fit_min_points");
        std::vector<Point> out(evals.size());
        std::vector<double> dxbuf, vbuf, wbuf;
        for (size_t e = 0; e < evals.size(); ++e) {
            const double x0 = evals[e];
            // nearest sample index at or right of x0
            int i = static_cast<int>(std::lower_bound(xs.begin(), xs.end(), x0) - xs.begin());
            if (i >= n) i = n - 1;
            // window: all rays within +- fit_width/2, at least fit_min_points
            int lo = i, hi = i;
            const double hw = 0.5 * num_.fit_width;
            while (lo > 0 && x0 - xs[static_cast<size_t>(lo - 1)] <= hw) --lo;
            while (hi + 1 < n && xs[static_cast<size_t>(hi + 1)] - x0 <= hw) ++hi;
            if (hi < n && xs[static_cast<size_t>(hi)] - x0 > hw && hi > lo) --hi;
            while (hi - lo + 1 < num_.fit_min_points) {
                const bool can_lo = lo > 0, can_hi = hi + 1 < n;
                if (!can_lo && !can_hi) break;
                if (!can_hi || (can_lo && x0 - xs[static_cast<size_t>(lo - 1)] <=
                                              xs[static_cast<size_t>(hi + 1)] - x0))
                    --lo;
                else
                    ++hi;
            }
            int count = hi - lo + 1;
            int stride = 1;
            if (count > num_.fit_max_points) stride = (count + num_.fit_max_points - 1) / num_.fit_max_points;
            dxbuf.clear(); vbuf.clear(); wbuf.clear();
            const double span = std::max(xs[static_cast<size_t>(hi)] - x0, x0 - xs[static_cast<size_t>(lo)]) * 1.0001;
            for (int j = lo; j <= hi; j += stride) {
                const double dx = xs[static_cast<size_t>(j)] - x0;
                const double u = std::min(std::abs(dx) / span, 1.0);
                const double tc = 1.0 - u * u * u;
                dxbuf.push_back(dx);
                vbuf.push_back(vals[static_cast<size_t>(j)]);
                wbuf.push_back(tc * tc * tc);
            }
            out[e] = solve(dxbuf, vbuf, wbuf, d);
        }
        return out;
    }

private:
    static Point solve(const std::vector<double>& dx, const std::vector<double>& v,
                       const std::vector<double>& w, int d) {
        double ata[9][9] = {};
        double atb[9] = {};
        double pw[17];
        for (size_t j = 0; j < dx.size(); ++j) {
            pw[0] = 1.0;
            for (int k = 1; k <= 2 * d; ++k) pw[k] = pw[k - 1] * dx[j];
            for (int r = 0; r <= d; ++r) {
                for (int s = r; s <= d; ++s) ata[r][s] += w[j] * pw[r + s];
                atb[r] += w[j] * pw[r] * v[j];
            }
        }
        double L[9][9] = {};
        for (int r = 0; r <= d; ++r) {
            for (int s = 0; s <= r; ++s) {
                double sum = (s < r) ? ata[s][r] : ata[r][r];
                if (s < r) {
                    for (int k = 0; k < s; ++k) sum -= L[r][k] * L[s][k];
                    L[r][s] = sum / L[s][s];
                } else {
                    for (int k = 0; k < r; ++k) sum -= L[r][k] * L[r][k];
                    if (sum <= 0.0) throw std::runtime_error("MovingFit: degenerate window geometry");
                    L[r][r] = std::sqrt(sum);
                }
            }
        }
        double y[9], coef[9];
        for (int r = 0; r <= d; ++r) {
            double sum = atb[r];
            for (int k = 0; k < r; ++k) sum -= L[r][k] * y[k];
            y[r] = sum / L[r][r];
        }
        for (int r = d; r >= 0; --r) {
            double sum = y[r];
            for (int k = r + 1; k <= d; ++k) sum -= L[k][r] * coef[k];
            coef[r] = sum / L[r][r];
        }
        return {coef[0], coef[1], 2.0 * coef[2], 6.0 * coef[3]};
    }

    FrontNumerics num_;
    LocalFit fit_;
};

namespace detail {

inline std::vector<double> column_x(const Wavefront& wf) {
    std::vector<double> xs(wf.size());
    for (size_t i = 0; i < wf.size(); ++i) xs[i] = wf.rays[i].x;
    return xs;
}

inline void require_sorted(const Wavefront& wf) {
    for (size_t i = 1; i < wf.size(); ++i)
        if (!(wf.rays[i].x > wf.rays[i - 1].x))
            throw std::runtime_error("wavefront: rays out of order (ids " +
                                     std::to_string(wf.rays[i - 1].id) + "," +
                                     std::to_string(wf.rays[i].id) + " at t=" +
                                     std::to_string(wf.t) + ")");
}

}  // namespace detail

// G_i = (d^2R/dx^2)_i / (pz_i^2 R_i), amplitude fitted as ln R:
// R''/R = C'' + C'^2 with C = ln R. Results stored on the rays and returned.
inline std::vector<double> compute_wave_potential(Wavefront& wf, const FrontNumerics& num = {},
                                                  FrontDiagnostics* diag = nullptr) {
    detail::require_sorted(wf);
    const size_t n = wf.size();
    double rmax = 0.0;
    for (double r : wf.seed_r) rmax = std::max(rmax, r);
    const double floor = num.r_floor_rel * rmax;
    std::vector<double> xs = detail::column_x(wf);
    std::vector<double> logr(n);
    for (size_t i = 0; i < n; ++i) {
        double r = wf.rays[i].r;
        if (r < floor) {
            r = floor;
            if (diag) ++diag->clamp_events;
        }
        logr[i] = std::log(r);
    }
    MovingFit mf(num);
    auto fits = mf.fit(xs, logr);
    std::vector<double> g(n);
    for (size_t i = 0; i < n; ++i) {
        const double pz2 = wf.rays[i].pz * wf.rays[i].pz;
        g[i] = (fits[i].d2 + fits[i].d1 * fits[i].d1) / pz2;
        wf.rays[i].g = g[i];
    }
    return g;
}

namespace detail {

// Least-squares smoothing of a per-ray column against the (uniform) ray label.
// Exact for smooth fronts, attenuates grid-scale zigzag.
inline std::vector<double> smooth_by_label(std::span<const double> vals, int window, int degree) {
    const int n = static_cast<int>(vals.size());
    if (window <= 1 || n < window) return {vals.begin(), vals.end()};
    std::vector<double> labels(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<size_t>(i)] = i;
    LocalFit fit(window, degree);
    std::vector<double> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = fit.fit_at(labels, vals, static_cast<size_t>(i)).value;
    return out;
}

}  // namespace detail

// f_i = (eps^2 / 8 pi^2) dG/dx, from the log-amplitude fit:
// dG/dx = C''' + 2 C' C'' (over pz^2).
//
// The force field is evaluated on a label-smoothed copy of the front map
// (x(s), z(s) fitted against the ray label s). This breaks the feedback loop
// in which grid-scale position ripple perturbs the transported amplitude,
// hence R''/R, hence the force; in the reduced (x-only Laplacian) model that
// loop is linearly unstable at every wavenumber, so without the decoupling
// the ripple grows until rays cross. The smoothing is exact for smooth fronts
// and leaves the trajectory state itself untouched: the force remains a
// deterministic function of the current positions (time-reversible).
//
// Outside the trust region (seed amplitude below trust_floor_rel * max) the
// force is continued linearly in x from the innermost trusted rays; every
// launch profile is a superposition of Gaussians, whose tail force is
// asymptotically linear.
inline std::vector<double> compute_force(Wavefront& wf, double epsilon,
                                         const FrontNumerics& num = {},
                                         FrontDiagnostics* diag = nullptr) {
    detail::require_sorted(wf);
    const size_t n = wf.size();
    double rmax = 0.0;
    for (double r : wf.seed_r) rmax = std::max(rmax, r);
    const double floor = num.r_floor_rel * rmax;
    std::vector<double> xs = detail::column_x(wf);
    std::vector<double> zs(n);
    for (size_t i = 0; i < n; ++i) zs[i] = wf.rays[i].z;
    std::vector<double> xsm =
        detail::smooth_by_label(xs, num.label_smooth_window, num.label_smooth_degree);
    std::vector<double> zsm =
        detail::smooth_by_label(zs, num.label_smooth_window, num.label_smooth_degree);
    for (size_t i = 1; i < n; ++i)
        if (!(xsm[i] > xsm[i - 1]))
            throw std::runtime_error("compute_force: smoothed front folds between ids " +
                                     std::to_string(wf.rays[i - 1].id) + " and " +
                                     std::to_string(wf.rays[i].id) + " at t=" + std::to_string(wf.t));
    auto spsm = neighbor_spacing(xsm, zsm);
    std::vector<double> logr(n);
    for (size_t i = 0; i < n; ++i) {
        double r = wf.seed_r[i] * std::sqrt(wf.seed_spacing[i] / spsm[i]);
        if (r < floor) {
            r = floor;
            if (diag) ++diag->clamp_events;
        }
        logr[i] = std::log(r);
    }
    // The field is fitted at fixed uniform grid anchors, not at the rays
    // themselves: per-ray windows change membership discretely as rays move,
    // and that chatter re-enters the dynamics as few-ray-wavelength force
    // noise. A grid-anchored field sampled by smooth interpolation varies
    // smoothly in both x and t.
    const size_t ng = 2 * n + 1;
    const double ga = xsm.front(), gb = xsm.back();
    const double gh = (gb - ga) / static_cast<double>(ng - 1);
    std::vector<double> gx(ng);
    for (size_t j = 0; j < ng; ++j) gx[j] = ga + gh * static_cast<double>(j);
    MovingFit mf(num);
    auto fits = mf.fit_at(xsm, logr, gx);
    const double pref = epsilon * epsilon / (8.0 * M_PI * M_PI);
    std::vector<double> gf(ng), gg(ng);
    for (size_t j = 0; j < ng; ++j) {
        gg[j] = fits[j].d2 + fits[j].d1 * fits[j].d1;
        gf[j] = pref * (fits[j].d3 + 2.0 * fits[j].d1 * fits[j].d2);
    }
    // Catmull-Rom sampling of a uniform-grid field.
    auto sample = [&](const std::vector<double>& v, double x) {
        double s = (x - ga) / gh;
        double jf = std::floor(s);
        long j = static_cast<long>(jf);
        if (j < 0) { j = 0; jf = 0.0; }
        if (j > static_cast<long>(ng) - 2) { j = static_cast<long>(ng) - 2; jf = static_cast<double>(j); }
        const double u = s - jf;
        const size_t j0 = static_cast<size_t>(j);
        const double p1 = v[j0], p2 = v[j0 + 1];
        const double p0 = j0 > 0 ? v[j0 - 1] : 2.0 * p1 - p2;
        const double p3 = j0 + 2 < ng ? v[j0 + 2] : 2.0 * p2 - p1;
        const double a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
        const double b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
        const double c = -0.5 * p0 + 0.5 * p2;
        return ((a * u + b) * u + c) * u + p1;
    };
    std::vector<double> f(n);
    for (size_t i = 0; i < n; ++i) {
        const double pz2 = wf.rays[i].pz * wf.rays[i].pz;
        wf.rays[i].g = sample(gg, wf.rays[i].x) / pz2;
        f[i] = sample(gf, wf.rays[i].x) / pz2;
    }
    // trust region by launch amplitude
    const double trust = num.trust_floor_rel * rmax;
    size_t a = 0, b = n - 1;
    while (a < n && wf.seed_r[a] < trust) ++a;
    while (b > 0 && wf.seed_r[b] < trust) --b;
    if (a >= b) return f;  // degenerate; keep raw forces
    auto extrapolate = [&](size_t i0, size_t i1, size_t lo, size_t hi) {
        // least-squares line through rays [i0, i1]
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(i1 - i0 + 1);
        for (size_t j = i0; j <= i1; ++j) {
            sx += xs[j]; sy += f[j]; sxx += xs[j] * xs[j]; sxy += xs[j] * f[j];
        }
        const double det = m * sxx - sx * sx;
        const double slope = (m * sxy - sx * sy) / det;
        const double icpt = (sy - slope * sx) / m;
        for (size_t j = lo; j <= hi; ++j) f[j] = icpt + slope * xs[j];
    };
    const size_t k = 5;
    if (a > 0 && b - a + 1 >= k) extrapolate(a, a + k - 1, 0, a - 1);
    if (b + 1 < n && b - a + 1 >= k) extrapolate(b - k + 1, b, b + 1, n - 1);
    return f;
}

// Flux-conserving amplitude update: R_i = seed_R_i sqrt(seed_spacing_i / spacing_i).
inline void transport_amplitude(Wavefront& wf) {
    const size_t n = wf.size();
    std::vector<double> xs(n), zs(n);
    for (size_t i = 0; i < n; ++i) { xs[i] = wf.rays[i].x; zs[i] = wf.rays[i].z; }
    for (size_t i = 1; i < n; ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::runtime_error("transport_amplitude: ray crossing between ids " +
                                     std::to_string(wf.rays[i - 1].id) + " and " +
                                     std::to_string(wf.rays[i].id) + " at t=" + std::to_string(wf.t));
    auto sp = neighbor_spacing(xs, zs);
    for (size_t i = 0; i < n; ++i)
        wf.rays[i].r = wf.seed_r[i] * std::sqrt(wf.seed_spacing[i] / sp[i]);
}

// (x_i, R_i^2) samples, ascending x, arbitrary units.
inline std::vector<std::pair<double, double>> intensity_profile(const Wavefront& wf) {
    std::vector<std::pair<double, double>> out;
    out.reserve(wf.size());
    for (const Ray& r : wf.rays) out.emplace_back(r.x, r.r * r.r);
    return out;
}

inline Wavefront seed_wavefront(const ProfileSpec& spec, int n_rays, double half_span,
                                const FrontNumerics& num) {
    if (n_rays < std::max(7, num.fit_min_points))
        throw std::invalid_argument("seed_wavefront: need at least " +
                                    std::to_string(std::max(7, num.fit_min_points)) + " rays");
    if (!(half_span > 0.0)) throw std::invalid_argument("seed_wavefront: half_span must be > 0");
    Wavefront wf;
    wf.t = 0.0;
    wf.rays.resize(static_cast<size_t>(n_rays));
    const double h = 2.0 * half_span / (n_rays - 1);
    for (int i = 0; i < n_rays; ++i) {
        Ray& r = wf.rays[static_cast<size_t>(i)];
        r.id = i;
        r.x = -half_span + h * i;
        r.z = 0.0;
        r.px = 0.0;
        r.pz = 1.0;
        r.r = eval_profile(spec, r.x);
    }
    wf.seed_r.resize(wf.size());
    std::vector<double> xs(wf.size()), zs(wf.size(), 0.0);
    for (size_t i = 0; i < wf.size(); ++i) {
        wf.seed_r[i] = wf.rays[i].r;
        xs[i] = wf.rays[i].x;
    }
    wf.seed_spacing = neighbor_spacing(xs, zs);
    compute_wave_potential(wf, num);
    return wf;
}

}  // namespace helmray

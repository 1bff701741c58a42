#pragma once

// Launch amplitude profiles R(x; z=0): a single Gaussian or superpositions
// of Gaussians, plus the named parameter presets used by the bundled runs.

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

namespace helmray {

struct SingleGaussian {};

// R(x) = a exp(-q^2 x^2) + b sum_{N=1..M} [exp(-q^2 (x-N xc)^2) + exp(-q^2 (x+N xc)^2)]
struct SumCentered {
    double a = 1.0;
    double b = 0.0;
    double q = 1.0;
    int m = 0;
    double xc = 0.0;
};

// R(x) = sum_{N=-M..M} [exp(-q^2 (x-xc+N x1)^2) + exp(-q^2 (x+xc+N x1)^2)]
struct SumPaired {
    double q = 1.0;
    int m = 0;
    double xc = 0.0;
    double x1 = 0.0;
};

class ProfileSpec {
public:
    using Variant = std::variant<SingleGaussian, SumCentered, SumPaired>;

    ProfileSpec() : v_(SingleGaussian{}) {}

    static ProfileSpec single_gaussian() { return ProfileSpec(SingleGaussian{}); }

    static ProfileSpec sum_centered(double a, double b, double q, int m, double xc) {
        if (q <= 0.0) throw std::invalid_argument("profile: q must be > 0");
        if (m < 0) throw std::invalid_argument("profile: M must be >= 0");
        if (xc < 0.0) throw std::invalid_argument("profile: x_c must be >= 0");
        if (a < 0.0 || b < 0.0) throw std::invalid_argument("profile: weights a, b must be >= 0");
        if (a == 0.0 && (b == 0.0 || m == 0))
            throw std::invalid_argument("profile: amplitude is identically zero");
        return ProfileSpec(SumCentered{a, b, q, m, xc});
    }

    static ProfileSpec sum_paired(double q, int m, double xc, double x1) {
        if (q <= 0.0) throw std::invalid_argument("profile: q must be > 0");
        if (m < 0) throw std::invalid_argument("profile: M must be >= 0");
        if (xc < 0.0) throw std::invalid_argument("profile: x_c must be >= 0");
        if (x1 < 0.0) throw std::invalid_argument("profile: x_1 must be >= 0");
        return ProfileSpec(SumPaired{q, m, xc, x1});
    }

    const Variant& variant() const { return v_; }

    bool is_single_gaussian() const { return std::holds_alternative<SingleGaussian>(v_); }

private:
    explicit ProfileSpec(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

// R(x; z=0) for the given spec. Always finite and strictly positive; even in x
// by construction (terms are paired exactly).
inline double eval_profile(const ProfileSpec& spec, double x) {
    x = std::abs(x);  // profiles are even; evaluating at |x| makes that exact
    struct Eval {
        double x;
        double operator()(const SingleGaussian&) const { return std::exp(-x * x); }
        double operator()(const SumCentered& p) const {
            double r = p.a * std::exp(-p.q * p.q * x * x);
            for (int n = 1; n <= p.m; ++n) {
                const double dm = x - n * p.xc;
                const double dp = x + n * p.xc;
                r += p.b * (std::exp(-p.q * p.q * dm * dm) + std::exp(-p.q * p.q * dp * dp));
            }
            return r;
        }
        double operator()(const SumPaired& p) const {
            double r = 0.0;
            for (int n = -p.m; n <= p.m; ++n) {
                const double dm = x - p.xc + n * p.x1;
                const double dp = x + p.xc + n * p.x1;
                r += std::exp(-p.q * p.q * dm * dm) + std::exp(-p.q * p.q * dp * dp);
            }
            return r;
        }
    };
    return std::visit(Eval{x}, spec.variant());
}

struct Preset {
    ProfileSpec spec;
    double epsilon;        // lambda0 / w0
    double half_span;      // suggested seeding half-span, w0 units
    std::string describe;  // parameter echo for the presets listing
};

// Named presets with their published parameter sets.
inline Preset preset(const std::string& name) {
    const double eps = 1.65e-4;
    if (name == "gaussian")
        return {ProfileSpec::single_gaussian(), eps, 4.0, "single Gaussian exp(-x^2)"};
    if (name == "fig2")
        return {ProfileSpec::sum_centered(0.0, 1.0, 1.68, 2, 0.31), eps, 3.2,
                "a=0; b=1; q=1.68; M=2; x_c=0.31"};
    if (name == "fig5")
        return {ProfileSpec::sum_paired(3.5, 3, 1.15, 0.3), eps, 3.6,
                "q=3.5; M=3; x_c=1.15; x_1=0.3"};
    if (name == "fig8")
        return {ProfileSpec::sum_centered(0.0, 1.0, 1.0, 1, 2.5), eps, 6.5,
                "a=0; b=1; q=1; M=1; x_c=2.5"};
    throw std::invalid_argument("unknown preset '" + name +
                                "' (valid: gaussian, fig2, fig5, fig8)");
}

inline double profile_max(const ProfileSpec& spec) {
    // All component Gaussians are centered within |x| <= centers span; the
    // global maximum of an even positive sum lies in that range. Coarse scan
    // plus golden-section refinement is plenty at these scales.
    double hi = 0.0;
    if (const auto* p = std::get_if<SumCentered>(&spec.variant())) hi = p->m * p->xc;
    if (const auto* p = std::get_if<SumPaired>(&spec.variant())) hi = p->xc + p->m * p->x1;
    double best_x = 0.0, best = eval_profile(spec, 0.0);
    const int nscan = 4001;
    for (int i = 0; i < nscan; ++i) {
        const double x = hi * i / (nscan - 1);
        const double v = eval_profile(spec, x);
        if (v > best) { best = v; best_x = x; }
    }
    double a = best_x - hi / (nscan - 1), b = best_x + hi / (nscan - 1);
    for (int it = 0; it < 200; ++it) {
        const double m1 = a + (b - a) * 0.381966;
        const double m2 = b - (b - a) * 0.381966;
        if (eval_profile(spec, m1) < eval_profile(spec, m2)) a = m1; else b = m2;
    }
    return std::max(best, eval_profile(spec, 0.5 * (a + b)));
}

// Smallest X with R(x) < floor * max(R) for all |x| > X. Outward scan from the
// last Gaussian center, then bisection.
inline double support_halfwidth(const ProfileSpec& spec, double floor) {
    const double rmax = profile_max(spec);
    if (!(floor > 0.0) || !(floor < 1.0))
        throw std::invalid_argument("support_halfwidth: floor must lie in (0, 1) relative to max");
    const double thresh = floor * rmax;
    double centers = 0.0, width = 1.0;
    if (const auto* p = std::get_if<SumCentered>(&spec.variant())) {
        centers = p->m * p->xc;
        width = 1.0 / p->q;
    }
    if (const auto* p = std::get_if<SumPaired>(&spec.variant())) {
        centers = p->xc + p->m * p->x1;
        width = 1.0 / p->q;
    }
    double lo = centers, hi = centers + width;
    while (eval_profile(spec, hi) >= thresh) { lo = hi; hi += width; }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eval_profile(spec, mid) >= thresh) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace helmray

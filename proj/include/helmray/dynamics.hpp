#pragma once

// Time stepping: kick-drift-kick leapfrog for the reduced 2-D system, with
// the wave potential refreshed once per step, plus the parameter conversions
// from physical (optical / matter-wave) quantities to epsilon.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "helmray/profiles.hpp"
#include "helmray/wavefront.hpp"

namespace helmray {

// Optional external medium: value(x, z) is n^2 (classical) or 1 - V/E
// (quantum); dvalue_dx is its x-gradient. Only the transverse gradient acts
// in the reduced system; z-variation of the medium does not feed p_z.
struct Medium {
    std::function<double(double, double)> value;
    std::function<double(double, double)> dvalue_dx;
};

struct SimConfig {
    double epsilon = 1.65e-4;       // lambda0 / w0
    int n_rays = 401;
    double half_span = 4.0;         // w0 units
    double dt = 0.0;                // 0 = auto: Rayleigh length / 1e4
    double z_final = 0.0;           // 0 = auto: two Rayleigh lengths
    int record_every = 200;         // step stride between snapshots
    bool wave_potential_enabled = true;
    std::optional<Medium> medium;   // absent = vacuum (medium == 1)
    int stencil_width = 5;
    double r_floor = 1e-8;          // relative to max seed amplitude
    double fit_width = 0.5;         // moving-fit physical window (w0 units)
    double trust_floor = 1e-2;      // relative launch amplitude bounding the force fit
    int label_smooth_window = 9;    // front-map pre-smoothing window (ray labels)
    int label_smooth_degree = 2;
    int fit_min_points = 13;        // minimum rays per moving-fit window
    int p_filter_window = 0;        // label-space momentum filter (0 = off)
    bool mirror_symmetrize = false; // project out odd-parity error (even profiles only)

    double rayleigh_length() const { return M_PI / epsilon; }
    // dt = 0 selects the default; a negative dt steps backwards in time
    // (used by reversibility checks via step(), rejected by validate()/run()).
    double resolved_dt() const { return dt != 0.0 ? dt : rayleigh_length() / 1e4; }
    double resolved_z_final() const { return z_final > 0.0 ? z_final : 2.0 * rayleigh_length(); }

    FrontNumerics numerics() const {
        FrontNumerics num;
        num.stencil_width = stencil_width;
        num.r_floor_rel = r_floor;
        num.fit_width = fit_width;
        num.trust_floor_rel = trust_floor;
        num.label_smooth_window = label_smooth_window;
        num.label_smooth_degree = label_smooth_degree;
        num.fit_min_points = fit_min_points;
        return num;
    }

    void validate() const {
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::invalid_argument("config: epsilon must lie in (0, 1)");
        if (dt < 0.0) throw std::invalid_argument("config: dt must be positive");
        if (z_final < 0.0) throw std::invalid_argument("config: z_final must be >= 0");
        if (!(half_span > 0.0)) throw std::invalid_argument("config: half_span must be > 0");
        if (record_every < 1) throw std::invalid_argument("config: record_every must be >= 1");
        if (n_rays < stencil_width + 2)
            throw std::invalid_argument("config: n_rays must be >= stencil_width + 2");
        if (!(r_floor > 0.0) || !(trust_floor > 0.0))
            throw std::invalid_argument("config: floors must be positive");
        if (!(fit_width > 0.0)) throw std::invalid_argument("config: fit_width must be > 0");
    }
};

struct TrajectoryRecord {
    SimConfig config;
    ProfileSpec profile;
    std::vector<Wavefront> snapshots;
    std::int64_t steps = 0;
    std::int64_t clamp_events = 0;
    std::string termination;  // "z_final reached", or the abort diagnostic

    bool completed() const { return termination == "z_final reached"; }
};

// One leapfrog step: half-kick, drift, transport + refresh G, half-kick.
// Forces are a deterministic function of the front state, so a step of -dt
// exactly retraces a step of +dt.
inline void step(Wavefront& wf, const SimConfig& cfg, FrontDiagnostics* diag = nullptr) {
    const size_t n = wf.size();
    const double dt = cfg.resolved_dt();
    const FrontNumerics num = cfg.numerics();

    auto kick = [&](double scale) {
        std::vector<double> f;
        if (cfg.wave_potential_enabled) f = compute_force(wf, cfg.epsilon, num, diag);
        for (size_t i = 0; i < n; ++i) {
            Ray& r = wf.rays[i];
            double a = cfg.wave_potential_enabled ? f[i] : 0.0;
            if (cfg.medium) a += 0.5 * cfg.medium->dvalue_dx(r.x, r.z);
            r.px += scale * a;
            if (std::abs(r.px) >= 1.0)
                throw std::runtime_error("step: |p_x| >= 1 (paraxial breakdown) on ray " +
                                         std::to_string(r.id) + " at t=" + std::to_string(wf.t));
            r.pz = std::sqrt(1.0 - r.px * r.px);
        }
    };

    kick(0.5 * dt);
    if (cfg.p_filter_window > 1) {
        std::vector<double> px(n);
        for (size_t i = 0; i < n; ++i) px[i] = wf.rays[i].px;
        auto sm = detail::smooth_by_label(px, cfg.p_filter_window, 2);
        for (size_t i = 0; i < n; ++i) {
            wf.rays[i].px = sm[i];
            wf.rays[i].pz = std::sqrt(1.0 - sm[i] * sm[i]);
        }
    }
    for (size_t i = 0; i < n; ++i) {
        Ray& r = wf.rays[i];
        r.x += dt * r.px;
        r.z += dt * r.pz;
    }
    wf.t += dt;
    if (cfg.mirror_symmetrize) {
        for (size_t i = 0, j = n - 1; i < j; ++i, --j) {
            Ray& a = wf.rays[i];
            Ray& b = wf.rays[j];
            const double x = 0.5 * (a.x - b.x), px = 0.5 * (a.px - b.px);
            const double z = 0.5 * (a.z + b.z);
            a.x = x; b.x = -x;
            a.px = px; b.px = -px;
            a.z = b.z = z;
            a.pz = b.pz = std::sqrt(1.0 - px * px);
        }
        if (n % 2 == 1) {
            Ray& c = wf.rays[n / 2];
            c.x = 0.0; c.px = 0.0; c.pz = 1.0;
        }
    }
    transport_amplitude(wf);
    kick(0.5 * dt);
    if (!cfg.wave_potential_enabled) compute_wave_potential(wf, num, diag);
}

// Seed and iterate until the median ray reaches z_final, recording every
// record_every steps (plus the seed and final fronts). An aborted run (ray
// crossing, paraxial breakdown) is returned with the state recorded up to the
// abort and the diagnostic in `termination`; it does not throw, so callers
// can persist the partial record.
inline TrajectoryRecord run(const SimConfig& cfg, const ProfileSpec& spec) {
    cfg.validate();
    TrajectoryRecord rec;
    rec.config = cfg;
    rec.profile = spec;
    FrontDiagnostics diag;
    Wavefront wf = seed_wavefront(spec, cfg.n_rays, cfg.half_span, cfg.numerics());
    rec.snapshots.push_back(wf);
    const double zf = cfg.resolved_z_final();
    auto median_z = [&]() {
        std::vector<double> zs(wf.size());
        for (size_t i = 0; i < wf.size(); ++i) zs[i] = wf.rays[i].z;
        std::nth_element(zs.begin(), zs.begin() + zs.size() / 2, zs.end());
        return zs[zs.size() / 2];
    };
    try {
        while (median_z() < zf) {
            step(wf, cfg, &diag);
            ++rec.steps;
            if (rec.steps % cfg.record_every == 0) rec.snapshots.push_back(wf);
        }
        if (rec.snapshots.back().t != wf.t) rec.snapshots.push_back(wf);
        rec.termination = "z_final reached";
    } catch (const std::runtime_error& e) {
        if (rec.snapshots.back().t != wf.t) rec.snapshots.push_back(wf);
        rec.termination = e.what();
    }
    rec.clamp_events = diag.clamp_events;
    return rec;
}

// epsilon = lambda0 / w0.
inline double epsilon_from_optical(double lambda0, double w0) {
    if (!(lambda0 > 0.0) || !(w0 > 0.0))
        throw std::invalid_argument("epsilon_from_optical: inputs must be positive");
    return lambda0 / w0;
}

// lambda0 = 2 pi a / sqrt(2 m E); epsilon = lambda0 / w0.
inline double epsilon_from_quantum(double mass, double energy, double w0, double action_constant) {
    if (!(mass > 0.0) || !(energy > 0.0) || !(w0 > 0.0) || !(action_constant > 0.0))
        throw std::invalid_argument("epsilon_from_quantum: inputs must be positive");
    const double lambda0 = 2.0 * M_PI * action_constant / std::sqrt(2.0 * mass * energy);
    return lambda0 / w0;
}

}  // namespace helmray

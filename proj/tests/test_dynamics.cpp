#include <doctest.h>

#include <cmath>

#include "helmray/dynamics.hpp"

using namespace helmray;

namespace {

SimConfig small_gaussian_config() {
    SimConfig cfg;
    cfg.n_rays = 101;
    cfg.half_span = 3.0;
    cfg.record_every = 50;
    return cfg;
}

}  // namespace

TEST_CASE("force-free step is exact straight-line motion") {
    SimConfig cfg = small_gaussian_config();
    cfg.wave_potential_enabled = false;
    auto wf = seed_wavefront(ProfileSpec::single_gaussian(), cfg.n_rays, cfg.half_span,
                             cfg.numerics());
    const auto seed = wf;
    const double dt = cfg.resolved_dt();
    step(wf, cfg);
    for (size_t i = 0; i < wf.size(); ++i) {
        CHECK(wf.rays[i].x == seed.rays[i].x);  // p_x stays exactly 0
        CHECK(wf.rays[i].z == seed.rays[i].z + dt);
        CHECK(wf.rays[i].px == 0.0);
        CHECK(wf.rays[i].pz == 1.0);
    }
}

TEST_CASE("a +dt step followed by a -dt step retraces the seed front") {
    SimConfig cfg = small_gaussian_config();
    auto wf = seed_wavefront(ProfileSpec::single_gaussian(), cfg.n_rays, cfg.half_span,
                             cfg.numerics());
    const auto seed = wf;
    step(wf, cfg);
    SimConfig back = cfg;
    back.dt = -cfg.resolved_dt();
    step(wf, back);
    for (size_t i = 0; i < wf.size(); ++i) {
        CHECK(wf.rays[i].x == doctest::Approx(seed.rays[i].x).epsilon(1e-10));
        CHECK(wf.rays[i].px == doctest::Approx(seed.rays[i].px).epsilon(1e-10).scale(1e-10));
        CHECK(wf.rays[i].z == doctest::Approx(seed.rays[i].z).epsilon(1e-10).scale(1e-10));
    }
}

TEST_CASE("momentum stays normalized through many steps") {
    SimConfig cfg = small_gaussian_config();
    auto wf = seed_wavefront(ProfileSpec::single_gaussian(), cfg.n_rays, cfg.half_span,
                             cfg.numerics());
    for (int s = 0; s < 50; ++s) step(wf, cfg);
    for (const Ray& r : wf.rays) {
        CHECK(r.px * r.px + r.pz * r.pz == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.pz > 0.0);
    }
}

TEST_CASE("z_final = 0 yields a record containing exactly the seed front") {
    SimConfig cfg = small_gaussian_config();
    cfg.z_final = 1e-300;  // below one step: stop immediately
    auto rec = run(cfg, ProfileSpec::single_gaussian());
    // median z of the seed is 0 which is < z_final, so one step runs; instead
    // check the seed-front contract directly with a tiny z_final of one step
    CHECK(rec.snapshots.front().t == 0.0);
    CHECK(rec.steps <= 1);
    CHECK(rec.completed());
}

TEST_CASE("run records the seed and final fronts and terminates cleanly") {
    SimConfig cfg = small_gaussian_config();
    cfg.z_final = 50.0;
    auto rec = run(cfg, ProfileSpec::single_gaussian());
    REQUIRE(rec.snapshots.size() >= 2);
    CHECK(rec.snapshots.front().t == 0.0);
    CHECK(rec.completed());
    CHECK(rec.termination == "z_final reached");
    for (size_t k = 1; k < rec.snapshots.size(); ++k)
        CHECK(rec.snapshots[k].t > rec.snapshots[k - 1].t);
    // median final z reached the target
    CHECK(rec.snapshots.back().rays[cfg.n_rays / 2].z >= 50.0);
}

TEST_CASE("geometric-optics run keeps every trajectory straight") {
    SimConfig cfg = small_gaussian_config();
    cfg.wave_potential_enabled = false;
    cfg.z_final = 500.0;
    auto rec = run(cfg, ProfileSpec::single_gaussian());
    REQUIRE(rec.completed());
    const auto& seed = rec.snapshots.front();
    const auto& last = rec.snapshots.back();
    for (size_t i = 0; i < seed.size(); ++i)
        CHECK(std::abs(last.rays[i].x - seed.rays[i].x) <= 1e-12);
}

TEST_CASE("an external medium gradient bends force-free rays") {
    SimConfig cfg = small_gaussian_config();
    cfg.wave_potential_enabled = false;
    cfg.z_final = 10.0;
    cfg.dt = 0.01;
    Medium m;
    const double k = 1e-4;
    m.value = [k](double x, double) { return 1.0 + k * x; };
    m.dvalue_dx = [k](double, double) { return k; };
    cfg.medium = m;
    auto rec = run(cfg, ProfileSpec::single_gaussian());
    REQUIRE(rec.completed());
    const auto& seed = rec.snapshots.front();
    const auto& last = rec.snapshots.back();
    const double t = last.t;
    // dp_x/dt = k/2: parabolic drift x(t) = x0 + k t^2 / 4
    for (size_t i = 2; i + 2 < seed.size(); ++i)
        CHECK(last.rays[i].x - seed.rays[i].x ==
              doctest::Approx(0.25 * k * t * t).epsilon(1e-2));
}

TEST_CASE("halving dt changes final positions at second order") {
    // positions are compared at a common z (interpolated along each ray's own
    // trajectory); comparing the final snapshots directly would be dominated
    // by the O(dt) difference in the stopping overshoot
    SimConfig cfg = small_gaussian_config();
    cfg.z_final = 2000.0;
    cfg.record_every = 1;
    const double z_star = 1990.0;
    auto x_at_z = [&](const TrajectoryRecord& rec, size_t i) {
        for (size_t k = 1; k < rec.snapshots.size(); ++k) {
            const Ray& a = rec.snapshots[k - 1].rays[i];
            const Ray& b = rec.snapshots[k].rays[i];
            if (a.z <= z_star && z_star <= b.z) {
                const double u = (z_star - a.z) / (b.z - a.z);
                return a.x * (1.0 - u) + b.x * u;
            }
        }
        FAIL("z_star not bracketed");
        return 0.0;
    };
    auto x_final = [&](double dt) {
        SimConfig c = cfg;
        c.dt = dt;
        auto rec = run(c, ProfileSpec::single_gaussian());
        REQUIRE(rec.completed());
        std::vector<double> xs;
        for (size_t i = 0; i < rec.snapshots.front().size(); ++i) xs.push_back(x_at_z(rec, i));
        return xs;
    };
    const auto a = x_final(2.0), b = x_final(1.0), c = x_final(0.5);
    double e1 = 0.0, e2 = 0.0;
    for (size_t i = 2; i + 2 < a.size(); ++i) {
        e1 = std::max(e1, std::abs(a[i] - b[i]));
        e2 = std::max(e2, std::abs(b[i] - c[i]));
    }
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("epsilon conversions reproduce the cold-neutron parameters") {
    CHECK(epsilon_from_optical(19.26e-4, 11.5) == doctest::Approx(1.675e-4).epsilon(1e-3));
    CHECK(epsilon_from_optical(1.0, 1.0) == 1.0);
    CHECK(epsilon_from_optical(1.65e-4, 1.0) == doctest::Approx(1.65e-4));
    CHECK_THROWS_AS(epsilon_from_optical(-1.0, 1.0), std::invalid_argument);

    // sqrt(2mE) = 2 pi a -> lambda0 = 1
    CHECK(epsilon_from_quantum(2.0 * M_PI * M_PI, 1.0, 2.0, 1.0) == doctest::Approx(0.5));
    // doubling E divides lambda0 by sqrt(2)
    const double l1 = epsilon_from_quantum(1.0, 1.0, 1.0, 1.0);
    const double l2 = epsilon_from_quantum(1.0, 2.0, 1.0, 1.0);
    CHECK(l1 / l2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(epsilon_from_quantum(0.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("aborted runs return a partial record instead of throwing") {
    SimConfig cfg = small_gaussian_config();
    cfg.z_final = 1e9;  // never reached: epsilon 0.5 forces fast breakdown
    cfg.epsilon = 0.5;
    cfg.dt = 1.0;
    auto rec = run(cfg, preset("fig8").spec);
    CHECK_FALSE(rec.completed());
    CHECK_FALSE(rec.termination.empty());
    CHECK(rec.snapshots.size() >= 1);
}

TEST_CASE("config validation rejects out-of-range parameters") {
    SimConfig cfg;
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SimConfig{};
    cfg.dt = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SimConfig{};
    cfg.n_rays = 3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

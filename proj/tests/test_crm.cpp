#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "morphwing/crm.hpp"
#include "morphwing/error.hpp"
#include "morphwing/linkage.hpp"
#include "support.hpp"

using namespace morphwing;
using testsupport::kPi;

namespace {

struct Fixture {
    LinkageGiven given = testsupport::reference_given();
    LinkageDerived lengths = synthesize_linkage(given);
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

} // namespace

TEST(Crm, FlapAmplitudeMatchesConeGeometry) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(1.0, 40.0);
    for (int k = 0; k < 20; ++k) {
        CrmConfig cfg;
        cfg.H = u(rng) + 1.0;
        cfg.R = std::uniform_real_distribution<double>(0.5, cfg.H - 0.1)(rng);
        double lo = INFINITY;
        double hi = -INFINITY;
        for (int n = 0; n < 4096; ++n) {
            const double f = flap_angle(cfg, 2.0 * kPi * n / 4096);
            lo = std::min(lo, f);
            hi = std::max(hi, f);
        }
        EXPECT_NEAR(hi - lo, 2.0 * std::atan(cfg.R / cfg.H), 1e-9);
        EXPECT_NEAR(cfg.amplitude(), 2.0 * std::atan(cfg.R / cfg.H), 1e-15);
    }
}

TEST(Crm, MisExtremaAtFlapZeroCrossings) {
    CrmConfig cfg;
    EXPECT_DOUBLE_EQ(mis_position(cfg, 0.0), cfg.x_min);
    EXPECT_NEAR(mis_position(cfg, kPi), cfg.x_max, 1e-12);
    EXPECT_NEAR(flap_angle(cfg, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(flap_angle(cfg, kPi), 0.0, 1e-12);
}

TEST(Crm, DownstrokeCentredOnGearZero) {
    CrmConfig cfg;
    EXPECT_TRUE(is_downstroke(cfg, 0.0));
    EXPECT_TRUE(is_downstroke(cfg, 1.0));
    EXPECT_TRUE(is_downstroke(cfg, -1.0));
    EXPECT_FALSE(is_downstroke(cfg, kPi));
    EXPECT_FALSE(is_downstroke(cfg, 2.0));
}

TEST(Crm, GearAngleDecreasesWithTime) {
    CrmConfig cfg;
    EXPECT_LT(gear_angle_at(cfg, 0.01), gear_angle_at(cfg, 0.0));
    const double f0 = flap_angle(cfg, gear_angle_at(cfg, 0.0));
    const double f1 = flap_angle(cfg, gear_angle_at(cfg, 0.01));
    EXPECT_LT(f1, f0); // level and moving down at t = 0
}

TEST(Crm, HallTriggersOncePerCycle) {
    CrmConfig cfg;
    cfg.gear_rate = 2.5;
    cfg.gear_phase = 1.0;
    const auto t = hall_trigger_times(cfg, 4.0);
    ASSERT_GE(t.size(), 9u);
    for (std::size_t k = 1; k < t.size(); ++k) EXPECT_NEAR(t[k] - t[k - 1], 0.4, 1e-12);
    for (double tk : t) {
        EXPECT_NEAR(std::remainder(gear_angle_at(cfg, tk), 2.0 * kPi), 0.0, 1e-9);
    }
}

TEST(Decoupler, GateTakesTheLargerInput) {
    EXPECT_DOUBLE_EQ(decoupler_gate(30.0, 45.0), 45.0);
    EXPECT_DOUBLE_EQ(decoupler_gate(60.0, 45.0), 60.0);
    CrmConfig cfg;
    const auto s = decouple(cfg, 0.0, 10.0); // below the extended stop
    EXPECT_DOUBLE_EQ(s.x_SIS, cfg.lock());
    EXPECT_DOUBLE_EQ(s.x_OS, cfg.lock());
    const auto full = decouple(cfg, 0.0, 200.0);
    EXPECT_DOUBLE_EQ(full.x_SIS, cfg.x_max);
}

TEST(Decoupler, LockedSisKeepsDownstrokeExtended) {
    CrmConfig cfg;
    for (int n = 0; n < 256; ++n) {
        const double g = -kPi + 2.0 * kPi * n / 256;
        const auto s = decouple(cfg, g, cfg.lock());
        if (is_downstroke(cfg, g)) EXPECT_DOUBLE_EQ(s.x_OS, cfg.lock());
        EXPECT_GE(s.x_OS, s.x_MIS);
        EXPECT_GE(s.x_OS, s.x_SIS);
    }
}

TEST(Decoupler, OsMapsOntoTheLinkageStroke) {
    const auto& fx = fixture();
    CrmConfig cfg;
    EXPECT_DOUBLE_EQ(os_to_linkage(cfg, fx.given, cfg.lock()), fx.given.extended.x_A);
    EXPECT_DOUBLE_EQ(os_to_linkage(cfg, fx.given, cfg.x_max), fx.given.tucked.x_A);
    cfg.x_min = 0.0;
    cfg.x_max = 10.0;
    EXPECT_DOUBLE_EQ(os_to_linkage(cfg, fx.given, 5.0), 45.0);
    EXPECT_DOUBLE_EQ(os_to_linkage(cfg, fx.given, 10.0), 65.0);
}

TEST(Decoupler, ConfigValidation) {
    CrmConfig cfg;
    cfg.R = 25.0; // R >= H
    EXPECT_THROW(cfg.validate(), Error);
    cfg = CrmConfig{};
    cfg.x_max = cfg.x_min;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = CrmConfig{};
    cfg.gear_rate = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(Trajectory, SampleGridAndSides) {
    const auto& fx = fixture();
    CrmConfig cfg;
    TrajectoryRequest req;
    req.duration = 1.0;
    req.samples_per_cycle = 32;
    const auto tr = wingbeat_trajectory(cfg, fx.lengths, fx.given, req);
    ASSERT_EQ(tr.left.size(), 97u);
    ASSERT_EQ(tr.right.size(), tr.left.size());
    for (std::size_t k = 0; k < tr.left.size(); ++k) {
        EXPECT_NEAR(tr.left[k].t, k / 96.0, 1e-12);
        EXPECT_EQ(tr.left[k].side, Side::Left);
        EXPECT_NEAR(tr.left[k].pose.wingtip.y(), -tr.right[k].pose.wingtip.y(), 1e-9);
    }
}

TEST(Trajectory, ExtendedDownstrokeTuckedUpstroke) {
    const auto& fx = fixture();
    CrmConfig cfg;
    TrajectoryRequest req;
    req.duration = cfg.period();
    req.samples_per_cycle = 64;
    const auto tr = wingbeat_trajectory(cfg, fx.lengths, fx.given, req);
    const auto& r = tr.right;
    // Mid-downstroke at t = 0, mid-upstroke half a period later.
    EXPECT_GT(std::abs(r[0].pose.wingtip.y()), std::abs(r[32].pose.wingtip.y()));
    for (const auto& s : r) {
        if (s.downstroke) EXPECT_DOUBLE_EQ(s.x_A, fx.given.extended.x_A);
    }
}

TEST(Trajectory, SisScheduleAppliesPerSide) {
    const auto& fx = fixture();
    CrmConfig cfg;
    TrajectoryRequest req;
    req.duration = cfg.period();
    req.samples_per_cycle = 64;
    req.left_sis = [](double) { return 65.0; };
    const auto tr = wingbeat_trajectory(cfg, fx.lengths, fx.given, req);
    for (std::size_t k = 0; k < tr.left.size(); ++k) {
        EXPECT_DOUBLE_EQ(tr.left[k].x_OS, 65.0);
        EXPECT_LE(std::abs(tr.left[k].pose.wingtip.y()), std::abs(tr.right[k].pose.wingtip.y()) + 1e-9);
    }
}

TEST(Trajectory, RejectsCoarseSampling) {
    const auto& fx = fixture();
    TrajectoryRequest req;
    req.samples_per_cycle = 8;
    EXPECT_THROW(wingbeat_trajectory(CrmConfig{}, fx.lengths, fx.given, req), Error);
}

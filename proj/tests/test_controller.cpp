#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "morphwing/controller.hpp"
#include "morphwing/error.hpp"

using namespace morphwing;

namespace {

std::vector<ControllerEvent> triggers(double t0, double period, int n) {
    std::vector<ControllerEvent> ev;
    for (int k = 0; k < n; ++k) ev.push_back({t0 + k * period, HallTrigger{}});
    return ev;
}

void insert_sorted(std::vector<ControllerEvent>& ev, ControllerEvent e) {
    const auto it = std::upper_bound(ev.begin(), ev.end(), e.t,
                                     [](double t, const ControllerEvent& x) { return t < x.t; });
    ev.insert(it, e);
}

std::vector<ServoPulse> pulses(const SimulationResult& r) {
    std::vector<ServoPulse> out;
    for (const auto& o : r.outputs) {
        if (const auto* p = std::get_if<ServoPulse>(&o.kind)) out.push_back(*p);
    }
    return out;
}

} // namespace

TEST(Controller, PulseTimingFollowsTheLastPeriod) {
    auto ev = triggers(0.0, 0.4, 4);
    insert_sorted(ev, {0.5, RollCommand{Side::Right}});
    const auto r = simulate({}, ev);
    const auto p = pulses(r);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0].side, Side::Right);
    EXPECT_NEAR(p[0].start, 0.8 + 0.2, 1e-12);
    EXPECT_NEAR(p[0].duration, 0.3, 1e-12);
}

TEST(Controller, RollBeforeAnyPeriodWarns) {
    std::vector<ControllerEvent> ev{{0.0, RollCommand{Side::Left}}, {0.1, HallTrigger{}},
                                    {0.5, HallTrigger{}}};
    const auto r = simulate({}, ev);
    ASSERT_FALSE(r.outputs.empty());
    const auto* w = std::get_if<ControllerWarning>(&r.outputs.front().kind);
    ASSERT_NE(w, nullptr);
    EXPECT_EQ(w->code, "RollWithoutPeriod");
    const auto p = pulses(r);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_NEAR(p[0].start, 0.5 + 0.2, 1e-12);
}

TEST(Controller, QueueOnePolicyDefersTheSecondRoll) {
    auto ev = triggers(0.0, 0.4, 8);
    insert_sorted(ev, {0.5, RollCommand{Side::Left}});
    insert_sorted(ev, {0.55, RollCommand{Side::Right}});
    insert_sorted(ev, {0.6, RollCommand{Side::Right}}); // replaces the queued slot
    const auto p = pulses(simulate({}, ev));
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[0].side, Side::Left);
    EXPECT_EQ(p[1].side, Side::Right);
    EXPECT_GE(p[1].start, p[0].end() - 1e-12);
}

TEST(Controller, DropPolicyWarns) {
    auto ev = triggers(0.0, 0.4, 6);
    insert_sorted(ev, {0.5, RollCommand{Side::Left}});
    insert_sorted(ev, {0.55, RollCommand{Side::Right}});
    ControllerConfig cfg;
    cfg.roll_policy = RollPolicy::Drop;
    const auto r = simulate(cfg, ev);
    EXPECT_EQ(pulses(r).size(), 1u);
    const bool dropped = std::any_of(r.outputs.begin(), r.outputs.end(), [](const auto& o) {
        const auto* w = std::get_if<ControllerWarning>(&o.kind);
        return w && w->code == "RollDropped";
    });
    EXPECT_TRUE(dropped);
}

TEST(Controller, GlideStopsTheMotorAtTheNextTrigger) {
    auto ev = triggers(0.0, 0.4, 5);
    insert_sorted(ev, {0.9, ThrottleSet{0.02}});
    const auto r = simulate({}, ev);
    ASSERT_EQ(r.outputs.size(), 1u);
    EXPECT_TRUE(std::holds_alternative<MotorStop>(r.outputs[0].kind));
    EXPECT_DOUBLE_EQ(r.outputs[0].t, 1.2);
    EXPECT_FALSE(r.final_state.motor_running);
}

TEST(Controller, ThrottleRecoveryCancelsGlide) {
    auto ev = triggers(0.0, 0.4, 5);
    insert_sorted(ev, {0.9, ThrottleSet{0.02}});
    insert_sorted(ev, {1.0, ThrottleSet{0.5}});
    EXPECT_TRUE(simulate({}, ev).outputs.empty());
}

TEST(Controller, StepIsPure) {
    ControllerState s;
    const auto a = step({}, s, {0.0, HallTrigger{}});
    const auto b = step({}, s, {0.0, HallTrigger{}});
    EXPECT_EQ(a.state.last_trigger, b.state.last_trigger);
    EXPECT_FALSE(s.last_trigger.has_value());
}

TEST(Controller, TimeMustNotRunBackwards) {
    std::vector<ControllerEvent> ev{{1.0, HallTrigger{}}, {0.5, HallTrigger{}}};
    EXPECT_THROW(simulate({}, ev), Error);
}

TEST(Window, PulseCoversExactlyOneDownstroke) {
    for (double T : {0.25, 0.3333, 0.4, 0.5}) {
        const double t0 = 1.7;
        const ServoPulse p{Side::Left, t0 + 0.5 * T, 0.75 * T};
        const auto w = asymmetric_downstroke_window(p, t0, T);
        EXPECT_TRUE(w.one_shot());
        EXPECT_EQ(w.cycle_index, 1);
        EXPECT_NEAR(w.covered_begin, t0 + 0.75 * T, 1e-12);
        EXPECT_NEAR(w.covered_end, t0 + 1.25 * T, 1e-12);
        EXPECT_NEAR(w.phase_begin, 0.75, 1e-9);
        EXPECT_NEAR(w.phase_end, 1.25, 1e-9);
    }
}

TEST(Window, LongPulseOverlapsTwoDownstrokes) {
    const ServoPulse p{Side::Left, 0.2, 0.8};
    const auto w = asymmetric_downstroke_window(p, 0.0, 0.4);
    EXPECT_FALSE(w.one_shot());
    EXPECT_EQ(w.downstrokes_overlapped, 2);
}

TEST(Window, RandomSequencesAlwaysOneShot) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> period(0.2, 0.6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double T = period(rng);
        auto ev = triggers(0.0, T, 20);
        for (int k = 0; k < 4; ++k) {
            insert_sorted(ev, {u(rng) * 18.0 * T, RollCommand{u(rng) < 0.5 ? Side::Left : Side::Right}});
        }
        for (const auto& o : simulate({}, ev).outputs) {
            if (std::holds_alternative<ServoPulse>(o.kind)) {
                EXPECT_TRUE(asymmetric_downstroke_window(o, T).one_shot());
            }
        }
    }
}

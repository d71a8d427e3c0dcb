#include "morphwing/controller.hpp"

#include <algorithm>
#include <cmath>

#include "morphwing/error.hpp"

namespace morphwing {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void on_trigger(ControllerState& s, double t, std::vector<ControllerOutput>& out) {
    if (s.last_trigger) s.period_estimate = t - *s.last_trigger;
    s.last_trigger = t;

    if (s.glide_armed && s.motor_running) {
        out.push_back({t, MotorStop{}});
        s.glide_armed = false;
        s.motor_running = false;
    }

    const bool busy = s.pulse_busy_until && t < *s.pulse_busy_until;
    if (s.pending_roll && s.period_estimate && !busy) {
        const double T = *s.period_estimate;
        const ServoPulse pulse{*s.pending_roll, t + 0.5 * T, 0.75 * T};
        out.push_back({t, pulse});
        s.pulse_busy_until = pulse.end();
        s.pending_roll = s.queued_roll;
        s.queued_roll.reset();
    }
}

void on_roll(const ControllerConfig& cfg, ControllerState& s, double t, Side side,
             std::vector<ControllerOutput>& out) {
    const bool busy = s.pending_roll || (s.pulse_busy_until && t < *s.pulse_busy_until);
    if (!busy) {
        s.pending_roll = side;
    } else if (cfg.roll_policy == RollPolicy::QueueOne) {
        if (s.pending_roll) {
            s.queued_roll = side;
        } else {
            s.pending_roll = side;
        }
    } else {
        out.push_back({t, ControllerWarning{"RollDropped", side}});
        return;
    }
    if (!s.period_estimate) out.push_back({t, ControllerWarning{"RollWithoutPeriod", side}});
}

void on_throttle(const ControllerConfig& cfg, ControllerState& s, double value) {
    s.throttle = value;
    if (value < cfg.glide_threshold) {
        s.glide_armed = s.motor_running;
    } else {
        s.glide_armed = false;
        s.motor_running = true;
    }
}

} // namespace

StepResult step(const ControllerConfig& config, const ControllerState& state,
                const ControllerEvent& event) {
    if (state.last_event && event.t < *state.last_event) {
        throw Error(ErrorKind::InvalidInput, "controller events must be in nondecreasing time order");
    }
    StepResult r{state, {}};
    r.state.last_event = event.t;
    std::visit(Overloaded{
                   [&](const HallTrigger&) { on_trigger(r.state, event.t, r.outputs); },
                   [&](const RollCommand& c) { on_roll(config, r.state, event.t, c.side, r.outputs); },
                   [&](const ThrottleSet& c) { on_throttle(config, r.state, c.value); },
               },
               event.kind);
    return r;
}

SimulationResult simulate(const ControllerConfig& config, const std::vector<ControllerEvent>& events,
                          ControllerState initial) {
    SimulationResult result{std::move(initial), {}};
    for (const auto& e : events) {
        StepResult r = step(config, result.final_state, e);
        result.final_state = std::move(r.state);
        result.outputs.insert(result.outputs.end(), r.outputs.begin(), r.outputs.end());
    }
    return result;
}

DownstrokeWindow asymmetric_downstroke_window(const ServoPulse& pulse, double trigger_time,
                                              double period) {
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidInput, "period must be > 0");
    DownstrokeWindow w;
    if (!(pulse.duration > 0.0)) return w;

    const double eps = 1e-12 * period;
    const double begin = pulse.start;
    const double end = pulse.end();
    const auto k_first = static_cast<int>(std::floor((begin - trigger_time) / period - 0.25)) - 1;
    const auto k_last = static_cast<int>(std::ceil((end - trigger_time) / period + 0.25)) + 1;
    for (int k = k_first; k <= k_last; ++k) {
        const double ds = trigger_time + (k - 0.25) * period;
        const double de = trigger_time + (k + 0.25) * period;
        const double lo = std::max(ds, begin);
        const double hi = std::min(de, end);
        if (hi - lo <= eps) continue;
        if (w.downstrokes_overlapped == 0) {
            w.cycle_index = k;
            w.covered_begin = lo;
            w.covered_end = hi;
            w.phase_begin = (lo - trigger_time) / period;
            w.phase_end = (hi - trigger_time) / period;
        }
        ++w.downstrokes_overlapped;
        if (begin <= ds + eps && end >= de - eps) ++w.downstrokes_covered;
    }
    return w;
}

DownstrokeWindow asymmetric_downstroke_window(const ControllerOutput& pulse, double period) {
    const auto* p = std::get_if<ServoPulse>(&pulse.kind);
    if (!p) throw Error(ErrorKind::InvalidInput, "output is not a servo pulse");
    return asymmetric_downstroke_window(*p, pulse.t, period);
}

} // namespace morphwing

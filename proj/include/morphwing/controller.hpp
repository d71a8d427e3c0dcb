#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "morphwing/linkage.hpp"

namespace morphwing {

// Virtual-clock model of the rolling & gliding controller.

struct HallTrigger {};
struct RollCommand {
    Side side = Side::Left;
};
struct ThrottleSet {
    double value = 0.0; // fraction of full scale
};

struct ControllerEvent {
    double t = 0.0;
    std::variant<HallTrigger, RollCommand, ThrottleSet> kind;
};

struct ServoPulse {
    Side side = Side::Left;
    double start = 0.0;
    double duration = 0.0;
    double end() const { return start + duration; }
};
struct MotorStop {};
// Non-fatal diagnostics, e.g. "RollWithoutPeriod".
struct ControllerWarning {
    std::string code;
    std::optional<Side> side;
};

struct ControllerOutput {
    double t = 0.0; // emission time (the event that produced it)
    std::variant<ServoPulse, MotorStop, ControllerWarning> kind;
};

enum class RollPolicy { QueueOne, Drop };

struct ControllerConfig {
    double glide_threshold = 0.05;
    RollPolicy roll_policy = RollPolicy::QueueOne;
};

struct ControllerState {
    std::optional<double> last_event;
    std::optional<double> last_trigger;
    std::optional<double> period_estimate;
    std::optional<Side> pending_roll;
    std::optional<Side> queued_roll; // one-slot queue behind pending_roll
    std::optional<double> pulse_busy_until;
    double throttle = 1.0;
    bool glide_armed = false;
    bool motor_running = true;
};

struct StepResult {
    ControllerState state;
    std::vector<ControllerOutput> outputs;
};

// Consumes one event. Throws Error(InvalidInput) if time runs backwards.
StepResult step(const ControllerConfig& config, const ControllerState& state,
                const ControllerEvent& event);

struct SimulationResult {
    ControllerState final_state;
    std::vector<ControllerOutput> outputs;
};

SimulationResult simulate(const ControllerConfig& config, const std::vector<ControllerEvent>& events,
                          ControllerState initial = {});

// Where a servo pulse falls relative to the downstrokes. The Hall trigger
// marks mid-downstroke, so downstroke k spans
// [t0 + (k - 1/4) T, t0 + (k + 1/4) T] around the trigger t0 that
// scheduled the pulse.
struct DownstrokeWindow {
    int cycle_index = -1;          // first downstroke overlapped, -1 if none
    int downstrokes_overlapped = 0;
    int downstrokes_covered = 0;   // fully inside the pulse
    double covered_begin = 0.0;    // overlap with cycle_index, absolute s
    double covered_end = 0.0;
    double phase_begin = 0.0;      // same interval in cycles after t0
    double phase_end = 0.0;
    bool one_shot() const { return downstrokes_overlapped == 1 && downstrokes_covered == 1; }
};

DownstrokeWindow asymmetric_downstroke_window(const ControllerOutput& pulse, double period);
DownstrokeWindow asymmetric_downstroke_window(const ServoPulse& pulse, double trigger_time,
                                              double period);

} // namespace morphwing

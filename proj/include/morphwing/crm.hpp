#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "morphwing/linkage.hpp"

namespace morphwing {

// Conical rocker drive. Lengths in mm, gear_rate in revolutions per second.
struct CrmConfig {
    double R = 10.0;        // crank radius
    double H = 20.0;        // crank plane to cross-shaft centre
    double gear_rate = 3.0; // Hz
    double x_min = 25.0;    // motor-input slider travel
    double x_max = 65.0;
    // SIS position of the extended stop; the decoupled downstroke holds the
    // OS here. Defaults to mid-travel of the MIS.
    std::optional<double> extended_lock;
    double gear_phase = 0.0; // rad, gear angle at t = 0
    double mean_flap = 0.0;  // rad, fixed dihedral offset of the stroke

    void validate() const;
    double lock() const { return extended_lock.value_or(0.5 * (x_min + x_max)); }
    double amplitude() const; // peak-to-peak flap, rad
    double period() const { return 1.0 / gear_rate; }
};

struct DecouplerState {
    double x_MIS = 0.0;
    double x_SIS = 0.0;
    double x_OS = 0.0;
};

// Flap angle (rad, positive up) for a gear angle.
double flap_angle(const CrmConfig& cfg, double gear_angle);

// Motor-input slider position: x_min at gear angle 0, x_max at pi.
double mis_position(const CrmConfig& cfg, double gear_angle);

// Output-slider position from the two inputs. Larger means more tucked.
double decoupler_gate(double x_MIS, double x_SIS);

DecouplerState decouple(const CrmConfig& cfg, double gear_angle, double x_SIS);

// The gear turns so that gear angle decreases with time; this puts the
// flap 90 degrees ahead of the morphing stroke and centres the downstroke on
// gear angle 0.
double gear_angle_at(const CrmConfig& cfg, double t);

// Times in [0, t_end] where the wing passes the level position moving down
// (gear angle = 0 mod 2*pi); the Hall switch fires here.
std::vector<double> hall_trigger_times(const CrmConfig& cfg, double t_end);

// True while the flap angle is decreasing.
bool is_downstroke(const CrmConfig& cfg, double gear_angle);

// OS (decoupler frame) to linkage slider x_A: lock maps to the extended
// pose, x_max to the tucked pose.
double os_to_linkage(const CrmConfig& cfg, const LinkageGiven& given, double x_OS);

using SisSchedule = std::function<double(double t)>;

struct WingbeatSample {
    double t = 0.0;
    Side side = Side::Right;
    double gear_angle = 0.0;
    double flap_angle = 0.0;
    double x_MIS = 0.0;
    double x_SIS = 0.0;
    double x_OS = 0.0;
    double x_A = 0.0;
    bool downstroke = false;
    SkeletonPose pose;
};

struct WingbeatTrajectory {
    std::vector<WingbeatSample> left;
    std::vector<WingbeatSample> right;
};

struct TrajectoryRequest {
    double wrist_mount = 0.0; // rad
    SisSchedule left_sis;     // empty: extended lock
    SisSchedule right_sis;
    double duration = 1.0;    // s
    int samples_per_cycle = 64;
};

// Samples t = k / (gear_rate * samples_per_cycle) for every k with t <= duration.
WingbeatTrajectory wingbeat_trajectory(const CrmConfig& cfg, const LinkageDerived& lengths,
                                       const LinkageGiven& given, const TrajectoryRequest& request);

} // namespace morphwing

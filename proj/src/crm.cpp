#include "morphwing/crm.hpp"

#include <algorithm>
#include <cmath>

#include "morphwing/error.hpp"
#include "morphwing/units.hpp"

namespace morphwing {

void CrmConfig::validate() const {
    auto fail = [](const char* what) { throw Error(ErrorKind::InvalidInput, what); };
    if (!(R >= 0.0)) fail("crank radius R must be >= 0");
    if (!(H > 0.0)) fail("cone height H must be > 0");
    if (!(R < H)) fail("R must be smaller than H");
    if (!(gear_rate > 0.0)) fail("gear_rate must be > 0");
    if (!(x_min < x_max)) fail("mis_travel requires x_min < x_max");
    const double l = lock();
    if (!(l >= x_min && l < x_max)) fail("extended_lock must lie in [x_min, x_max)");
}

double CrmConfig::amplitude() const { return 2.0 * std::atan(R / H); }

double flap_angle(const CrmConfig& cfg, double gear_angle) {
    return cfg.mean_flap + std::atan(cfg.R * std::sin(gear_angle) / cfg.H);
}

double mis_position(const CrmConfig& cfg, double gear_angle) {
    return cfg.x_min + (cfg.x_max - cfg.x_min) * 0.5 * (1.0 - std::cos(gear_angle));
}

double decoupler_gate(double x_MIS, double x_SIS) { return std::max(x_MIS, x_SIS); }

DecouplerState decouple(const CrmConfig& cfg, double gear_angle, double x_SIS) {
    DecouplerState s;
    s.x_MIS = mis_position(cfg, gear_angle);
    // The servo slider cannot pass the extended stop or the tucked end.
    s.x_SIS = std::clamp(x_SIS, cfg.lock(), cfg.x_max);
    s.x_OS = decoupler_gate(s.x_MIS, s.x_SIS);
    return s;
}

double gear_angle_at(const CrmConfig& cfg, double t) {
    return cfg.gear_phase - 2.0 * kPi * cfg.gear_rate * t;
}

std::vector<double> hall_trigger_times(const CrmConfig& cfg, double t_end) {
    const double offset = cfg.gear_phase / (2.0 * kPi);
    std::vector<double> out;
    for (double m = std::ceil(-offset - 1e-12); ; m += 1.0) {
        const double t = (offset + m) / cfg.gear_rate;
        if (t > t_end) break;
        out.push_back(t);
    }
    return out;
}

bool is_downstroke(const CrmConfig& cfg, double gear_angle) {
    // d(flap)/dt has the sign of -cos(gear_angle) when R > 0.
    return cfg.R > 0.0 && std::cos(gear_angle) > 0.0;
}

double os_to_linkage(const CrmConfig& cfg, const LinkageGiven& given, double x_OS) {
    const double lock = cfg.lock();
    const double scale = (given.tucked.x_A - given.extended.x_A) / (cfg.x_max - lock);
    return given.extended.x_A + (x_OS - lock) * scale;
}

WingbeatTrajectory wingbeat_trajectory(const CrmConfig& cfg, const LinkageDerived& lengths,
                                       const LinkageGiven& given,
                                       const TrajectoryRequest& request) {
    cfg.validate();
    if (!(request.duration > 0.0)) throw Error(ErrorKind::InvalidInput, "duration must be > 0");
    if (request.samples_per_cycle < 16) {
        throw Error(ErrorKind::InvalidInput, "samples_per_cycle must be >= 16");
    }
    const double dt = 1.0 / (cfg.gear_rate * request.samples_per_cycle);
    const auto count = static_cast<long>(std::floor(request.duration / dt + 1e-9)) + 1;

    auto run_side = [&](Side side, const SisSchedule& sis) {
        std::vector<WingbeatSample> out;
        out.reserve(static_cast<std::size_t>(count));
        for (long k = 0; k < count; ++k) {
            WingbeatSample s;
            s.t = static_cast<double>(k) * dt;
            s.side = side;
            s.gear_angle = gear_angle_at(cfg, s.t);
            s.flap_angle = flap_angle(cfg, s.gear_angle);
            s.downstroke = is_downstroke(cfg, s.gear_angle);
            const DecouplerState d = decouple(cfg, s.gear_angle, sis ? sis(s.t) : cfg.lock());
            s.x_MIS = d.x_MIS;
            s.x_SIS = d.x_SIS;
            s.x_OS = d.x_OS;
            s.x_A = os_to_linkage(cfg, given, s.x_OS);
            const JointState joints = forward_kinematics(lengths, given, s.x_A);
            s.pose = skeleton_pose(joints, s.flap_angle, request.wrist_mount, given, side);
            out.push_back(s);
        }
        return out;
    };

    WingbeatTrajectory traj;
    traj.left = run_side(Side::Left, request.left_sis);
    traj.right = run_side(Side::Right, request.right_sis);
    return traj;
}

} // namespace morphwing

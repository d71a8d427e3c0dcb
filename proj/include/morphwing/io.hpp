#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "morphwing/aero.hpp"
#include "morphwing/controller.hpp"
#include "morphwing/crm.hpp"
#include "morphwing/flight_log.hpp"
#include "morphwing/linkage.hpp"

namespace morphwing::io {

using nlohmann::json;

// Locale-independent, 9 significant digits.
std::string format_number(double value);
// The double nearest to format_number(value).
double round9(double value);

// Writes via a sibling temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);

// ---- CSV ---------------------------------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a column, or -1.
    int column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);
double parse_double(const std::string& field);

// t,fx,fy,fz,mx,my,mz,hall
ForceRecord parse_force_csv(const CsvTable& table);
std::string force_csv(const ForceRecord& record);

// t,roll_deg,pitch_deg,yaw_deg,p_dps,q_dps,r_dps[,marker]
// marker: nonzero marks a wingbeat, 2 additionally marks the maneuver start.
struct LogCsvOptions {
    double marker_freq_hz = 0.0; // used when the marker column is absent
    double marker_t0 = 0.0;
    std::optional<std::size_t> maneuver_marker;
};
AttitudeLog parse_log_csv(const CsvTable& table, const LogCsvOptions& options = {});
std::string log_csv(const AttitudeLog& log);

// t,kind,arg with kind in {hall, roll, throttle}
std::vector<ControllerEvent> parse_events_csv(const CsvTable& table);
std::string events_csv(const std::vector<ControllerEvent>& events);
// t,kind,side,start,duration
std::string controller_output_csv(const std::vector<ControllerOutput>& outputs);

std::string trajectory_csv(const WingbeatTrajectory& trajectory);
std::string ensemble_csv(const ManeuverEnsemble& ensemble);

// ---- JSON ----------------------------------------------------------------------

const char* side_name(Side side);
Side parse_side(const std::string& text);

json to_json(const PoseConstraint& pose);
json to_json(const LinkageGiven& given);
json to_json(const LinkageDerived& derived);
// Given fields plus a "derived" object.
json to_json(const LinkageGiven& given, const LinkageDerived& derived);
json to_json(const JointState& state); // degrees
json to_json(const AeroSurface& surface);
json to_json(const TrimPoint& trim);
json to_json(const CycleStats& stats);
json to_json(const RollMomentReport& report);
json to_json(const CrmConfig& cfg);

PoseConstraint pose_from_json(const json& j);
LinkageGiven linkage_given_from_json(const json& j);
std::optional<LinkageDerived> linkage_derived_from_json(const json& j); // reads j["derived"]
AeroSurface surface_from_json(const json& j);
CrmConfig crm_from_json(const json& j);

} // namespace morphwing::io

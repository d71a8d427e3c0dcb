#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace morphwing {

struct AttitudeSample {
    double t = 0.0;     // s
    double roll = 0.0;  // deg
    double pitch = 0.0; // deg
    double yaw = 0.0;   // deg
    double p = 0.0;     // deg/s
    double q = 0.0;
    double r = 0.0;
};

struct AttitudeLog {
    std::vector<AttitudeSample> samples;
    std::vector<double> markers;    // wingbeat marker times, increasing
    std::size_t maneuver_marker = 0; // marker of the asymmetric downstroke

    void validate() const;
    double maneuver_start() const { return markers.at(maneuver_marker); }
};

// Markers at t0 + k / freq covering [t_begin, t_end].
std::vector<double> markers_from_frequency(double freq_hz, double t0, double t_begin, double t_end);

// Piecewise-linear clock: marker k maps to k. Outside the marker span the
// first/last interval is extended. Throws TooFewMarkers.
double normalized_time(const std::vector<double>& markers, double t);
std::vector<double> normalize_time(const AttitudeLog& log);

// Shifts time so the maneuver starts at t = 0 and re-zeroes yaw there.
AttitudeLog align(const AttitudeLog& log);

// Wingbeats from the maneuver start until |roll - roll(start)| first reaches
// target_deg, interpolated linearly between samples. nullopt: no crossing.
std::optional<double> agility_metric(const AttitudeLog& log, double target_deg = 90.0);

struct EnsembleBin {
    double tau = 0.0; // wingbeats after maneuver start (bin centre)
    double mean_roll = 0.0;
    double se_roll = 0.0;
    double mean_pitch = 0.0;
    double se_pitch = 0.0;
    double mean_yaw = 0.0;
    double se_yaw = 0.0;
};

struct ManeuverEnsemble {
    std::vector<AttitudeLog> trials; // aligned
    std::vector<EnsembleBin> bins;
    int bins_per_wingbeat = 20;
    double start_roll = 0.0; // mean roll at the maneuver start, deg
};

// Mean and standard error (sample stddev / sqrt(n)) across trials, sampled
// at bin centres over the normalized time span shared by every trial.
// Throws TooFewTrials.
ManeuverEnsemble ensemble_stats(const std::vector<AttitudeLog>& trials, int bins_per_wingbeat = 20);

std::optional<double> agility_metric(const ManeuverEnsemble& ensemble, double target_deg = 90.0);

} // namespace morphwing

#include "morphwing/flight_log.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "morphwing/error.hpp"

namespace morphwing {

namespace {

void check_markers(const std::vector<double>& markers) {
    if (markers.size() < 2) {
        throw Error(ErrorKind::TooFewMarkers, "need at least 2 wingbeat markers");
    }
    for (std::size_t k = 1; k < markers.size(); ++k) {
        if (!(markers[k] > markers[k - 1])) {
            throw Error(ErrorKind::TooFewMarkers, "wingbeat markers must be strictly increasing");
        }
    }
}

// Linear interpolation of a series y(x), x increasing, clamped at the ends.
double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const auto k = static_cast<std::size_t>(it - x.begin());
    const double w = (at - x[k - 1]) / (x[k] - x[k - 1]);
    return y[k - 1] + w * (y[k] - y[k - 1]);
}

std::optional<double> first_crossing(const std::vector<double>& tau, const std::vector<double>& roll,
                                     double tau0, double roll0, double target) {
    double prev_tau = tau0;
    double prev_dev = 0.0;
    for (std::size_t k = 0; k < tau.size(); ++k) {
        if (tau[k] <= tau0) continue;
        const double dev = roll[k] - roll0;
        if (std::abs(dev) >= target) {
            const double level = dev > 0.0 ? target : -target;
            const double w = (level - prev_dev) / (dev - prev_dev);
            return prev_tau + w * (tau[k] - prev_tau) - tau0;
        }
        prev_tau = tau[k];
        prev_dev = dev;
    }
    return std::nullopt;
}

std::vector<double> column(const AttitudeLog& log, double AttitudeSample::*field) {
    std::vector<double> out;
    out.reserve(log.samples.size());
    for (const auto& s : log.samples) out.push_back(s.*field);
    return out;
}

} // namespace

void AttitudeLog::validate() const {
    if (samples.empty()) throw Error(ErrorKind::InvalidInput, "attitude log is empty");
    for (std::size_t k = 1; k < samples.size(); ++k) {
        if (!(samples[k].t > samples[k - 1].t)) {
            throw Error(ErrorKind::InvalidInput, "attitude log time must be strictly increasing");
        }
    }
    check_markers(markers);
    if (maneuver_marker >= markers.size()) {
        throw Error(ErrorKind::InvalidInput, "maneuver marker index out of range");
    }
}

std::vector<double> markers_from_frequency(double freq_hz, double t0, double t_begin, double t_end) {
    if (!(freq_hz > 0.0)) throw Error(ErrorKind::InvalidInput, "marker frequency must be > 0");
    const double period = 1.0 / freq_hz;
    const double k0 = std::floor((t_begin - t0) / period);
    const double k1 = std::ceil((t_end - t0) / period);
    std::vector<double> out;
    for (double k = k0; k <= k1; k += 1.0) out.push_back(t0 + k * period);
    return out;
}

double normalized_time(const std::vector<double>& markers, double t) {
    check_markers(markers);
    std::size_t k = 1;
    if (t >= markers.back()) {
        k = markers.size() - 1;
    } else if (t > markers.front()) {
        k = static_cast<std::size_t>(std::upper_bound(markers.begin(), markers.end(), t) -
                                     markers.begin());
    }
    const double lo = markers[k - 1];
    const double hi = markers[k];
    return static_cast<double>(k - 1) + (t - lo) / (hi - lo);
}

std::vector<double> normalize_time(const AttitudeLog& log) {
    check_markers(log.markers);
    std::vector<double> out;
    out.reserve(log.samples.size());
    for (const auto& s : log.samples) out.push_back(normalized_time(log.markers, s.t));
    return out;
}

AttitudeLog align(const AttitudeLog& log) {
    log.validate();
    const double t0 = log.maneuver_start();
    const auto t = column(log, &AttitudeSample::t);
    const double yaw0 = interpolate(t, column(log, &AttitudeSample::yaw), t0);
    AttitudeLog out = log;
    if (t0 == 0.0 && std::abs(yaw0) <= 1e-12) return out;
    for (auto& s : out.samples) {
        s.t -= t0;
        s.yaw -= yaw0;
    }
    for (auto& m : out.markers) m -= t0;
    return out;
}

std::optional<double> agility_metric(const AttitudeLog& log, double target_deg) {
    log.validate();
    const auto tau = normalize_time(log);
    const double tau0 = normalized_time(log.markers, log.maneuver_start());
    const auto roll = column(log, &AttitudeSample::roll);
    return first_crossing(tau, roll, tau0, interpolate(tau, roll, tau0), target_deg);
}

ManeuverEnsemble ensemble_stats(const std::vector<AttitudeLog>& trials, int bins_per_wingbeat) {
    if (trials.size() < 2) {
        throw Error(ErrorKind::TooFewTrials,
                    "ensemble needs at least 2 trials, got " + std::to_string(trials.size()));
    }
    if (bins_per_wingbeat < 1) throw Error(ErrorKind::InvalidInput, "bins per wingbeat must be >= 1");

    ManeuverEnsemble ens;
    ens.bins_per_wingbeat = bins_per_wingbeat;
    struct Series {
        std::vector<double> tau, roll, pitch, yaw;
    };
    std::vector<Series> series;
    double lo = -INFINITY;
    double hi = INFINITY;
    for (const auto& trial : trials) {
        AttitudeLog a = align(trial);
        Series s;
        s.tau = normalize_time(a);
        const double tau0 = static_cast<double>(a.maneuver_marker);
        for (double& v : s.tau) v -= tau0;
        s.roll = column(a, &AttitudeSample::roll);
        s.pitch = column(a, &AttitudeSample::pitch);
        s.yaw = column(a, &AttitudeSample::yaw);
        ens.start_roll += interpolate(s.tau, s.roll, 0.0) / static_cast<double>(trials.size());
        lo = std::max(lo, s.tau.front());
        hi = std::min(hi, s.tau.back());
        series.push_back(std::move(s));
        ens.trials.push_back(std::move(a));
    }

    const double width = 1.0 / bins_per_wingbeat;
    const auto first = static_cast<long>(std::ceil(lo / width - 1e-9));
    const auto last = static_cast<long>(std::floor(hi / width + 1e-9));
    const double n = static_cast<double>(series.size());
    auto stats = [&](std::vector<double> Series::*field, double tau, double* mean, double* se) {
        double sum = 0.0;
        std::vector<double> v;
        for (const auto& s : series) v.push_back(interpolate(s.tau, s.*field, tau));
        for (double x : v) sum += x;
        *mean = sum / n;
        double ss = 0.0;
        for (double x : v) ss += (x - *mean) * (x - *mean);
        *se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    };
    for (long k = first; k < last; ++k) {
        EnsembleBin b;
        b.tau = (static_cast<double>(k) + 0.5) * width;
        stats(&Series::roll, b.tau, &b.mean_roll, &b.se_roll);
        stats(&Series::pitch, b.tau, &b.mean_pitch, &b.se_pitch);
        stats(&Series::yaw, b.tau, &b.mean_yaw, &b.se_yaw);
        ens.bins.push_back(b);
    }
    return ens;
}

std::optional<double> agility_metric(const ManeuverEnsemble& ensemble, double target_deg) {
    if (ensemble.bins.empty()) return std::nullopt;
    std::vector<double> tau;
    std::vector<double> roll;
    for (const auto& b : ensemble.bins) {
        tau.push_back(b.tau);
        roll.push_back(b.mean_roll);
    }
    // Bin centres straddle the maneuver start, so the reference roll is the
    // ensemble mean at tau = 0 rather than an interpolated bin value.
    if (tau.front() > 0.0) {
        tau.insert(tau.begin(), 0.0);
        roll.insert(roll.begin(), ensemble.start_roll);
    }
    return first_crossing(tau, roll, 0.0, ensemble.start_roll, target_deg);
}

} // namespace morphwing

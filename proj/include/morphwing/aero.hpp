#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace morphwing {

// ---- load-cell records -----------------------------------------------------

// One 6-axis load-cell sample (N, N*m). `hall` marks a wingbeat trigger.
struct ForceSample {
    double t = 0.0;
    double fx = 0.0;
    double fy = 0.0;
    double fz = 0.0;
    double mx = 0.0;
    double my = 0.0;
    double mz = 0.0;
    bool hall = false;
};

using ForceRecord = std::vector<ForceSample>;

struct FlightCondition {
    double alpha_deg = 0.0;
    double freq_hz = 0.0;
    double airspeed_ms = 8.0;
    double gravity_offset_n = 0.0;
    double wrist_mount_deg = 0.0;
};

struct WindAxes {
    double lift = 0.0;
    double net_thrust = 0.0;
};

// Balance axes to wind axes, gravity offset G included:
//   L = sin(a) Fx + cos(a) Fz + G sin(a)
//   T = cos(a) Fx - sin(a) Fz + G cos(a)
// At alpha = 0 this gives T = Fx + G, which fixes the balance sign convention.
WindAxes to_wind_axes(double fx, double fz, double alpha, double gravity_offset);

// ---- cycle segmentation and averaging -------------------------------------

struct CycleRange {
    std::size_t begin = 0; // first sample (a trigger)
    std::size_t end = 0;   // one past the last sample (next trigger)
    std::size_t size() const { return end - begin; }
};

struct Segmentation {
    std::vector<CycleRange> cycles;
    std::vector<CycleRange> rejected; // outside [0.5, 2] x median length
};

// One range per inter-trigger interval. Throws TooFewTriggers.
Segmentation segment_cycles(std::span<const ForceSample> record);
// Same, from the sample indices of the triggers (ascending).
Segmentation segment_triggers(std::span<const std::size_t> trigger_indices);

struct CycleStats {
    double mean = 0.0;
    double rmse_across_cycles = 0.0;
    int n_cycles = 0;
};

CycleStats cycle_average(const std::vector<std::vector<double>>& cycles);
CycleStats cycle_average(std::span<const double> signal, const std::vector<CycleRange>& cycles);

// Mean trigger-to-trigger frequency of accepted cycles (Hz).
double cycle_frequency(std::span<const ForceSample> record, const Segmentation& seg);

// ---- quadratic response surfaces ------------------------------------------

// value = z0 + a*alpha + b*F + c*alpha^2 + d*F^2 + f*alpha*F
// alpha in degrees, F in Hz, value in gram-force.
struct AeroSurface {
    double z0 = 0.0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double f = 0.0;
    double r_value = 0.0;
    double rmse = 0.0;
    int n_points = 0;

    double operator()(double alpha, double freq) const {
        return z0 + a * alpha + b * freq + c * alpha * alpha + d * freq * freq + f * alpha * freq;
    }
};

struct SurfacePoint {
    double alpha = 0.0;
    double freq = 0.0;
    double value = 0.0;
};

// Ordinary least squares fit. Throws RankDeficient.
AeroSurface fit_surface(std::span<const SurfacePoint> points);

// ---- trim -------------------------------------------------------------------

struct TrimDomain {
    double alpha_lo = 0.0;
    double alpha_hi = 12.0;
    double freq_lo = 2.0;
    double freq_hi = 4.0;
    int alpha_steps = 240;
    int freq_scan_steps = 64;
};

struct ContourPoint {
    double alpha = 0.0;
    double freq = 0.0;
};

struct TrimPoint {
    double alpha_star = 0.0;
    double freq_star = 0.0;
    double lift_at_trim = 0.0;
    double thrust_at_trim = 0.0;
};

struct TrimResult {
    TrimPoint trim;
    std::vector<ContourPoint> contour; // zero net thrust, one per bracketed alpha
};

// Lowest frequency in the domain where thrust(alpha, F) = 0, by bisection.
std::optional<double> thrust_zero_frequency(const AeroSurface& thrust, double alpha,
                                            const TrimDomain& domain = {});

// Throws NoThrustZero or NoTrim.
TrimResult solve_trim(const AeroSurface& lift, const AeroSurface& thrust, double weight_g,
                      const TrimDomain& domain = {});

// ---- Butterworth low-pass ---------------------------------------------------

// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
    double b0 = 1.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};

class ButterworthLowpass {
public:
    // Throws InvalidCutoff unless 0 < cutoff < sample_rate / 2 and order >= 1.
    ButterworthLowpass(int order, double sample_rate, double cutoff);

    const std::vector<Biquad>& sections() const { return sections_; }
    std::vector<std::complex<double>> poles() const;
    std::complex<double> response(double freq_hz) const;
    double magnitude(double freq_hz) const { return std::abs(response(freq_hz)); }

    // Causal single pass from rest.
    std::vector<double> apply(std::span<const double> signal) const;

    int order() const { return order_; }
    double sample_rate() const { return sample_rate_; }
    double cutoff() const { return cutoff_; }

private:
    int order_;
    double sample_rate_;
    double cutoff_;
    std::vector<Biquad> sections_;
};

std::vector<double> butterworth_lowpass(std::span<const double> signal, double sample_rate,
                                        double cutoff, int order);

// ---- roll moment -------------------------------------------------------------

struct RollCondition {
    double alpha_deg = 0.0;
    double freq_hz = 0.0; // used when the record has too few triggers to measure it
    ForceRecord record;
};

struct RollMomentOptions {
    bool filter = true;
    double cutoff_hz = 12.0;
    int order = 5;
    double rmse_bound = 0.007; // N*m
};

struct RollConditionResult {
    double alpha_deg = 0.0;
    double freq_hz = 0.0;
    CycleStats stats;
    bool within_bound = true;
};

struct RollRegression {
    double alpha_deg = 0.0;
    double slope = 0.0;     // N*m per Hz
    double intercept = 0.0; // N*m
    double r_squared = 0.0;
    int n_points = 0;
};

struct RollMomentReport {
    std::vector<RollConditionResult> conditions; // sorted by (alpha, freq)
    std::vector<RollRegression> regressions;     // sorted by alpha
    bool all_within_bound = true;
};

// Cycle-averaged roll moment (mx) per condition and a line against
// frequency per angle of attack. Negative moments are left roll.
RollMomentReport roll_moment_analysis(const std::vector<RollCondition>& conditions,
                                      const RollMomentOptions& options = {});

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace morphwing

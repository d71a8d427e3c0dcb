#pragma once

// Shared fixtures and independent oracles for the unit and acceptance tests.
// Nothing here calls into the solvers it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "morphwing/aero.hpp"
#include "morphwing/flight_log.hpp"
#include "morphwing/linkage.hpp"

namespace testsupport {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = kPi / 180.0;

inline morphwing::LinkageGiven reference_given() {
    morphwing::LinkageGiven g;
    g.l_h = 110.0;
    g.l_r = 180.0;
    g.l_m = 370.0;
    g.b = 20.0;
    g.f = 30.0;
    g.extended = {51.0, 110.0, 147.0, 45.0};
    g.tucked = {20.0, 41.0, 35.0, 65.0};
    return g;
}

inline morphwing::LinkageDerived reference_lengths() {
    return {15.3646, 33.5769, 76.4231, 73.6915, 180.0, 20.1844, 16.9713, 202.8699};
}

struct SurfaceColumn {
    double wrist_mount_deg;
    morphwing::AeroSurface lift;
    morphwing::AeroSurface thrust;
};

inline morphwing::AeroSurface surface(double z0, double a, double b, double c, double d, double f) {
    morphwing::AeroSurface s;
    s.z0 = z0;
    s.a = a;
    s.b = b;
    s.c = c;
    s.d = d;
    s.f = f;
    return s;
}

inline std::vector<SurfaceColumn> reference_surfaces() {
    return {
        {10.0, surface(9.940, 22.879, 97.421, -0.095, -0.664, 0.576),
         surface(-127.799, 1.402, 18.077, -0.222, 7.276, -0.453)},
        {15.0, surface(155.857, 12.322, 29.811, 0.092, 12.722, 2.769),
         surface(-63.082, -0.231, -17.318, -0.213, 12.767, -0.6618)},
        {20.0, surface(191.549, 14.278, 11.376, -0.029, 17.959, 2.656),
         surface(-80.520, 2.939, -4.745, -0.417, 10.466, -0.939)},
        {25.0, surface(202.331, 13.544, 10.631, -0.038, 18.423, 3.454),
         surface(-67.745, 2.594, -11.970, -0.444, 10.952, -1.184)},
    };
}

inline std::array<double, 6> coefficients(const morphwing::AeroSurface& s) {
    return {s.z0, s.a, s.b, s.c, s.d, s.f};
}

// ---- linkage ------------------------------------------------------------------

// All roots of a scalar function on [lo, hi] by a uniform scan and bisection.
inline std::vector<double> scan_roots(const std::function<double(double)>& fn, double lo, double hi,
                                      int steps = 20000) {
    std::vector<double> roots;
    double x0 = lo;
    double f0 = fn(x0);
    for (int k = 1; k <= steps; ++k) {
        const double x1 = lo + (hi - lo) * k / steps;
        const double f1 = fn(x1);
        if (std::isfinite(f0) && std::isfinite(f1) && f0 * f1 <= 0.0 && f0 != f1) {
            double a = x0;
            double b = x1;
            double fa = f0;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = fn(m);
                if (fa * fm <= 0.0) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

struct OraclePose {
    double theta_s, theta_e, theta_w; // degrees
};

// Every assembly of the three vector loops at slider displacement x, found
// loop by loop with one free angle each. Angles in degrees.
inline std::vector<OraclePose> loop_oracle(const morphwing::LinkageDerived& l,
                                           const morphwing::LinkageGiven& g, double x) {
    const double ab = l.a + g.b;
    std::vector<OraclePose> out;
    // Slider-crank: c sin t1 = (a + b) sin t2, x = c cos t1 + (a + b) cos t2.
    auto t2_of = [&](double t1) { return std::asin(l.c * std::sin(t1) / ab); };
    auto slider = [&](double t1) { return l.c * std::cos(t1) + ab * std::cos(t2_of(t1)) - x; };
    for (double t1 : scan_roots(slider, 1e-6, kPi - 1e-6)) {
        const double t2 = t2_of(t1);
        // First four-bar: e (cos t3, sin t3) = i (cos t4, -sin t4) + d (cos t1, sin t1) + b (-cos t2, sin t2)
        auto ev = [&](double t4) {
            return std::array<double, 2>{l.i * std::cos(t4) + l.d * std::cos(t1) - g.b * std::cos(t2),
                                         -l.i * std::sin(t4) + l.d * std::sin(t1) + g.b * std::sin(t2)};
        };
        auto bar1 = [&](double t4) {
            const auto v = ev(t4);
            return v[0] * v[0] + v[1] * v[1] - l.e * l.e;
        };
        for (double t4 : scan_roots(bar1, -kPi, kPi)) {
            const auto v = ev(t4);
            const double t3 = std::atan2(v[1], v[0]);
            // Second four-bar: j (cos t5, -sin t5) = f (cos t3, sin t3) - h (cos t6, sin t6) + (g + i)(cos t4, -sin t4)
            auto jv = [&](double t6) {
                return std::array<double, 2>{
                    g.f * std::cos(t3) - l.h * std::cos(t6) + (l.g + l.i) * std::cos(t4),
                    g.f * std::sin(t3) - l.h * std::sin(t6) - (l.g + l.i) * std::sin(t4)};
            };
            auto bar2 = [&](double t6) {
                const auto w = jv(t6);
                return w[0] * w[0] + w[1] * w[1] - l.j * l.j;
            };
            for (double t6 : scan_roots(bar2, -kPi, kPi)) {
                out.push_back({t1 / kDeg, (t1 + t4) / kDeg, (t4 + t6) / kDeg});
            }
        }
    }
    return out;
}

// ---- least squares --------------------------------------------------------------

// Normal equations for the six-term quadratic, solved by Gaussian elimination
// with partial pivoting.
inline std::array<double, 6> normal_equation_fit(const std::vector<morphwing::SurfacePoint>& pts) {
    double m[6][7] = {};
    for (const auto& p : pts) {
        const double row[6] = {1.0, p.alpha, p.freq, p.alpha * p.alpha, p.freq * p.freq,
                               p.alpha * p.freq};
        for (int r = 0; r < 6; ++r) {
            for (int c = 0; c < 6; ++c) m[r][c] += row[r] * row[c];
            m[r][6] += row[r] * p.value;
        }
    }
    for (int col = 0; col < 6; ++col) {
        int piv = col;
        for (int r = col + 1; r < 6; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        }
        for (int c = 0; c < 7; ++c) std::swap(m[col][c], m[piv][c]);
        for (int r = col + 1; r < 6; ++r) {
            const double k = m[r][col] / m[col][col];
            for (int c = col; c < 7; ++c) m[r][c] -= k * m[col][c];
        }
    }
    std::array<double, 6> x{};
    for (int r = 5; r >= 0; --r) {
        double s = m[r][6];
        for (int c = r + 1; c < 6; ++c) s -= m[r][c] * x[c];
        x[r] = s / m[r][r];
    }
    return x;
}

// Regular grid over alpha in [0, 12] and F in [2, 4], evaluated on a surface.
inline std::vector<morphwing::SurfacePoint> grid_points(const morphwing::AeroSurface& s, int n_alpha,
                                                        int n_freq) {
    std::vector<morphwing::SurfacePoint> pts;
    for (int i = 0; i < n_alpha; ++i) {
        for (int k = 0; k < n_freq; ++k) {
            const double alpha = 12.0 * i / (n_alpha - 1);
            const double freq = 2.0 + 2.0 * k / (n_freq - 1);
            pts.push_back({alpha, freq, s(alpha, freq)});
        }
    }
    return pts;
}

// ---- trim ------------------------------------------------------------------------

struct GridTrim {
    double alpha;
    double freq;
    double alpha_step;
};

// Brute-force trim on an n x n grid over alpha in [0, 12], F in [2, 4]:
// lowest F cell where thrust changes sign, then the first alpha cell where
// lift - weight changes sign along that contour.
inline std::optional<GridTrim> grid_trim(const morphwing::AeroSurface& lift,
                                         const morphwing::AeroSurface& thrust, double weight,
                                         int n = 2000) {
    const double da = 12.0 / n;
    const double df = 2.0 / n;
    std::optional<double> prev_excess;
    double prev_alpha = 0.0;
    double prev_freq = 0.0;
    for (int ia = 0; ia <= n; ++ia) {
        const double alpha = ia * da;
        std::optional<double> fz;
        for (int kf = 0; kf < n; ++kf) {
            const double f0 = 2.0 + kf * df;
            const double t0 = thrust(alpha, f0);
            const double t1 = thrust(alpha, f0 + df);
            if (t0 == 0.0 || t0 * t1 < 0.0) {
                fz = f0 + df * t0 / (t0 - t1);
                break;
            }
        }
        if (!fz) {
            prev_excess.reset();
            continue;
        }
        const double excess = lift(alpha, *fz) - weight;
        if (prev_excess && *prev_excess * excess <= 0.0) {
            const double w = *prev_excess / (*prev_excess - excess);
            return GridTrim{prev_alpha + w * da, prev_freq + w * (*fz - prev_freq), da};
        }
        prev_excess = excess;
        prev_alpha = alpha;
        prev_freq = *fz;
    }
    return std::nullopt;
}

// ---- filter ------------------------------------------------------------------------

// |H| of an order-n digital Butterworth low-pass built by the bilinear
// transform with cutoff prewarping.
inline double butterworth_magnitude(int order, double fs, double fc, double f) {
    const double ratio = std::tan(kPi * f / fs) / std::tan(kPi * fc / fs);
    return 1.0 / std::sqrt(1.0 + std::pow(ratio, 2 * order));
}

// ---- synthetic records ----------------------------------------------------------

// A force record with a Hall trigger every `period_samples` samples after a
// warm-up, fx/fz chosen so the wind-axes lift and net thrust average to the
// requested values (grams) with a zero-mean flapping ripple on top.
inline morphwing::ForceRecord synthetic_force_record(double lift_g, double thrust_g, double alpha_deg,
                                                     double g_offset_n, int period_samples,
                                                     int cycles, double fs = 1000.0,
                                                     int warmup = 2000) {
    const double g0 = 9.80665e-3;
    const double L = lift_g * g0;
    const double T = thrust_g * g0;
    const double sa = std::sin(alpha_deg * kDeg);
    const double ca = std::cos(alpha_deg * kDeg);
    const double fx = sa * (L - g_offset_n * sa) + ca * (T - g_offset_n * ca);
    const double fz = ca * (L - g_offset_n * sa) - sa * (T - g_offset_n * ca);
    morphwing::ForceRecord rec;
    const int n = warmup + cycles * period_samples + 1;
    for (int k = 0; k < n; ++k) {
        morphwing::ForceSample s;
        s.t = k / fs;
        const double phase = 2.0 * kPi * k / period_samples;
        s.fx = fx + 0.3 * std::sin(phase);
        s.fz = fz + 1.5 * std::cos(phase);
        s.hall = k >= warmup && (k - warmup) % period_samples == 0;
        rec.push_back(s);
    }
    return rec;
}

// Roll moment present only on the downstroke: a half-wave rectified cosine
// centred on each trigger, scaled so its sampled cycle mean equals
// `mean_moment`.
inline morphwing::ForceRecord downstroke_moment_record(double mean_moment, int period_samples,
                                                       int cycles, double fs = 1000.0,
                                                       int warmup = 3000) {
    auto lobe = [&](int k) { return std::max(0.0, std::cos(2.0 * kPi * (k - warmup) / period_samples)); };
    double lobe_sum = 0.0;
    for (int k = 0; k < period_samples; ++k) lobe_sum += lobe(warmup + k);
    const double scale = mean_moment * period_samples / lobe_sum;
    morphwing::ForceRecord rec;
    const int n = warmup + cycles * period_samples + 1;
    for (int k = 0; k < n; ++k) {
        morphwing::ForceSample s;
        s.t = k / fs;
        s.mx = scale * lobe(k);
        s.hall = k >= warmup && (k - warmup) % period_samples == 0;
        rec.push_back(s);
    }
    return rec;
}

// A maneuver whose roll angle rises linearly, reaching 90 degrees at
// `cross_at` wingbeats after the maneuver start. Wingbeat markers are
// irregularly spaced and fall on sample instants.
inline morphwing::AttitudeLog synthetic_maneuver(double cross_at, double dilation = 1.0,
                                                 double jitter = 0.0, unsigned seed = 1) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-jitter, jitter);
    const double dt = 0.002 * dilation;
    morphwing::AttitudeLog log;
    std::vector<int> marker_idx;
    int idx = 350;
    for (int k = 0; k < 12; ++k) {
        marker_idx.push_back(idx);
        log.markers.push_back(idx * dt);
        idx += 150 + 10 * (k % 3) + static_cast<int>(std::lround(u(rng) / 0.002));
    }
    log.maneuver_marker = 3;
    const double rate = 90.0 / cross_at; // deg per wingbeat
    std::size_t k = 1;
    for (int n = 0; n <= marker_idx.back(); ++n) {
        while (k + 1 < marker_idx.size() && n > marker_idx[k]) ++k;
        const double tau = static_cast<double>(k - 1) + static_cast<double>(n - marker_idx[k - 1]) /
                                                            (marker_idx[k] - marker_idx[k - 1]);
        const double since = tau - static_cast<double>(log.maneuver_marker);
        morphwing::AttitudeSample s;
        s.t = n * dt;
        s.roll = 5.0 + (since > 0.0 ? rate * since : 0.0);
        s.pitch = 2.0 + 0.5 * std::sin(s.t);
        s.yaw = 30.0 + 4.0 * since;
        log.samples.push_back(s);
    }
    return log;
}

} // namespace testsupport

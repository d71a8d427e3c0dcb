#include <cmath>
#include <functional>

#include "morphwing/aero.hpp"
#include "morphwing/error.hpp"

namespace morphwing {

namespace {

// Bisection on a bracketed sign change; returns the midpoint of the final
// bracket once it is narrower than `tol`.
double bisect(const std::function<double(double)>& fn, double lo, double hi, double tol) {
    double flo = fn(lo);
    if (flo == 0.0) return lo;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::optional<double> thrust_zero_frequency(const AeroSurface& thrust, double alpha,
                                            const TrimDomain& domain) {
    auto fn = [&](double freq) { return thrust(alpha, freq); };
    const int n = std::max(1, domain.freq_scan_steps);
    const double step = (domain.freq_hi - domain.freq_lo) / n;
    double prev_f = domain.freq_lo;
    double prev_v = fn(prev_f);
    if (prev_v == 0.0) return prev_f;
    for (int k = 1; k <= n; ++k) {
        const double f = k == n ? domain.freq_hi : domain.freq_lo + k * step;
        const double v = fn(f);
        if (v == 0.0) return f;
        if ((v < 0.0) != (prev_v < 0.0)) return bisect(fn, prev_f, f, 1e-14);
        prev_f = f;
        prev_v = v;
    }
    return std::nullopt;
}

TrimResult solve_trim(const AeroSurface& lift, const AeroSurface& thrust, double weight_g,
                      const TrimDomain& domain) {
    if (!(domain.alpha_hi > domain.alpha_lo) || !(domain.freq_hi > domain.freq_lo) ||
        domain.alpha_steps < 1) {
        throw Error(ErrorKind::InvalidInput, "invalid trim search domain");
    }
    TrimResult result;
    const int n = domain.alpha_steps;
    const double step = (domain.alpha_hi - domain.alpha_lo) / n;
    std::vector<std::optional<double>> freq_at(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const double alpha = k == n ? domain.alpha_hi : domain.alpha_lo + k * step;
        freq_at[static_cast<std::size_t>(k)] = thrust_zero_frequency(thrust, alpha, domain);
        if (freq_at[static_cast<std::size_t>(k)]) {
            result.contour.push_back({alpha, *freq_at[static_cast<std::size_t>(k)]});
        }
    }
    if (result.contour.empty()) {
        throw Error(ErrorKind::NoThrustZero, "net thrust has no zero inside the search domain");
    }

    // Lift excess along the contour; NaN where the contour is absent.
    auto excess = [&](double alpha) {
        const auto f = thrust_zero_frequency(thrust, alpha, domain);
        return f ? lift(alpha, *f) - weight_g : std::nan("");
    };

    for (int k = 0; k < n; ++k) {
        const auto& f0 = freq_at[static_cast<std::size_t>(k)];
        const auto& f1 = freq_at[static_cast<std::size_t>(k) + 1];
        if (!f0 || !f1) continue;
        const double a0 = domain.alpha_lo + k * step;
        const double a1 = k + 1 == n ? domain.alpha_hi : domain.alpha_lo + (k + 1) * step;
        const double e0 = lift(a0, *f0) - weight_g;
        const double e1 = lift(a1, *f1) - weight_g;
        if (e0 != 0.0 && e1 != 0.0 && (e0 < 0.0) == (e1 < 0.0)) continue;

        const double alpha = bisect(excess, a0, a1, 1e-13);
        const auto freq = thrust_zero_frequency(thrust, alpha, domain);
        if (!freq) continue;
        result.trim.alpha_star = alpha;
        result.trim.freq_star = *freq;
        result.trim.lift_at_trim = lift(alpha, *freq);
        result.trim.thrust_at_trim = thrust(alpha, *freq);
        return result;
    }
    throw Error(ErrorKind::NoTrim, "lift along the zero-thrust contour never reaches the weight");
}

} // namespace morphwing

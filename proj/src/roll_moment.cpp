#include <algorithm>
#include <cmath>
#include <map>

#include "morphwing/aero.hpp"
#include "morphwing/error.hpp"

namespace morphwing {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw Error(ErrorKind::InvalidInput, "line fit needs at least 2 paired points");
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0.0) throw Error(ErrorKind::RankDeficient, "line fit needs distinct x values");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = y[k] - (fit.intercept + fit.slope * x[k]);
        ss_res += r * r;
    }
    // A flat line through flat data is a perfect fit.
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

RollMomentReport roll_moment_analysis(const std::vector<RollCondition>& conditions,
                                      const RollMomentOptions& options) {
    RollMomentReport report;
    for (const auto& cond : conditions) {
        const ForceRecord& rec = cond.record;
        const Segmentation seg = segment_cycles(rec);

        std::vector<double> moment(rec.size());
        std::transform(rec.begin(), rec.end(), moment.begin(),
                       [](const ForceSample& s) { return s.mx; });
        if (options.filter) {
            const double fs = static_cast<double>(rec.size() - 1) / (rec.back().t - rec.front().t);
            moment = butterworth_lowpass(moment, fs, options.cutoff_hz, options.order);
        }

        RollConditionResult r;
        r.alpha_deg = cond.alpha_deg;
        r.freq_hz = seg.cycles.empty() ? cond.freq_hz : cycle_frequency(rec, seg);
        r.stats = cycle_average(moment, seg.cycles);
        r.within_bound = r.stats.rmse_across_cycles <= options.rmse_bound;
        report.all_within_bound = report.all_within_bound && r.within_bound;
        report.conditions.push_back(r);
    }
    std::sort(report.conditions.begin(), report.conditions.end(),
              [](const RollConditionResult& a, const RollConditionResult& b) {
                  return a.alpha_deg != b.alpha_deg ? a.alpha_deg < b.alpha_deg
                                                    : a.freq_hz < b.freq_hz;
              });

    std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_alpha;
    for (const auto& r : report.conditions) {
        by_alpha[r.alpha_deg].first.push_back(r.freq_hz);
        by_alpha[r.alpha_deg].second.push_back(r.stats.mean);
    }
    for (const auto& [alpha, xy] : by_alpha) {
        if (xy.first.size() < 2) {
            throw Error(ErrorKind::InvalidInput,
                        "roll-moment regression needs >= 2 frequencies per angle of attack");
        }
        const LineFit fit = fit_line(xy.first, xy.second);
        report.regressions.push_back(
            {alpha, fit.slope, fit.intercept, fit.r_squared, static_cast<int>(xy.first.size())});
    }
    return report;
}

} // namespace morphwing

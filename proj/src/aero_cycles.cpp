#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "morphwing/aero.hpp"
#include "morphwing/error.hpp"

namespace morphwing {

WindAxes to_wind_axes(double fx, double fz, double alpha, double gravity_offset) {
    const double s = std::sin(alpha);
    const double c = std::cos(alpha);
    return {s * fx + c * fz + gravity_offset * s, c * fx - s * fz + gravity_offset * c};
}

Segmentation segment_triggers(std::span<const std::size_t> idx) {
    if (idx.size() < 2) {
        throw Error(ErrorKind::TooFewTriggers,
                    "need at least 2 hall triggers, found " + std::to_string(idx.size()));
    }
    std::vector<CycleRange> all;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) all.push_back({idx[k], idx[k + 1]});

    std::vector<std::size_t> lengths;
    for (const auto& c : all) lengths.push_back(c.size());
    std::nth_element(lengths.begin(), lengths.begin() + lengths.size() / 2, lengths.end());
    double median = static_cast<double>(lengths[lengths.size() / 2]);
    if (lengths.size() % 2 == 0) {
        const auto lower = *std::max_element(lengths.begin(), lengths.begin() + lengths.size() / 2);
        median = 0.5 * (median + static_cast<double>(lower));
    }

    Segmentation seg;
    for (const auto& c : all) {
        const auto n = static_cast<double>(c.size());
        if (n < 0.5 * median || n > 2.0 * median) {
            seg.rejected.push_back(c);
        } else {
            seg.cycles.push_back(c);
        }
    }
    return seg;
}

Segmentation segment_cycles(std::span<const ForceSample> record) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < record.size(); ++k) {
        if (k > 0 && !(record[k].t > record[k - 1].t)) {
            throw Error(ErrorKind::InvalidInput, "force record time must be strictly increasing");
        }
        if (record[k].hall) idx.push_back(k);
    }
    return segment_triggers(idx);
}

CycleStats cycle_average(const std::vector<std::vector<double>>& cycles) {
    CycleStats s;
    double total = 0.0;
    std::size_t count = 0;
    std::vector<double> means;
    for (const auto& c : cycles) {
        if (c.empty()) continue;
        double sum = 0.0;
        for (double v : c) sum += v;
        total += sum;
        count += c.size();
        means.push_back(sum / static_cast<double>(c.size()));
    }
    if (means.empty()) throw Error(ErrorKind::TooFewTriggers, "no complete cycle to average");
    s.n_cycles = static_cast<int>(means.size());
    s.mean = total / static_cast<double>(count);
    double ss = 0.0;
    for (double m : means) ss += (m - s.mean) * (m - s.mean);
    s.rmse_across_cycles = std::sqrt(ss / static_cast<double>(means.size()));
    return s;
}

CycleStats cycle_average(std::span<const double> signal, const std::vector<CycleRange>& cycles) {
    std::vector<std::vector<double>> parts;
    parts.reserve(cycles.size());
    for (const auto& c : cycles) {
        if (c.end > signal.size()) throw Error(ErrorKind::InvalidInput, "cycle range exceeds signal");
        parts.emplace_back(signal.begin() + static_cast<std::ptrdiff_t>(c.begin),
                           signal.begin() + static_cast<std::ptrdiff_t>(c.end));
    }
    return cycle_average(parts);
}

double cycle_frequency(std::span<const ForceSample> record, const Segmentation& seg) {
    if (seg.cycles.empty()) throw Error(ErrorKind::TooFewTriggers, "no accepted cycles");
    double total = 0.0;
    for (const auto& c : seg.cycles) total += record[c.end].t - record[c.begin].t;
    return static_cast<double>(seg.cycles.size()) / total;
}

} // namespace morphwing

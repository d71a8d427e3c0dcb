#include <cmath>
#include <complex>

#include "morphwing/aero.hpp"
#include "morphwing/error.hpp"
#include "morphwing/units.hpp"

namespace morphwing {

namespace {

using cplx = std::complex<double>;

cplx bilinear(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

} // namespace

ButterworthLowpass::ButterworthLowpass(int order, double sample_rate, double cutoff)
    : order_(order), sample_rate_(sample_rate), cutoff_(cutoff) {
    if (order < 1) throw Error(ErrorKind::InvalidCutoff, "filter order must be >= 1");
    if (!(sample_rate > 0.0) || !(cutoff > 0.0) || !(cutoff < 0.5 * sample_rate)) {
        throw Error(ErrorKind::InvalidCutoff, "cutoff must satisfy 0 < cutoff < sample_rate / 2");
    }
    // Prewarped analog cutoff so the digital -3 dB point lands on `cutoff`.
    const double wc = 2.0 * sample_rate * std::tan(kPi * cutoff / sample_rate);

    for (int k = 0; k < order / 2; ++k) {
        const double theta = kPi * (2.0 * k + order + 1) / (2.0 * order);
        const cplx z = bilinear(wc * std::polar(1.0, theta), sample_rate);
        Biquad q;
        q.a1 = -2.0 * z.real();
        q.a2 = std::norm(z);
        const double gain = (1.0 + q.a1 + q.a2) / 4.0; // unity at DC, zeros at z = -1
        q.b0 = gain;
        q.b1 = 2.0 * gain;
        q.b2 = gain;
        sections_.push_back(q);
    }
    if (order % 2 == 1) {
        const double z = bilinear(cplx(-wc, 0.0), sample_rate).real();
        Biquad q;
        q.a1 = -z;
        const double gain = (1.0 - z) / 2.0;
        q.b0 = gain;
        q.b1 = gain;
        sections_.push_back(q);
    }
}

std::vector<std::complex<double>> ButterworthLowpass::poles() const {
    std::vector<cplx> out;
    for (const auto& q : sections_) {
        if (q.a2 == 0.0) {
            out.emplace_back(-q.a1, 0.0);
            continue;
        }
        const cplx disc = std::sqrt(cplx(q.a1 * q.a1 - 4.0 * q.a2, 0.0));
        out.push_back((-q.a1 + disc) / 2.0);
        out.push_back((-q.a1 - disc) / 2.0);
    }
    return out;
}

std::complex<double> ButterworthLowpass::response(double freq_hz) const {
    const cplx zinv = std::polar(1.0, -2.0 * kPi * freq_hz / sample_rate_);
    cplx h(1.0, 0.0);
    for (const auto& q : sections_) {
        h *= (q.b0 + q.b1 * zinv + q.b2 * zinv * zinv) / (1.0 + q.a1 * zinv + q.a2 * zinv * zinv);
    }
    return h;
}

std::vector<double> ButterworthLowpass::apply(std::span<const double> signal) const {
    std::vector<double> y(signal.begin(), signal.end());
    for (const auto& q : sections_) {
        // Direct form II transposed.
        double s1 = 0.0;
        double s2 = 0.0;
        for (double& v : y) {
            const double x = v;
            const double out = q.b0 * x + s1;
            s1 = q.b1 * x - q.a1 * out + s2;
            s2 = q.b2 * x - q.a2 * out;
            v = out;
        }
    }
    return y;
}

std::vector<double> butterworth_lowpass(std::span<const double> signal, double sample_rate,
                                        double cutoff, int order) {
    return ButterworthLowpass(order, sample_rate, cutoff).apply(signal);
}

} // namespace morphwing

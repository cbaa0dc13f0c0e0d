#include "msm/pulse.hpp"

#include <cmath>
#include <stdexcept>

namespace msm {

namespace {
constexpr double kPi = 3.14159265358979323846;

double sinc(double x) {
    if (x == 0.0) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}
}  // namespace

double raised_cosine(double t, double beta) {
    const double d = 1.0 - (2.0 * beta * t) * (2.0 * beta * t);
    // beta = 0.25 puts the singularity exactly on a sample, so the guard has
    // to be an interval rather than an equality test.
    if (std::abs(d) < 1e-9) return (beta / 2.0) * std::sin(kPi / (2.0 * beta));
    return sinc(t) * std::cos(kPi * beta * t) / d;
}

PulseShape design_rc_filter(double beta, int span_symbols, int sps) {
    if (!(beta > 0.0) || beta > 1.0)
        throw std::invalid_argument("design_rc_filter: beta must be in (0, 1]");
    if (span_symbols < 2 || span_symbols % 2 != 0)
        throw std::invalid_argument("design_rc_filter: span must be even and >= 2");
    if (sps < 1) throw std::invalid_argument("design_rc_filter: sps must be >= 1");

    PulseShape p;
    p.beta = beta;
    p.span = span_symbols;
    p.sps = sps;
    const int n_taps = span_symbols * sps + 1;
    p.taps.resize(n_taps);
    const int center = p.center();
    for (int n = 0; n < n_taps; ++n) {
        const double t = static_cast<double>(n - center) / static_cast<double>(sps);
        p.taps[n] = raised_cosine(t, beta);
    }
    return p;
}

}  // namespace msm

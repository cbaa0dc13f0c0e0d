#pragma once

#include <array>
#include <vector>

namespace msm {

// Default parameter grid for dataset generation.
inline constexpr std::array<double, 6> kRollOffGrid = {0.25, 0.35, 0.45, 0.55, 0.65, 0.75};
inline constexpr std::array<int, 4> kSpanGrid = {10, 12, 14, 16};
inline constexpr int kDefaultSps = 8;

// Truncated raised-cosine FIR pulse, unit symbol period, sampled at sps
// samples per symbol. taps has span*sps + 1 entries so the group delay is an
// integer number of samples and symbol peaks land exactly on samples.
struct PulseShape {
    double beta = 0.0;
    int span = 0;  // filter span in symbols
    int sps = 0;   // samples per symbol (L)
    std::vector<double> taps;

    int center() const { return span * sps / 2; }
};

// Raised-cosine impulse response at symbol-time offset t (T = 1). The
// removable singularity at |t| = 1/(2 beta) is replaced by its limit.
double raised_cosine(double t, double beta);

PulseShape design_rc_filter(double beta, int span_symbols, int sps);

}  // namespace msm

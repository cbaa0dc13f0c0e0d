#include "msm/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace msm {

MaskSpec random_mask(int num_symbols, double fraction, int sps, RandomStream& rng) {
    if (num_symbols < 1) throw std::invalid_argument("random_mask: num_symbols must be >= 1");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("random_mask: fraction must be in (0, 1)");
    if (sps < 1) throw std::invalid_argument("random_mask: sps must be >= 1");

    const int n_masked = static_cast<int>(std::floor(fraction * num_symbols));
    if (n_masked == 0)
        throw std::invalid_argument("random_mask: floor(fraction * K) is zero, no targets");

    // Partial Fisher-Yates: the first n_masked entries are a uniform sample
    // without replacement.
    std::vector<int> idx(num_symbols);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < n_masked; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(num_symbols - i));
        std::swap(idx[i], idx[j]);
    }
    MaskSpec spec;
    spec.sps = sps;
    spec.masked_symbols.assign(idx.begin(), idx.begin() + n_masked);
    std::sort(spec.masked_symbols.begin(), spec.masked_symbols.end());
    return spec;
}

MaskSpec impulse_guided_mask(const std::vector<int>& hits, int sps) {
    if (sps < 1) throw std::invalid_argument("impulse_guided_mask: sps must be >= 1");
    MaskSpec spec;
    spec.sps = sps;
    spec.masked_symbols = hits;
    std::sort(spec.masked_symbols.begin(), spec.masked_symbols.end());
    spec.masked_symbols.erase(
        std::unique(spec.masked_symbols.begin(), spec.masked_symbols.end()),
        spec.masked_symbols.end());
    if (!spec.masked_symbols.empty() && spec.masked_symbols.front() < 0)
        throw std::out_of_range("impulse_guided_mask: negative symbol index");
    return spec;
}

Waveform apply_mask(Waveform wave, const MaskSpec& spec) {
    if (spec.sps != wave.sps)
        throw std::invalid_argument("apply_mask: spec and waveform disagree on sps");
    for (int k = 0; k < spec.count(); ++k) {
        const auto [lo, hi] = spec.span(k);
        if (lo < 0 || hi > wave.num_samples())
            throw std::out_of_range("apply_mask: masked span outside the waveform");
        std::fill(wave.i_samples.begin() + lo, wave.i_samples.begin() + hi, 0.0);
        std::fill(wave.q_samples.begin() + lo, wave.q_samples.begin() + hi, 0.0);
    }
    return wave;
}

}  // namespace msm

#pragma once

#include <utility>
#include <vector>

#include "msm/rng.hpp"
#include "msm/waveform.hpp"

namespace msm {

// A set of masked symbols. Symbol i's span is the sample range
// [i*sps, (i+1)*sps); spans of distinct symbols are disjoint by construction.
struct MaskSpec {
    std::vector<int> masked_symbols;  // ascending, distinct
    int sps = 0;

    bool empty() const { return masked_symbols.empty(); }
    int count() const { return static_cast<int>(masked_symbols.size()); }
    std::pair<int, int> span(int k) const {  // half-open sample range of entry k
        const int i = masked_symbols[k];
        return {i * sps, (i + 1) * sps};
    }
};

// Selects exactly floor(fraction * num_symbols) distinct symbols uniformly
// without replacement. Rejects selections that would produce zero targets.
MaskSpec random_mask(int num_symbols, double fraction, int sps, RandomStream& rng);

// Spec masking exactly the given (hit) symbols. An empty hit set yields an
// empty spec; callers decide whether that is an error for their use.
MaskSpec impulse_guided_mask(const std::vector<int>& hits, int sps);

// Zeroes the masked sample spans; everything else, including symbol_ids, is
// left untouched.
Waveform apply_mask(Waveform wave, const MaskSpec& spec);

}  // namespace msm

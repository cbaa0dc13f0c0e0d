#pragma once

#include <cstdint>
#include <vector>

#include "msm/constellation.hpp"
#include "msm/pulse.hpp"
#include "msm/rng.hpp"

namespace msm {

struct WaveformMeta {
    Modulation modulation = Modulation::BPSK;
    double beta = 0.0;
    int span = 0;
    double gain = 1.0;  // normalization gain applied to the raw samples
};

// Oversampled baseband waveform with symbol-aligned spans: symbol i owns
// samples [i*L, (i+1)*L) and its pulse peak sits at sample i*L.
struct Waveform {
    std::vector<double> i_samples;
    std::vector<double> q_samples;
    std::vector<std::uint16_t> symbol_ids;  // the K retained symbols
    int sps = 0;
    WaveformMeta meta;

    int num_symbols() const { return static_cast<int>(symbol_ids.size()); }
    int num_samples() const { return static_cast<int>(i_samples.size()); }
};

// Renders a symbol sequence into a pulse-shaped waveform. The sequence must
// carry span/2 guard symbols on each side (length K + span); guards provide
// realistic inter-symbol interference at the block edges and are dropped from
// the labels. With normalize, samples are scaled to unit mean power and the
// gain is recorded in meta.
Waveform synthesize(const SymbolSequence& symbols, const PulseShape& pulse,
                    bool normalize = true);

struct DatasetConfig {
    std::vector<Modulation> modulations{kAllModulations.begin(), kAllModulations.end()};
    std::vector<double> roll_offs{kRollOffGrid.begin(), kRollOffGrid.end()};
    std::vector<int> spans{kSpanGrid.begin(), kSpanGrid.end()};
    int symbols_per_waveform = 128;  // K
    int sps = kDefaultSps;           // L
};

// Samples modulation, roll-off and span uniformly and independently, draws
// K + span symbols and synthesizes the normalized waveform.
Waveform generate_example(const DatasetConfig& config, const Vocabulary& vocab,
                          RandomStream& rng);

}  // namespace msm

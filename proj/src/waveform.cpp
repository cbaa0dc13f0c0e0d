#include "msm/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msm {

Waveform synthesize(const SymbolSequence& symbols, const PulseShape& pulse, bool normalize) {
    const int total = symbols.length();
    const int span = pulse.span;
    const int sps = pulse.sps;
    const int retained = total - span;
    if (retained < 1)
        throw std::invalid_argument("synthesize: need K + span symbols (span/2 guards per side)");
    if (static_cast<int>(pulse.taps.size()) != span * sps + 1)
        throw std::invalid_argument("synthesize: pulse tap count inconsistent with span*sps+1");

    const int n_out = retained * sps;
    Waveform w;
    w.i_samples.assign(n_out, 0.0);
    w.q_samples.assign(n_out, 0.0);
    w.sps = sps;

    // Full convolution of the upsampled impulse train with the pulse, sliced
    // so that retained symbol i peaks at sample i*sps. Symbol j's peak lands
    // at j*sps + center in convolution coordinates; the slice starts at
    // span*sps, i.e. the peak of the first retained symbol (j = span/2).
    const int n_taps = span * sps + 1;
    const int offset = span * sps;
    for (int j = 0; j < total; ++j) {
        const double xi = symbols.iq[j].real();
        const double xq = symbols.iq[j].imag();
        const int base = j * sps - offset;
        const int t_lo = std::max(0, -base);
        const int t_hi = std::min(n_taps, n_out - base);
        for (int t = t_lo; t < t_hi; ++t) {
            w.i_samples[base + t] += xi * pulse.taps[t];
            w.q_samples[base + t] += xq * pulse.taps[t];
        }
    }

    w.symbol_ids.assign(symbols.ids.begin() + span / 2,
                        symbols.ids.begin() + span / 2 + retained);
    w.meta.modulation = symbols.modulation;
    w.meta.beta = pulse.beta;
    w.meta.span = span;
    w.meta.gain = 1.0;

    if (normalize) {
        double power = 0.0;
        for (int n = 0; n < n_out; ++n)
            power += w.i_samples[n] * w.i_samples[n] + w.q_samples[n] * w.q_samples[n];
        power /= static_cast<double>(n_out);
        if (!(power > 0.0))
            throw std::runtime_error("synthesize: degenerate all-zero waveform");
        const double gain = 1.0 / std::sqrt(power);
        for (int n = 0; n < n_out; ++n) {
            w.i_samples[n] *= gain;
            w.q_samples[n] *= gain;
        }
        w.meta.gain = gain;
    }
    return w;
}

Waveform generate_example(const DatasetConfig& config, const Vocabulary& vocab,
                          RandomStream& rng) {
    if (config.modulations.empty() || config.roll_offs.empty() || config.spans.empty())
        throw std::invalid_argument("generate_example: empty parameter ranges");
    if (config.symbols_per_waveform < 1)
        throw std::invalid_argument("generate_example: symbols_per_waveform must be >= 1");

    const Modulation mod = config.modulations[rng.uniform_int(config.modulations.size())];
    const double beta = config.roll_offs[rng.uniform_int(config.roll_offs.size())];
    const int span = config.spans[rng.uniform_int(config.spans.size())];

    const PulseShape pulse = design_rc_filter(beta, span, config.sps);
    const SymbolSequence symbols =
        draw_symbols(scheme(mod), vocab, config.symbols_per_waveform + span, rng);
    return synthesize(symbols, pulse);
}

}  // namespace msm

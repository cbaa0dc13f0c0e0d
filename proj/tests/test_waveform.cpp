#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "msm/waveform.hpp"

using namespace msm;

namespace {

// Direct evaluation of the discrete signal sum s[n] = sum_k x[k] g(n Ts - kT)
// with the truncated pulse, independent of the upsample/convolve/slice
// pipeline. Retained symbol i peaks at local sample i*L.
std::complex<double> direct_signal_sum(const SymbolSequence& symbols, double beta, int span,
                                       int sps, int n) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < symbols.length(); ++j) {
        // symbol j peaks at local sample (j - span/2) * sps
        const double t = static_cast<double>(n - (j - span / 2) * sps) / sps;
        if (std::abs(t) > span / 2.0) continue;  // truncated support
        const double d = 1.0 - (2.0 * beta * t) * (2.0 * beta * t);
        double g;
        if (std::abs(d) < 1e-9) {
            g = (beta / 2.0) * std::sin(M_PI / (2.0 * beta));
        } else {
            const double s = t == 0.0 ? 1.0 : std::sin(M_PI * t) / (M_PI * t);
            g = s * std::cos(M_PI * beta * t) / d;
        }
        acc += symbols.iq[j] * g;
    }
    return acc;
}

SymbolSequence zero_sequence(Modulation mod, int n) {
    SymbolSequence s;
    s.modulation = mod;
    s.ids.assign(n, 0);
    s.iq.assign(n, {0.0, 0.0});
    return s;
}

}  // namespace

TEST_CASE("synthesize: a single mid-sequence pulse has Nyquist zeros at peaks") {
    const PulseShape pulse = design_rc_filter(0.35, 10, 8);
    SymbolSequence s = zero_sequence(Modulation::BPSK, 16 + 10);
    s.iq[13] = {1.0, 0.0};  // retained symbol 8
    const Waveform w = synthesize(s, pulse, /*normalize=*/false);
    REQUIRE(w.num_samples() == 16 * 8);
    CHECK(w.i_samples[8 * 8] == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 1; k <= 5; ++k) {
        CHECK(std::abs(w.i_samples[(8 + k) * 8]) < 1e-12);
        CHECK(std::abs(w.i_samples[(8 - k) * 8]) < 1e-12);
    }
}

TEST_CASE("synthesize: matches the direct signal sum (oracle)") {
    const Vocabulary vocab = build_vocabulary();
    for (const auto& [beta, span] : {std::pair{0.25, 10}, {0.55, 14}, {0.75, 16}}) {
        const PulseShape pulse = design_rc_filter(beta, span, 8);
        RandomStream rng(21);
        const auto symbols = draw_symbols(scheme(Modulation::QAM16), vocab, 32 + span, rng);
        const Waveform w = synthesize(symbols, pulse, /*normalize=*/false);
        for (int n = 0; n < w.num_samples(); n += 7) {
            const auto expect = direct_signal_sum(symbols, beta, span, 8, n);
            CHECK(w.i_samples[n] == doctest::Approx(expect.real()).epsilon(1e-9));
            CHECK(w.q_samples[n] == doctest::Approx(expect.imag()).epsilon(1e-9));
        }
    }
}

TEST_CASE("synthesize: bpsk peak signs carry the symbols") {
    const Vocabulary vocab = build_vocabulary();
    for (double beta : {0.25, 0.45, 0.75}) {
        for (int span : {10, 16}) {
            RandomStream rng(static_cast<std::uint64_t>(beta * 100) + span);
            const PulseShape pulse = design_rc_filter(beta, span, 8);
            const auto symbols = draw_symbols(scheme(Modulation::BPSK), vocab, 64 + span, rng);
            const Waveform w = synthesize(symbols, pulse);
            for (int i = 0; i < w.num_symbols(); ++i) {
                const double truth = symbols.iq[i + span / 2].real();
                CHECK(w.i_samples[i * 8] * truth > 0.0);
            }
        }
    }
}

TEST_CASE("synthesize: peak alignment recovers the canonical symbol") {
    const Vocabulary vocab = build_vocabulary();
    RandomStream rng(31);
    DatasetConfig config;
    for (int trial = 0; trial < 8; ++trial) {
        const Waveform w = generate_example(config, vocab, rng);
        for (int i = 0; i < w.num_symbols(); ++i) {
            const std::complex<double> peak(w.i_samples[i * w.sps], w.q_samples[i * w.sps]);
            const std::complex<double> expect = vocab.value_of(w.symbol_ids[i]);
            CHECK(std::abs(peak / w.meta.gain - expect) < 1e-9);
        }
    }
}

TEST_CASE("synthesize: unit power after normalization") {
    const Vocabulary vocab = build_vocabulary();
    RandomStream rng(37);
    DatasetConfig config;
    for (int trial = 0; trial < 8; ++trial) {
        const Waveform w = generate_example(config, vocab, rng);
        double power = 0.0;
        for (int n = 0; n < w.num_samples(); ++n)
            power += w.i_samples[n] * w.i_samples[n] + w.q_samples[n] * w.q_samples[n];
        power /= w.num_samples();
        CHECK(std::abs(power - 1.0) < 1e-9);
    }
}

TEST_CASE("generate_example: default geometry is 1024 samples, 128 symbols") {
    const Vocabulary vocab = build_vocabulary();
    RandomStream rng(1);
    const Waveform w = generate_example(DatasetConfig{}, vocab, rng);
    CHECK(w.num_samples() == 1024);
    CHECK(w.num_symbols() == 128);
    CHECK(w.sps == 8);
}

TEST_CASE("generate_example: bpsk-only config uses only the two bpsk ids") {
    const Vocabulary vocab = build_vocabulary();
    DatasetConfig config;
    config.modulations = {Modulation::BPSK};
    RandomStream rng(2);
    const Waveform w = generate_example(config, vocab, rng);
    const auto& bpsk = vocab.members[static_cast<int>(Modulation::BPSK)];
    for (auto id : w.symbol_ids) CHECK((id == bpsk[0] || id == bpsk[1]));
}

TEST_CASE("generate_example: determinism and modulation mixing") {
    const Vocabulary vocab = build_vocabulary();
    DatasetConfig config;
    {
        RandomStream r1(77), r2(77);
        const Waveform a = generate_example(config, vocab, r1);
        const Waveform b = generate_example(config, vocab, r2);
        CHECK(a.i_samples == b.i_samples);
        CHECK(a.q_samples == b.q_samples);
        CHECK(a.symbol_ids == b.symbol_ids);
    }
    config.symbols_per_waveform = 8;  // keep the Monte Carlo cheap
    RandomStream rng(123);
    std::vector<int> counts(kNumModulations, 0);
    const int n = 10000;
    for (int i = 0; i < n; ++i)
        ++counts[static_cast<int>(generate_example(config, vocab, rng).meta.modulation)];
    for (int c : counts)
        CHECK(std::abs(c / static_cast<double>(n) - 0.125) < 0.02);
}

TEST_CASE("synthesize: rejects sequences without guard symbols") {
    const PulseShape pulse = design_rc_filter(0.25, 10, 8);
    CHECK_THROWS_AS(synthesize(zero_sequence(Modulation::BPSK, 10), pulse),
                    std::invalid_argument);
    CHECK_THROWS_AS(synthesize(zero_sequence(Modulation::BPSK, 64), pulse),
                    std::runtime_error);  // all-zero waveform cannot be normalized
}

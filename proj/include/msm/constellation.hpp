#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "msm/rng.hpp"

namespace msm {

enum class Modulation : int {
    BPSK = 0,
    QPSK,
    PSK8,
    PSK16,
    QAM4,
    QAM16,
    QAM64,
    QAM256,
};

inline constexpr int kNumModulations = 8;
inline constexpr std::array<Modulation, kNumModulations> kAllModulations = {
    Modulation::BPSK,  Modulation::QPSK,  Modulation::PSK8,  Modulation::PSK16,
    Modulation::QAM4,  Modulation::QAM16, Modulation::QAM64, Modulation::QAM256,
};

std::string to_string(Modulation mod);
Modulation modulation_from_string(const std::string& name);

// Exact identity of a constellation point. PSK points live on the unit circle
// and are identified by their angle index (multiples of 22.5 degrees); QAM
// points live on the odd-integer grid and are identified by their integer
// coordinates. Keeping the identity symbolic avoids floating-point aliasing
// when the same point appears in several modulations.
struct CanonicalPoint {
    enum class Kind : std::uint8_t { Circle, Grid };
    Kind kind;
    // Circle: a = angle index in [0,16), b = 0. Grid: (a, b) odd in [-15,15].
    int a = 0;
    int b = 0;

    std::complex<double> value() const;
    bool operator==(const CanonicalPoint&) const = default;
};

struct ModulationScheme {
    Modulation name;
    std::vector<CanonicalPoint> points;  // local symbol index -> point
    int order() const { return static_cast<int>(points.size()); }
};

// The canonical (un-normalized) form of each scheme: PSK on the unit circle
// with PSK16 anchored at 0 degrees and QPSK offset by 45, QAM on nested
// odd-integer grids.
const ModulationScheme& scheme(Modulation mod);

// Global symbol-ID space across all eight modulations. Circle points occupy
// IDs [0,16) by angle index; grid points occupy [16,272) in (I,Q) row-major
// order. V = 272.
struct Vocabulary {
    std::vector<CanonicalPoint> entries;                          // ID -> point
    std::array<std::vector<std::uint16_t>, kNumModulations> members;  // local -> global
    std::vector<double> class_freq;  // mixture frequency over all 8 modulations

    int size() const { return static_cast<int>(entries.size()); }
    std::uint16_t id_of(const CanonicalPoint& p) const;
    const CanonicalPoint& point_of(std::uint16_t id) const { return entries.at(id); }
    std::complex<double> value_of(std::uint16_t id) const { return entries.at(id).value(); }
};

Vocabulary build_vocabulary();

struct SymbolSequence {
    Modulation modulation;
    std::vector<std::uint16_t> ids;
    std::vector<std::complex<double>> iq;  // canonical amplitudes, pre-normalization

    int length() const { return static_cast<int>(ids.size()); }
};

// Draws symbols i.i.d. uniform over the scheme's points.
SymbolSequence draw_symbols(const ModulationScheme& mod, const Vocabulary& vocab, int count,
                            RandomStream& rng);

// Per-ID probability when the modulation is first drawn uniformly from `mods`
// and the symbol uniformly from that modulation. IDs never produced by `mods`
// get frequency 0.
std::vector<double> class_frequencies(const Vocabulary& vocab,
                                      const std::vector<Modulation>& mods);

// The full eight-modulation mixture: freq(c) = (1/8) * sum_mod 1{c in mod} / |mod|.
std::vector<double> class_frequencies(const Vocabulary& vocab);

}  // namespace msm

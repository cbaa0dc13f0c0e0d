#include "msm/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace msm {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<CanonicalPoint> circle_points(std::initializer_list<int> angle_indices) {
    std::vector<CanonicalPoint> pts;
    pts.reserve(angle_indices.size());
    for (int k : angle_indices) pts.push_back({CanonicalPoint::Kind::Circle, k, 0});
    return pts;
}

// Odd-integer grid {-(2n-1), ..., -1, +1, ..., 2n-1}^2, row-major in (I, Q).
std::vector<CanonicalPoint> grid_points(int half_side) {
    std::vector<CanonicalPoint> pts;
    pts.reserve(static_cast<std::size_t>(4 * half_side * half_side));
    for (int i = -(2 * half_side - 1); i <= 2 * half_side - 1; i += 2)
        for (int q = -(2 * half_side - 1); q <= 2 * half_side - 1; q += 2)
            pts.push_back({CanonicalPoint::Kind::Grid, i, q});
    return pts;
}

ModulationScheme make_scheme(Modulation mod) {
    switch (mod) {
        case Modulation::BPSK:
            return {mod, circle_points({0, 8})};
        case Modulation::QPSK:
            return {mod, circle_points({2, 6, 10, 14})};
        case Modulation::PSK8:
            return {mod, circle_points({0, 2, 4, 6, 8, 10, 12, 14})};
        case Modulation::PSK16:
            return {mod, circle_points({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15})};
        case Modulation::QAM4:
            return {mod, grid_points(1)};
        case Modulation::QAM16:
            return {mod, grid_points(2)};
        case Modulation::QAM64:
            return {mod, grid_points(4)};
        case Modulation::QAM256:
            return {mod, grid_points(8)};
    }
    throw std::invalid_argument("unknown modulation");
}

}  // namespace

std::string to_string(Modulation mod) {
    switch (mod) {
        case Modulation::BPSK: return "bpsk";
        case Modulation::QPSK: return "qpsk";
        case Modulation::PSK8: return "psk8";
        case Modulation::PSK16: return "psk16";
        case Modulation::QAM4: return "qam4";
        case Modulation::QAM16: return "qam16";
        case Modulation::QAM64: return "qam64";
        case Modulation::QAM256: return "qam256";
    }
    return "?";
}

Modulation modulation_from_string(const std::string& name) {
    for (Modulation mod : kAllModulations)
        if (to_string(mod) == name) return mod;
    throw std::invalid_argument("unknown modulation: " + name);
}

std::complex<double> CanonicalPoint::value() const {
    if (kind == Kind::Circle) {
        const double angle = static_cast<double>(a) * kPi / 8.0;
        return {std::cos(angle), std::sin(angle)};
    }
    return {static_cast<double>(a), static_cast<double>(b)};
}

const ModulationScheme& scheme(Modulation mod) {
    static const std::array<ModulationScheme, kNumModulations> schemes = [] {
        std::array<ModulationScheme, kNumModulations> s{};
        for (Modulation m : kAllModulations) s[static_cast<int>(m)] = make_scheme(m);
        return s;
    }();
    return schemes[static_cast<int>(mod)];
}

std::uint16_t Vocabulary::id_of(const CanonicalPoint& p) const {
    if (p.kind == CanonicalPoint::Kind::Circle) {
        if (p.a < 0 || p.a >= 16) throw std::out_of_range("circle angle index out of range");
        return static_cast<std::uint16_t>(p.a);
    }
    const int i = (p.a + 15) / 2;
    const int q = (p.b + 15) / 2;
    if (i < 0 || i >= 16 || q < 0 || q >= 16 || (p.a & 1) == 0 || (p.b & 1) == 0)
        throw std::out_of_range("grid point outside the canonical lattice");
    return static_cast<std::uint16_t>(16 + 16 * i + q);
}

Vocabulary build_vocabulary() {
    Vocabulary v;
    v.entries.reserve(272);
    for (int k = 0; k < 16; ++k)
        v.entries.push_back({CanonicalPoint::Kind::Circle, k, 0});
    for (int i = -15; i <= 15; i += 2)
        for (int q = -15; q <= 15; q += 2)
            v.entries.push_back({CanonicalPoint::Kind::Grid, i, q});

    for (Modulation mod : kAllModulations) {
        const ModulationScheme& s = scheme(mod);
        auto& ids = v.members[static_cast<int>(mod)];
        ids.reserve(s.points.size());
        for (const CanonicalPoint& p : s.points) ids.push_back(v.id_of(p));
    }
    v.class_freq = class_frequencies(v);
    return v;
}

SymbolSequence draw_symbols(const ModulationScheme& mod, const Vocabulary& vocab, int count,
                            RandomStream& rng) {
    if (count < 1) throw std::invalid_argument("draw_symbols: count must be >= 1");
    SymbolSequence seq;
    seq.modulation = mod.name;
    seq.ids.reserve(count);
    seq.iq.reserve(count);
    const auto& members = vocab.members[static_cast<int>(mod.name)];
    for (int i = 0; i < count; ++i) {
        const auto local = static_cast<std::size_t>(rng.uniform_int(mod.points.size()));
        seq.ids.push_back(members[local]);
        seq.iq.push_back(mod.points[local].value());
    }
    return seq;
}

std::vector<double> class_frequencies(const Vocabulary& vocab,
                                      const std::vector<Modulation>& mods) {
    if (mods.empty()) throw std::invalid_argument("class_frequencies: empty modulation set");
    std::vector<double> freq(vocab.size(), 0.0);
    const double mod_prob = 1.0 / static_cast<double>(mods.size());
    for (Modulation mod : mods) {
        const auto& ids = vocab.members[static_cast<int>(mod)];
        const double point_prob = mod_prob / static_cast<double>(ids.size());
        for (std::uint16_t id : ids) freq[id] += point_prob;
    }
    return freq;
}

std::vector<double> class_frequencies(const Vocabulary& vocab) {
    return class_frequencies(
        vocab, std::vector<Modulation>(kAllModulations.begin(), kAllModulations.end()));
}

}  // namespace msm

#include <doctest.h>

#include <cmath>
#include <set>

#include "msm/constellation.hpp"

using namespace msm;

namespace {
// Independent set-union oracle: collect every scheme's points with exact
// symbolic comparison and count the distinct ones.
std::set<std::tuple<int, int, int>> canonical_point_set() {
    std::set<std::tuple<int, int, int>> pts;
    for (Modulation mod : kAllModulations)
        for (const CanonicalPoint& p : scheme(mod).points)
            pts.insert({static_cast<int>(p.kind), p.a, p.b});
    return pts;
}
}  // namespace

TEST_CASE("vocabulary: V = 272 via the set-union oracle") {
    const Vocabulary vocab = build_vocabulary();
    CHECK(vocab.size() == 272);
    CHECK(canonical_point_set().size() == 272);
}

TEST_CASE("vocabulary: total membership is 370 mappings onto 272 ids") {
    const Vocabulary vocab = build_vocabulary();
    std::size_t members = 0;
    for (const auto& m : vocab.members) members += m.size();
    CHECK(members == 370);
    for (Modulation mod : kAllModulations) {
        const auto& ids = vocab.members[static_cast<int>(mod)];
        CHECK(ids.size() == scheme(mod).points.size());
        for (std::uint16_t id : ids) CHECK(id < 272);
    }
}

TEST_CASE("vocabulary: shared points share one id") {
    const Vocabulary vocab = build_vocabulary();
    // BPSK's +1 and PSK16's 0-degree point
    const auto bpsk_pos = vocab.members[static_cast<int>(Modulation::BPSK)][0];
    const auto psk16_zero = vocab.members[static_cast<int>(Modulation::PSK16)][0];
    CHECK(bpsk_pos == psk16_zero);
    // QAM4's (1,1) and QAM256's (1,1)
    const CanonicalPoint p{CanonicalPoint::Kind::Grid, 1, 1};
    const auto id = vocab.id_of(p);
    bool in_qam4 = false, in_qam256 = false;
    for (auto m : vocab.members[static_cast<int>(Modulation::QAM4)]) in_qam4 |= (m == id);
    for (auto m : vocab.members[static_cast<int>(Modulation::QAM256)]) in_qam256 |= (m == id);
    CHECK(in_qam4);
    CHECK(in_qam256);
}

TEST_CASE("vocabulary: id round-trip") {
    const Vocabulary vocab = build_vocabulary();
    for (int id = 0; id < vocab.size(); ++id)
        CHECK(vocab.id_of(vocab.point_of(static_cast<std::uint16_t>(id))) == id);
}

TEST_CASE("constellation geometry: psk on the unit circle, qam on the odd grid") {
    for (Modulation mod : {Modulation::BPSK, Modulation::QPSK, Modulation::PSK8,
                           Modulation::PSK16}) {
        for (const CanonicalPoint& p : scheme(mod).points)
            CHECK(std::abs(std::abs(p.value()) - 1.0) < 1e-15);
    }
    for (Modulation mod : {Modulation::QAM4, Modulation::QAM16, Modulation::QAM64,
                           Modulation::QAM256}) {
        for (const CanonicalPoint& p : scheme(mod).points) {
            CHECK(p.kind == CanonicalPoint::Kind::Grid);
            CHECK(p.a % 2 != 0);
            CHECK(p.b % 2 != 0);
            CHECK(std::abs(p.a) <= 15);
            CHECK(std::abs(p.b) <= 15);
        }
    }
    CHECK(scheme(Modulation::BPSK).order() == 2);
    CHECK(scheme(Modulation::QPSK).order() == 4);
    CHECK(scheme(Modulation::PSK8).order() == 8);
    CHECK(scheme(Modulation::PSK16).order() == 16);
    CHECK(scheme(Modulation::QAM4).order() == 4);
    CHECK(scheme(Modulation::QAM16).order() == 16);
    CHECK(scheme(Modulation::QAM64).order() == 64);
    CHECK(scheme(Modulation::QAM256).order() == 256);
}

TEST_CASE("class frequencies: closed-form spot values and normalization") {
    const Vocabulary vocab = build_vocabulary();
    // 0-degree circle point: BPSK + PSK8 + PSK16 membership
    const auto zero_deg = vocab.id_of({CanonicalPoint::Kind::Circle, 0, 0});
    CHECK(vocab.class_freq[zero_deg] == doctest::Approx(0.0859375).epsilon(1e-12));
    // A QAM256-only corner
    const auto corner = vocab.id_of({CanonicalPoint::Kind::Grid, 15, 15});
    CHECK(vocab.class_freq[corner] == doctest::Approx(4.8828125e-4).epsilon(1e-12));

    double sum = 0.0;
    for (double f : vocab.class_freq) {
        CHECK(f > 0.0);
        sum += f;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("class frequencies: restricted modulation sets") {
    const Vocabulary vocab = build_vocabulary();
    const auto freq = class_frequencies(vocab, {Modulation::BPSK, Modulation::QPSK});
    const auto bpsk0 = vocab.members[static_cast<int>(Modulation::BPSK)][0];
    CHECK(freq[bpsk0] == doctest::Approx(0.25).epsilon(1e-12));
    double sum = 0.0;
    for (double f : freq) sum += f;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("draw_symbols: bpsk support and determinism") {
    const Vocabulary vocab = build_vocabulary();
    RandomStream rng(3);
    const auto seq = draw_symbols(scheme(Modulation::BPSK), vocab, 4, rng);
    for (const auto& x : seq.iq) {
        CHECK(std::abs(x.imag()) < 1e-15);
        CHECK(std::abs(std::abs(x.real()) - 1.0) < 1e-15);
    }
    RandomStream r1(99), r2(99);
    const auto a = draw_symbols(scheme(Modulation::QPSK), vocab, 64, r1);
    const auto b = draw_symbols(scheme(Modulation::QPSK), vocab, 64, r2);
    CHECK(a.ids == b.ids);
}

TEST_CASE("draw_symbols: qam256 is uniform (Monte Carlo)") {
    const Vocabulary vocab = build_vocabulary();
    RandomStream rng(5);
    const int n = 100000;
    const auto seq = draw_symbols(scheme(Modulation::QAM256), vocab, n, rng);
    std::vector<int> hist(272, 0);
    for (auto id : seq.ids) ++hist[id];
    const double expect = n / 256.0;
    const double sigma = std::sqrt(n * (1.0 / 256) * (255.0 / 256));
    for (auto id : vocab.members[static_cast<int>(Modulation::QAM256)])
        CHECK(std::abs(hist[id] - expect) < 5 * sigma);
}

TEST_CASE("draw_symbols: ids match the vocabulary") {
    const Vocabulary vocab = build_vocabulary();
    RandomStream rng(17);
    for (Modulation mod : kAllModulations) {
        const auto seq = draw_symbols(scheme(mod), vocab, 50, rng);
        for (int i = 0; i < seq.length(); ++i) {
            const auto v = vocab.value_of(seq.ids[i]);
            CHECK(std::abs(v - seq.iq[i]) < 1e-15);
        }
    }
}

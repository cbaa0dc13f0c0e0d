#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "msm/pulse.hpp"

using namespace msm;

TEST_CASE("rc filter: beta 0.25, span 10, sps 8") {
    const PulseShape p = design_rc_filter(0.25, 10, 8);
    REQUIRE(p.taps.size() == 81);
    CHECK(p.center() == 40);
    CHECK(p.taps[40] == doctest::Approx(1.0).epsilon(1e-15));
    // Nyquist zeros at every symbol-spaced offset; k = 2 sits exactly on the
    // removable singularity (L / (2 beta) = 16 samples).
    for (int k = 1; k <= 5; ++k) {
        CHECK(std::abs(p.taps[40 + 8 * k]) < 1e-12);
        CHECK(std::abs(p.taps[40 - 8 * k]) < 1e-12);
    }
}

TEST_CASE("rc filter: beta 0.5 singularity falls on a Nyquist zero") {
    // t = T = 1/(2*0.5); the limit (beta/2) sin(pi/(2 beta)) = 0.25 sin(pi) = 0
    CHECK(std::abs(raised_cosine(1.0, 0.5)) < 1e-12);
    const PulseShape p = design_rc_filter(0.5, 10, 8);
    CHECK(std::abs(p.taps[p.center() + 8]) < 1e-12);
}

TEST_CASE("rc filter: even symmetry and center maximum across the whole grid") {
    for (double beta : kRollOffGrid) {
        for (int span : kSpanGrid) {
            const PulseShape p = design_rc_filter(beta, span, 8);
            const int c = p.center();
            REQUIRE(static_cast<int>(p.taps.size()) == span * 8 + 1);
            for (int j = 1; j <= c; ++j)
                CHECK(p.taps[c + j] == doctest::Approx(p.taps[c - j]).epsilon(1e-15));
            for (double t : p.taps) CHECK(t <= p.taps[c]);
        }
    }
}

TEST_CASE("rc filter: Nyquist zeros for all 24 table configurations") {
    for (double beta : kRollOffGrid) {
        for (int span : kSpanGrid) {
            const PulseShape p = design_rc_filter(beta, span, 8);
            const int c = p.center();
            for (int k = 1; k <= span / 2; ++k) {
                CHECK(std::abs(p.taps[c + 8 * k]) < 1e-12);
                CHECK(std::abs(p.taps[c - 8 * k]) < 1e-12);
            }
        }
    }
}

TEST_CASE("rc filter: rejects degenerate parameters") {
    CHECK_THROWS_AS(design_rc_filter(0.0, 10, 8), std::invalid_argument);
    CHECK_THROWS_AS(design_rc_filter(-0.1, 10, 8), std::invalid_argument);
    CHECK_THROWS_AS(design_rc_filter(1.5, 10, 8), std::invalid_argument);
    CHECK_THROWS_AS(design_rc_filter(0.25, 9, 8), std::invalid_argument);
    CHECK_THROWS_AS(design_rc_filter(0.25, 0, 8), std::invalid_argument);
    CHECK_THROWS_AS(design_rc_filter(0.25, 10, 0), std::invalid_argument);
}

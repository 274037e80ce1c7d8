#include <doctest.h>

#include <cmath>
#include <random>

#include "mflab/generators.hpp"
#include "mflab/leaders.hpp"

using namespace mflab;

namespace {

// Exhaustive reference: for every cell, scan all deeper cells inside the
// widened window intersected with [0,1], in pure integer arithmetic.
LeaderField brute_force_leaders(const CoefficientField& f) {
    LeaderField lf;
    lf.jmax = f.jmax;
    lf.code.resize(f.jmax + 1);
    for (int j = 0; j <= f.jmax; ++j) {
        lf.code[j].assign(std::size_t(1) << j, kZeroCode);
        for (std::int64_t k = 0; k < (1 << j); ++k) {
            ExpCode best = kZeroCode;
            for (int jp = j; jp <= f.jmax; ++jp) {
                std::int64_t scale = std::int64_t(1) << (jp - j);
                for (std::int64_t kp = 0; kp < (1 << jp); ++kp) {
                    if (kp < (k - 1) * scale) continue;
                    if (kp + 1 > (k + 2) * scale) continue;
                    best = std::min(best, f.code[jp][kp]);
                }
            }
            lf.code[j][k] = best;
        }
    }
    return lf;
}

}  // namespace

TEST_CASE("constant field: leaders equal the coefficients") {
    CoefficientField f = CoefficientField::zeros(8);
    for (int j = 0; j <= 8; ++j)
        std::fill(f.code[j].begin(), f.code[j].end(), exp_to_code(0.7 * j));
    auto lf = compute_leaders(f);
    for (int j = 0; j <= 8; ++j)
        for (ExpCode c : lf.code[j]) CHECK(c == exp_to_code(0.7 * j));
}

TEST_CASE("slow oscillation leaders at j = m^n + 1 equal 2^{-beta (j-1)}") {
    auto f = gen_slow_oscillation(0.5, 1.0, 16);
    auto lf = compute_leaders(f);
    for (int j : {2, 3, 5, 9}) {
        for (ExpCode c : lf.code[j]) CHECK(c == exp_to_code(1.0 * (j - 1)));
    }
    // spec example: at j = 5 every leader is 2^{-4}
    for (std::int64_t k = 0; k < 32; ++k)
        CHECK(lf.value(5, k) == doctest::Approx(std::exp2(-4.0)));
}

TEST_CASE("random sparse fields match the exhaustive sup") {
    std::mt19937_64 rng(321);
    for (int trial = 0; trial < 100; ++trial) {
        int jmax = 4 + int(rng() % 5);  // up to 8
        CoefficientField f = CoefficientField::zeros(jmax);
        for (int placed = 0; placed < 10; ++placed) {
            int j = int(rng() % (jmax + 1));
            std::int64_t k = std::int64_t(rng() % (std::uint64_t(1) << j));
            f.code[j][k] = ExpCode(rng() % 200000);
        }
        auto fast = compute_leaders(f);
        auto slow = brute_force_leaders(f);
        for (int j = 0; j <= jmax; ++j) CHECK(fast.code[j] == slow.code[j]);
    }
}

TEST_CASE("leaders dominate the subtree and decrease along branches") {
    auto f = gen_two_exponent(0.5, 1.0, 0.5, 10);
    auto lf = compute_leaders(f);
    auto sup = subtree_sups(f);
    for (int j = 0; j <= 10; ++j) {
        for (std::int64_t k = 0; k < (1 << j); ++k) {
            CHECK(lf.code[j][k] <= sup[j][k]);
            if (j < 10) {
                CHECK(lf.code[j][k] <= lf.code[j + 1][2 * k]);
                CHECK(lf.code[j][k] <= lf.code[j + 1][2 * k + 1]);
            }
        }
    }
    // hierarchical build: the leader equals a same-scale coefficient at the
    // cell or one of its two neighbors
    for (int j = 1; j <= 10; ++j)
        for (std::int64_t k = 0; k < (1 << j); ++k) {
            bool own = lf.code[j][k] == f.code[j][k];
            bool left = k > 0 && lf.code[j][k] == f.code[j][k - 1];
            bool right = k + 1 < (1 << j) && lf.code[j][k] == f.code[j][k + 1];
            CHECK((own || left || right));
        }
}

TEST_CASE("truncation bias flags the top tenth of the scales") {
    auto lf = compute_leaders(gen_two_exponent(0.5, 1.0, 0.5, 10));
    CHECK(lf.truncation_bias[10]);
    CHECK(!lf.truncation_bias[8]);
}

TEST_CASE("leader sequences along a point") {
    auto f = gen_two_exponent(0.5, 1.0, 0.5, 12);
    auto lf = compute_leaders(f);
    auto at0 = leader_sequence_at(0.0, lf);
    for (int j = 0; j <= 12; ++j) CHECK(at0[j] == lf.value(j, 0));
    // x = 0.9 sits far right of the alpha block at deep scales
    auto at9 = leader_sequence_at(0.9, lf);
    CHECK(at9[12] == doctest::Approx(std::exp2(-12.0)));
    // dyadic points use the right-open cell convention
    auto athalf = leader_sequence_at(0.5, lf);
    CHECK(athalf[1] == lf.value(1, 1));
    CHECK_THROWS(leader_sequence_at(1.0, lf));
}

TEST_CASE("pointwise exponent estimates") {
    CoefficientField c = CoefficientField::zeros(10);
    for (int j = 0; j <= 10; ++j)
        std::fill(c.code[j].begin(), c.code[j].end(), exp_to_code(0.6 * j));
    auto lfc = compute_leaders(c);
    auto est = holder_estimate(0.3, lfc, 2, 10);
    CHECK(est.hhat == doctest::Approx(0.6));
    CHECK(est.slope == doctest::Approx(0.6));

    // slow oscillation: the windowed min lands on alpha at the power scales
    auto f = gen_slow_oscillation(0.5, 1.0, 16);
    auto lf = compute_leaders(f);
    for (double x : {0.0, 0.123, 0.5, 0.97}) {
        auto e = holder_estimate(x, lf, 8, 16);
        CHECK(e.hhat == doctest::Approx(0.5).epsilon(0.05));
    }

    // a point off the Cantor support has zero leaders past the gap scale
    auto lws = gen_lws_cantor(1, 3, 0.5, 0.4, 11, 12);
    auto lwslf = compute_leaders(lws);
    auto far = holder_estimate(0.5, lwslf, 6, 12);
    CHECK(far.all_zero);
    CHECK(std::isinf(far.hhat));
    CHECK_THROWS(holder_estimate(0.5, lwslf, 0, 12));
}

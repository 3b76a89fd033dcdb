#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "synthetic_scene.hpp"
#include "transmask/morphology.hpp"

using namespace transmask;

TEST(Erode, SevenBySevenKeepsCentralThreeByThree) {
    const BinaryMask ones(7, 7, 1);
    const BinaryMask got = erode(ones, {5, 5}, 1);
    // Frozen from the brute-force window check.
    const BinaryMask expected = oracle::erode(ones, 5, 5, 1);
    EXPECT_EQ(got, expected);
    for (std::size_t y = 0; y < 7; ++y) {
        for (std::size_t x = 0; x < 7; ++x) {
            const bool center = x >= 2 && x <= 4 && y >= 2 && y <= 4;
            EXPECT_EQ(got(x, y), center ? 1 : 0) << x << "," << y;
        }
    }
}

TEST(Erode, ZeroIterationsIsIdentity) {
    std::mt19937_64 rng(3);
    const BinaryMask m = fixture::random_mask(17, 11, rng);
    EXPECT_EQ(erode(m, {5, 5}, 0), m);
    EXPECT_EQ(erode(m, {3, 7}, 0), m);
}

TEST(Erode, NoWindowFitsInFourByFour) {
    const BinaryMask got = erode(BinaryMask(4, 4, 1), {5, 5}, 1);
    EXPECT_EQ(got, oracle::erode(BinaryMask(4, 4, 1), 5, 5, 1));
    EXPECT_EQ(count_set(got), 0u);
}

TEST(Erode, RejectsEvenElements) {
    const BinaryMask m(5, 5, 1);
    EXPECT_THROW(erode(m, {4, 5}, 1), ConfigError);
    EXPECT_THROW(erode(m, {5, 2}, 1), ConfigError);
    EXPECT_THROW(erode(m, {0, 3}, 1), ConfigError);
}

TEST(Erode, NonSquareElementMatchesOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask m = fixture::random_mask(23, 19, rng);
        EXPECT_EQ(erode(m, {7, 3}, 2), oracle::erode(m, 7, 3, 2));
        EXPECT_EQ(erode(m, {1, 5}, 1), oracle::erode(m, 1, 5, 1));
    }
}

TEST(Erode, OneByOneIsIdentity) {
    std::mt19937_64 rng(5);
    const BinaryMask m = fixture::random_mask(9, 9, rng);
    EXPECT_EQ(erode(m, {1, 1}, 4), m);
}

TEST(Erode, Monotone) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const BinaryMask a = fixture::random_mask(32, 32, rng);
        const BinaryMask b = mask_union({a, fixture::random_mask(32, 32, rng)});  // a subset of b
        const BinaryMask ea = erode(a, {5, 5}, 2), eb = erode(b, {5, 5}, 2);
        for (std::size_t i = 0; i < ea.size(); ++i) {
            ASSERT_LE(ea[i], eb[i]);
        }
    }
}

TEST(Union, Basics) {
    const BinaryMask z(4, 3, 0);
    EXPECT_EQ(mask_union({z, z}), z);
    std::mt19937_64 rng(8);
    const BinaryMask m = fixture::random_mask(4, 3, rng);
    EXPECT_EQ(mask_union({m, complement(m)}), BinaryMask(4, 3, 1));
    EXPECT_EQ(mask_union({m}), m);
}

TEST(Union, Errors) {
    EXPECT_THROW(mask_union(std::span<const BinaryMask>{}), DimensionError);
    EXPECT_THROW(mask_union({BinaryMask(2, 2, 0), BinaryMask(3, 2, 0)}), DimensionError);
}

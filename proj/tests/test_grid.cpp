#include <gtest/gtest.h>

#include <fringelab/grid.hpp>

#include <random>

#include "support.hpp"

using namespace fringelab;

TEST(Grid, FivePointsOverFiveHundredNanometres) {
	const Grid g = make_grid(0.0, 500e-9, 5);
	const std::vector<double> expected{-250e-9, -125e-9, 0.0, 125e-9, 250e-9};
	ASSERT_EQ(g.size(), 5u);
	for (std::size_t i = 0; i < 5; ++i)
		EXPECT_DOUBLE_EQ(g.point(i), expected[i]);
	EXPECT_DOUBLE_EQ(g.step(), 125e-9);
}

TEST(Grid, TwoPointsAreTheEndpoints) {
	const Grid g = make_grid(0.0, 500e-9, 2);
	EXPECT_DOUBLE_EQ(g.point(0), -250e-9);
	EXPECT_DOUBLE_EQ(g.point(1), 250e-9);
}

TEST(Grid, RejectsBadArguments) {
	EXPECT_THROW(make_grid(0.0, -1e-9, 10), ConfigError);
	EXPECT_THROW(make_grid(0.0, 0.0, 10), ConfigError);
	EXPECT_THROW(make_grid(0.0, 1.0, 1), ConfigError);
}

TEST(Grid, SymmetricGridHoldsExactMirrorPairs) {
	const Grid g = make_grid(0.0, 1.2e-3, 2049);
	ASSERT_TRUE(g.symmetric());
	EXPECT_EQ(g.point(1024), 0.0);
	for (std::size_t i = 0; i < g.size(); ++i)
		EXPECT_EQ(g.point(g.mirror(i)), -g.point(i)) << i;
}

TEST(Grid, PointsAreBitStableAcrossInstances) {
	const Grid a = make_grid(3e-7, 1.7e-6, 999);
	const Grid b = make_grid(3e-7, 1.7e-6, 999);
	EXPECT_EQ(a.points(), b.points());
	EXPECT_EQ(a.points(), a.points());
}

TEST(WaveField, NormalizeConstantField) {
	const Grid g = make_grid(0.0, 500e-9, 101);
	WaveField f(g, std::vector<complex>(g.size(), 1.0));
	const auto n = normalize(f);
	for (auto a : n.amplitudes)
		EXPECT_NEAR(std::abs(a), std::sqrt(1.0 / 500e-9), 1e-12 * std::sqrt(1.0 / 500e-9));
}

TEST(WaveField, NormalizeZeroFieldIsDegenerate) {
	const Grid g = make_grid(0.0, 1.0, 11);
	EXPECT_THROW(normalize(WaveField(g)), DegenerateInputError);
}

TEST(WaveField, IntensityOfImaginaryUnitIsOne) {
	const Grid g = make_grid(0.0, 1.0, 7);
	const auto p = intensity(WaveField(g, std::vector<complex>(g.size(), complex(0.0, 1.0))));
	for (double v : p.values)
		EXPECT_EQ(v, 1.0);
	for (double v : intensity(WaveField(g)).values)
		EXPECT_EQ(v, 0.0);
}

// Property: normalize is idempotent and its intensity integrates to one.
TEST(WaveField, NormalizeProperties) {
	std::mt19937_64 rng(7);
	std::uniform_int_distribution<std::size_t> size(2, 400);
	std::uniform_real_distribution<double> span(1e-9, 1e-3);
	for (int trial = 0; trial < 200; ++trial) {
		const Grid g = make_grid(0.0, span(rng), size(rng));
		const auto f = normalize(oracle::random_field(g, rng));
		const auto twice = normalize(f);
		for (std::size_t i = 0; i < f.size(); ++i)
			EXPECT_NEAR(std::abs(twice.amplitudes[i] - f.amplitudes[i]), 0.0, 1e-12 * std::abs(f.amplitudes[i]) + 1e-300);
		EXPECT_NEAR(intensity(f).integral(), 1.0, 1e-12);
		for (double v : intensity(f).values)
			EXPECT_GE(v, 0.0);
	}
}

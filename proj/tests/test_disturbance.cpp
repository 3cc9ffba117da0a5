#include <gtest/gtest.h>

#include <fringelab/disturbance.hpp>
#include <fringelab/optics.hpp>

#include <numeric>

#include "support.hpp"

using namespace fringelab;

namespace {

const Grid slit_grid = make_grid(0.0, 500e-9, 2001);

WaveField uniform_slits() {
	return apply_mask(WaveField(slit_grid, std::vector<complex>(slit_grid.size(), 1.0)),
	                  double_slit_mask(slit_grid, 150e-9, 50e-9));
}

} // namespace

TEST(DephaserTerms, RangesAndCount) {
	DephaserSpec spec;
	Rng rng(7);
	const auto terms = sample_dephaser_terms(spec, rng);
	ASSERT_EQ(terms.size(), 500u);
	for (const auto &b : terms) {
		EXPECT_GE(b.amplitude, 0.0);
		EXPECT_LT(b.amplitude, 2 * std::numbers::pi);
		EXPECT_GE(b.center, -250e-9);
		EXPECT_LE(b.center, 250e-9);
		EXPECT_GE(b.sigma, spec.sigma_floor);
	}
}

TEST(DephaserTerms, SampleStatistics) {
	DephaserSpec spec;
	Rng rng(99);
	std::vector<double> amp, pos, sig;
	for (int r = 0; r < 40; ++r)
		for (const auto &b : sample_dephaser_terms(spec, rng)) {
			amp.push_back(b.amplitude);
			pos.push_back(b.center);
			sig.push_back(b.sigma);
		}
	auto mean = [](const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
	const double n = static_cast<double>(amp.size());
	// Five standard errors of each mean.
	EXPECT_NEAR(mean(amp), std::numbers::pi, 5 * (2 * std::numbers::pi / std::sqrt(12.0)) / std::sqrt(n));
	EXPECT_NEAR(mean(pos), 0.0, 5 * (500e-9 / std::sqrt(12.0)) / std::sqrt(n));
	EXPECT_NEAR(mean(sig), 4e-9, 5 * 1e-9 / std::sqrt(n));
}

TEST(DephaserTerms, RedrawsNarrowWidths) {
	DephaserSpec spec;
	spec.sigma_mean = 1e-9;
	spec.sigma_std = 1e-9;
	Rng rng(1);
	for (const auto &b : sample_dephaser_terms(spec, rng))
		EXPECT_GE(b.sigma, 0.5e-9);
}

TEST(DephaserTerms, DeterministicPerSeed) {
	DephaserSpec spec;
	Rng a(1234), b(1234), c(1235);
	const auto ta = sample_dephaser_terms(spec, a);
	const auto tb = sample_dephaser_terms(spec, b);
	const auto tc = sample_dephaser_terms(spec, c);
	for (std::size_t i = 0; i < ta.size(); ++i) {
		EXPECT_EQ(ta[i].amplitude, tb[i].amplitude);
		EXPECT_EQ(ta[i].center, tb[i].center);
		EXPECT_EQ(ta[i].sigma, tb[i].sigma);
	}
	EXPECT_NE(ta[0].amplitude, tc[0].amplitude);
}

TEST(DephaserTerms, InvalidSpec) {
	Rng rng(1);
	DephaserSpec spec;
	spec.n_gaussians = 0;
	EXPECT_THROW(sample_dephaser_terms(spec, rng), ConfigError);
	spec = DephaserSpec{};
	spec.sigma_mean = -1.0;
	EXPECT_THROW(sample_dephaser_terms(spec, rng), ConfigError);
}

TEST(RenderPhase, MatchesUntruncatedSum) {
	DephaserSpec spec;
	Rng rng(21);
	const auto terms = sample_dephaser_terms(spec, rng);
	const auto field = render_phase(terms, slit_grid, spec.window);
	double worst = 0.0;
	for (std::size_t i = 0; i < slit_grid.size(); ++i) {
		const double x = slit_grid.point(i);
		double expect = 0.0;
		for (const auto &b : terms)
			expect += b.amplitude * std::exp(-(x - b.center) * (x - b.center) / (2 * b.sigma * b.sigma));
		worst = std::max(worst, std::abs(field.theta[i] - expect));
	}
	EXPECT_LT(worst, 1e-12);
}

TEST(RenderPhase, ZeroOutsideWindow) {
	const Grid wide = make_grid(0.0, 800e-9, 801);
	const std::vector<GaussianBump> terms{{1.0, 249e-9, 5e-9}, {2.0, -250e-9, 10e-9}};
	const auto field = render_phase(terms, wide, {-250e-9, 250e-9});
	for (std::size_t i = 0; i < wide.size(); ++i)
		if (std::abs(wide.point(i)) > 250e-9) {
			EXPECT_EQ(field.theta[i], 0.0);
		}
	EXPECT_GT(field.theta[400 + 249], 0.9);
}

TEST(SampleDephaser, GridMustCoverWindow) {
	DephaserSpec spec;
	Rng rng(1);
	EXPECT_THROW(sample_dephaser(spec, rng, make_grid(0.0, 400e-9, 101)), ConfigError);
}

TEST(ApplyPhase, PreservesModulus) {
	DephaserSpec spec;
	Rng rng(3);
	const auto theta = sample_dephaser(spec, rng, slit_grid);
	std::mt19937_64 frng(4);
	const auto f = oracle::random_field(slit_grid, frng);
	const auto g = apply_phase(f, theta);
	for (std::size_t i = 0; i < f.size(); ++i) {
		EXPECT_NEAR(std::abs(g.amplitudes[i]), std::abs(f.amplitudes[i]), 1e-14 * std::abs(f.amplitudes[i]));
		EXPECT_NEAR(std::arg(g.amplitudes[i] / f.amplitudes[i]), std::remainder(theta.theta[i], 2 * std::numbers::pi),
		            1e-9);
	}
	EXPECT_NEAR(norm_squared(g), norm_squared(f), 1e-12 * norm_squared(f));
}

TEST(ApplyPhase, ZeroPhaseIsIdentity) {
	std::mt19937_64 frng(4);
	const auto f = oracle::random_field(slit_grid, frng);
	const PhaseField zero{slit_grid, std::vector<double>(slit_grid.size(), 0.0)};
	EXPECT_EQ(apply_phase(f, zero).amplitudes, f.amplitudes);
	EXPECT_THROW(apply_phase(f, PhaseField{make_grid(0.0, 1e-6, 11), std::vector<double>(11)}), ShapeError);
}

TEST(WithPhaseOff, ClearsOneSlitOnly) {
	PhaseField theta{slit_grid, std::vector<double>(slit_grid.size(), 1.5)};
	const auto off = with_phase_off(theta, 75e-9, 50e-9);
	for (std::size_t i = 0; i < slit_grid.size(); ++i) {
		const bool inside = std::abs(slit_grid.point(i) - 75e-9) <= 25e-9;
		EXPECT_EQ(off.theta[i], inside ? 0.0 : 1.5);
	}
}

TEST(Decoherer, CoherenceLengthRoundTrip) {
	EXPECT_NEAR(gaussian_coherence_length(100e-9), 235.48e-9, 0.01e-9);
	for (double w : {1e-9, 12.5e-9, 600e-9})
		EXPECT_NEAR(gaussian_coherence_length(gaussian_width_for_coherence_length(w)), w, 1e-15 * w);
	// Window amplitude falls to one half at +/- w/2.
	const double d0 = 37e-9, w = gaussian_coherence_length(d0);
	EXPECT_NEAR(std::exp(-(w / 2) * (w / 2) / (2 * d0 * d0)), 0.5, 1e-14);
}

TEST(Decoherer, DefaultCenters) {
	DecohererSpec spec;
	const auto centers = gaussian_centers(spec);
	ASSERT_EQ(centers.size(), 41u);
	EXPECT_DOUBLE_EQ(centers.front(), -250e-9);
	EXPECT_DOUBLE_EQ(centers.back(), 250e-9);
	EXPECT_EQ(centers[20], 0.0);
	for (std::size_t i = 1; i < centers.size(); ++i)
		EXPECT_NEAR(centers[i] - centers[i - 1], 12.5e-9, 1e-20);
}

TEST(Decoherer, TopHatCount) {
	DecohererSpec spec;
	spec.model = DecohererModel::TopHat;
	spec.w = 12.5e-9;
	EXPECT_EQ(tophat_count(spec), 40u);
	spec.w = 300e-9;
	EXPECT_EQ(tophat_count(spec), 2u);
	spec.w = 1e-6;
	EXPECT_EQ(tophat_count(spec), 1u);
}

TEST(Decompose, GaussianComponentsAreWindowedCopies) {
	const auto f = uniform_slits();
	DecohererSpec spec;
	const auto set = decompose(f, spec);
	ASSERT_EQ(set.size(), 41u);
	EXPECT_NEAR(set.trace(), 1.0, 1e-12);
	// phi_n / psi must be the same Gaussian window for every n, up to one global scale.
	const auto centers = gaussian_centers(spec);
	double scale = NAN;
	for (std::size_t n = 0; n < set.size(); ++n)
		for (std::size_t i = 0; i < f.size(); ++i) {
			if (f.amplitudes[i] == complex(0.0)) {
				EXPECT_EQ(set.components[n].amplitudes[i], complex(0.0));
				continue;
			}
			const double x = slit_grid.point(i);
			const double win = std::exp(-(x - centers[n]) * (x - centers[n]) / (2 * 100e-9 * 100e-9));
			const double s = set.components[n].amplitudes[i].real() / win;
			if (std::isnan(scale))
				scale = s;
			EXPECT_NEAR(s, scale, 1e-12 * scale);
		}
}

TEST(Decompose, TopHatPartitionsTheWindow) {
	std::mt19937_64 rng(8);
	const auto f = oracle::random_field(slit_grid, rng);
	DecohererSpec spec;
	spec.model = DecohererModel::TopHat;
	spec.w = 30e-9; // does not divide 500 nm: last cell is short
	const auto set = decompose(f, spec);
	ASSERT_EQ(set.size(), 17u);
	EXPECT_NEAR(set.trace(), 1.0, 1e-12);
	const double scale = std::sqrt(static_cast<double>(set.size()) / norm_squared(f));
	for (std::size_t i = 0; i < f.size(); ++i) {
		int owners = 0;
		complex sum = 0.0;
		for (const auto &phi : set.components) {
			owners += phi.amplitudes[i] != complex(0.0);
			sum += phi.amplitudes[i];
		}
		EXPECT_EQ(owners, 1);
		EXPECT_NEAR(std::abs(sum - scale * f.amplitudes[i]), 0.0, 1e-12 * std::abs(scale * f.amplitudes[i]));
	}
}

TEST(Decompose, UnitTraceProperty) {
	std::mt19937_64 rng(2024);
	for (int trial = 0; trial < 50; ++trial) {
		const auto set = oracle::random_components(slit_grid, rng, trial % 2 == 0);
		EXPECT_NEAR(set.trace(), 1.0, 1e-12);
	}
}

TEST(Decompose, ZeroFieldIsDegenerate) {
	EXPECT_THROW(decompose(WaveField(slit_grid), DecohererSpec{}), DegenerateInputError);
	DecohererSpec spec;
	spec.x0 = 0.0;
	EXPECT_THROW(decompose(uniform_slits(), spec), ConfigError);
}

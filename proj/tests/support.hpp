#pragma once

// Test-only helpers: independent oracles and small generators.

#include <fringelab/fringelab.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace fringelab::oracle {

/// Naive double loop over the Fresnel sum, written out separately from the library.
inline std::vector<complex> brute_force_fresnel(const WaveField &f, const Grid &dst, double z, double lambda) {
	const double k = 2.0 * std::numbers::pi / lambda;
	const double chirp = k / (2.0 * z);
	const complex pref = std::exp(complex(0.0, k * z)) / std::sqrt(complex(0.0, lambda * z));
	std::vector<complex> out(dst.size());
	for (std::size_t i = 0; i < dst.size(); ++i) {
		complex acc = 0.0;
		for (std::size_t j = 0; j < f.size(); ++j) {
			const double w = (j == 0 || j + 1 == f.size()) ? 0.5 * f.grid.step() : f.grid.step();
			const double dx = dst.point(i) - f.grid.point(j);
			acc += w * f.amplitudes[j] * std::exp(complex(0.0, chirp * dx * dx));
		}
		out[i] = pref * acc;
	}
	return out;
}

inline double max_abs(const std::vector<complex> &v) {
	double m = 0.0;
	for (auto c : v)
		m = std::max(m, std::abs(c));
	return m;
}

inline double max_abs_diff(const std::vector<complex> &a, const std::vector<complex> &b) {
	double m = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i)
		m = std::max(m, std::abs(a[i] - b[i]));
	return m;
}

inline WaveField random_field(const Grid &g, std::mt19937_64 &rng) {
	std::normal_distribution<double> n(0.0, 1.0);
	WaveField f(g);
	for (auto &a : f.amplitudes)
		a = complex(n(rng), n(rng));
	return f;
}

/// Local minima x positions of `values` inside [lo, hi], ignoring minima above `ceiling`.
inline std::vector<double> local_minima(const IntensityPattern &p, double lo, double hi, double ceiling) {
	std::vector<double> out;
	for (std::size_t i = 1; i + 1 < p.size(); ++i) {
		const double x = p.grid.point(i);
		if (x < lo || x > hi)
			continue;
		if (p.values[i] <= p.values[i - 1] && p.values[i] < p.values[i + 1] && p.values[i] <= ceiling)
			out.push_back(x);
	}
	return out;
}

/// Mean spacing of consecutive deep minima (the cos^2 nulls) on 0 < x < 0.9 lobe,
/// which keeps the envelope null at the lobe edge out.
inline double fringe_period(const IntensityPattern &p, double lobe) {
	const double peak = *std::max_element(p.values.begin(), p.values.end());
	const auto minima = local_minima(p, 0.0, 0.9 * lobe, 0.05 * peak);
	if (minima.size() < 2)
		return NAN;
	return (minima.back() - minima.front()) / static_cast<double>(minima.size() - 1);
}

/// Baseline apparatus on coarser grids, for fast unit tests.
inline ExperimentConfig small_config(Mode mode, std::size_t n_realizations = 8) {
	auto c = ExperimentConfig::baseline();
	c.mode = mode;
	c.n_realizations = n_realizations;
	c.numerics.n_source = 1024;
	c.numerics.n_src = 1024;
	c.numerics.n_det = 513;
	c.master_seed = 42;
	return c;
}

/// Random equal-weight mixture of Gaussian windows or top-hats on `g`.
inline ComponentSet random_components(const Grid &g, std::mt19937_64 &rng, bool tophat) {
	std::uniform_int_distribution<int> count(1, 12);
	std::uniform_real_distribution<double> u(0.0, 1.0);
	const WaveField base = random_field(g, rng);
	DecohererSpec spec;
	spec.window = {g.lo(), g.hi()};
	if (tophat) {
		spec.model = DecohererModel::TopHat;
		spec.w = g.span() / count(rng);
	} else {
		spec.model = DecohererModel::Gaussian;
		spec.delta0 = g.span() * (0.02 + 0.5 * u(rng));
		spec.x0 = g.span() / count(rng);
	}
	return decompose(base, spec);
}

} // namespace fringelab::oracle

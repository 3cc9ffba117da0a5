#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "optics.hpp"

namespace fringelab {

/// Detector patterns from independent realizations on one symmetric grid.
struct Ensemble {
	std::vector<IntensityPattern> patterns;
	std::vector<std::uint64_t> seeds;
	std::string config_digest;

	std::size_t size() const noexcept { return patterns.size(); }
	const Grid &grid() const { return patterns.front().grid; }

	void validate() const {
		if (patterns.empty())
			throw DegenerateInputError("ensemble has no patterns");
		const Grid &g = patterns.front().grid;
		for (const auto &p : patterns)
			if (!(p.grid == g))
				throw ShapeError("ensemble patterns live on different grids");
		if (!g.symmetric())
			throw ConfigError("ensemble grid must be symmetric about 0 with an odd point count");
		if (!seeds.empty() && seeds.size() != patterns.size())
			throw ShapeError("seed count does not match pattern count");
	}
};

enum class Verdict { Dephasing, Decoherence, Inconclusive };

inline std::string to_string(Verdict v) {
	switch (v) {
	case Verdict::Dephasing: return "Dephasing";
	case Verdict::Decoherence: return "Decoherence";
	case Verdict::Inconclusive: return "Inconclusive";
	}
	return "Inconclusive";
}

struct ClassifierThresholds {
	double r_hi = 0.8;
	double r_lo = 0.5;
	double f_hi = 0.25;
	double f_lo = 0.1;
};

/// delta g2 on the half axis x >= 0 plus its comparison against the far-field reference.
struct CorrelationResult {
	std::vector<double> x;
	std::vector<double> delta_g2;
	std::vector<char> valid; // 0 where the mean intensity product was masked out
	std::vector<double> reference;
	double pearson_r = 0.0;
	double fringe_power_ratio = 0.0;
	bool has_signal = false;
	Verdict verdict = Verdict::Inconclusive;
	std::size_t n_realizations = 0;
	std::string config_digest;
};

inline constexpr double default_mask_epsilon = 1e-6;

namespace detail {

// Realization indices sorted by pattern content. Every reduction runs in this
// order, so statistics do not depend on how the ensemble was listed.
inline std::vector<std::size_t> canonical_order(const Ensemble &e) {
	std::vector<std::size_t> order(e.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
		const auto &va = e.patterns[a].values;
		const auto &vb = e.patterns[b].values;
		return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
	});
	return order;
}

// Mean per point, clamped into the sample range so that equal samples give
// their exact common value.
inline std::vector<double> point_means(const Ensemble &e, const std::vector<std::size_t> &order) {
	const std::size_t n = e.grid().size();
	std::vector<double> sum(n, 0.0), lo(n, INFINITY), hi(n, -INFINITY);
	for (std::size_t k : order) {
		const auto &v = e.patterns[k].values;
		for (std::size_t i = 0; i < n; ++i) {
			sum[i] += v[i];
			lo[i] = std::min(lo[i], v[i]);
			hi[i] = std::max(hi[i], v[i]);
		}
	}
	const double inv = 1.0 / static_cast<double>(e.size());
	for (std::size_t i = 0; i < n; ++i)
		sum[i] = std::clamp(sum[i] * inv, lo[i], hi[i]);
	return sum;
}

inline double pearson(const std::vector<double> &a, const std::vector<double> &b) {
	const auto n = static_cast<double>(a.size());
	if (a.size() < 2)
		return 0.0;
	const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
	const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
	double sab = 0.0, saa = 0.0, sbb = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		sab += (a[i] - ma) * (b[i] - mb);
		saa += (a[i] - ma) * (a[i] - ma);
		sbb += (b[i] - mb) * (b[i] - mb);
	}
	if (saa == 0.0 || sbb == 0.0)
		return 0.0;
	return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

} // namespace detail

/// Pointwise average over realizations.
inline IntensityPattern ensemble_mean(const Ensemble &e) {
	if (e.patterns.empty())
		throw DegenerateInputError("mean of an empty ensemble");
	const Grid &g = e.grid();
	for (const auto &p : e.patterns)
		if (!(p.grid == g))
			throw ShapeError("ensemble patterns live on different grids");
	return IntensityPattern(g, detail::point_means(e, detail::canonical_order(e)));
}

/// delta g2(x) = <I(x) I(-x)> / (<I(x)> <I(-x)>) - 1 for x >= 0, evaluated in
/// covariance form. Points where <I(x)><I(-x)> < eps * max<I>^2 are masked.
inline CorrelationResult delta_g2(const Ensemble &e, double mask_epsilon = default_mask_epsilon) {
	e.validate();
	if (e.size() < 2)
		throw DegenerateInputError("delta g2 needs at least two realizations, got " + std::to_string(e.size()));

	const Grid &g = e.grid();
	const auto order = detail::canonical_order(e);
	const auto mean = detail::point_means(e, order);
	const double peak = *std::max_element(mean.begin(), mean.end());
	const double floor = mask_epsilon * peak * peak;
	const double inv = 1.0 / static_cast<double>(e.size());

	CorrelationResult r;
	r.n_realizations = e.size();
	r.config_digest = e.config_digest;
	const std::size_t mid = g.size() / 2;
	bool any = false;
	for (std::size_t i = mid; i < g.size(); ++i) {
		const std::size_t j = g.mirror(i);
		r.x.push_back(g.point(i));
		const double denom = mean[i] * mean[j];
		if (!(denom >= floor) || denom == 0.0) {
			r.delta_g2.push_back(0.0);
			r.valid.push_back(0);
			continue;
		}
		double cov = 0.0;
		for (std::size_t k : order) {
			const auto &v = e.patterns[k].values;
			cov += (v[i] - mean[i]) * (v[j] - mean[j]);
		}
		r.delta_g2.push_back(std::max(-1.0, cov * inv / denom));
		r.valid.push_back(1);
		any = true;
	}
	if (!any)
		throw NumericalError("every detector point was masked out of delta g2");
	return r;
}

/// Delta G2(x1, x2) = <I(x1) I(x2)> - <I(x1)><I(x2)> over the full grid.
/// Computed on the upper triangle and mirrored, so it is exactly symmetric.
inline Eigen::MatrixXd full_delta_G2(const Ensemble &e) {
	e.validate();
	if (e.size() < 2)
		throw DegenerateInputError("Delta G2 needs at least two realizations");
	const std::size_t n = e.grid().size();
	const auto order = detail::canonical_order(e);
	const auto mean = detail::point_means(e, order);

	std::vector<double> upper(n * n, 0.0), dev(n);
	for (std::size_t k : order) {
		const auto &v = e.patterns[k].values;
		for (std::size_t i = 0; i < n; ++i)
			dev[i] = v[i] - mean[i];
		for (std::size_t i = 0; i < n; ++i) {
			const double di = dev[i];
			double *row = upper.data() + i * n;
			for (std::size_t j = i; j < n; ++j)
				row[j] += di * dev[j];
		}
	}
	const double inv = 1.0 / static_cast<double>(e.size());
	Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = i; j < n; ++j) {
			const double v = upper[i * n + j] * inv;
			out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
			out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
		}
	return out;
}

/// Half-width of the central envelope lobe in the correlation coordinate, lambda L2 / (2d).
inline double comparison_half_width(const OpticalParams &p) { return p.wavelength() * p.L2 / (2.0 * p.slit_width); }

/// Fringe frequency of the correlation-mode reference, 2D / (lambda L2), in 1/m.
inline double correlation_fringe_frequency(const OpticalParams &p) {
	return 2.0 * p.slit_separation / (p.wavelength() * p.L2);
}

/// Fills the reference curve and the two agreement metrics over the central
/// lobe 0 <= x <= lambda L2 / (2d). Both curves are max-normalized there.
inline CorrelationResult compare_to_reference(CorrelationResult r, const OpticalParams &p) {
	const double limit = comparison_half_width(p) * (1.0 + 1e-12);
	r.reference.resize(r.x.size());
	std::vector<double> xs, measured, expected;
	for (std::size_t i = 0; i < r.x.size(); ++i) {
		r.reference[i] = farfield_reference(r.x[i], p, FarFieldMode::Correlation);
		if (r.x[i] >= 0.0 && r.x[i] <= limit && r.valid[i]) {
			xs.push_back(r.x[i]);
			measured.push_back(r.delta_g2[i]);
			expected.push_back(r.reference[i]);
		}
	}
	if (expected.size() < 2)
		throw NumericalError("fewer than two unmasked points in the comparison window");

	const auto [emin, emax] = std::minmax_element(expected.begin(), expected.end());
	if (!(*emax > *emin))
		throw NumericalError("reference curve is flat over the comparison window");
	for (auto &v : expected)
		v /= *emax;
	const double mmax = *std::max_element(measured.begin(), measured.end());
	if (mmax > 0.0)
		for (auto &v : measured)
			v /= mmax;

	const auto m = static_cast<double>(measured.size());
	const double mean = std::accumulate(measured.begin(), measured.end(), 0.0) / m;
	double total = 0.0;
	complex tone{};
	const double f0 = correlation_fringe_frequency(p);
	for (std::size_t i = 0; i < measured.size(); ++i) {
		const double y = measured[i] - mean;
		total += y * y;
		tone += y * std::polar(1.0, -2.0 * std::numbers::pi * f0 * xs[i]);
	}
	r.has_signal = total > 0.0;
	r.pearson_r = r.has_signal ? detail::pearson(measured, expected) : 0.0;
	// Both +f0 and -f0 bins count, so a pure cosine on whole periods scores 1.
	r.fringe_power_ratio = r.has_signal ? 2.0 * std::norm(tone) / (m * total) : 0.0;
	return r;
}

/// A flat delta g2 carries no information and is always Inconclusive.
inline Verdict classify(const CorrelationResult &r, const ClassifierThresholds &t = {}) {
	if (!r.has_signal)
		return Verdict::Inconclusive;
	if (r.pearson_r >= t.r_hi && r.fringe_power_ratio >= t.f_hi)
		return Verdict::Dephasing;
	if (r.pearson_r <= t.r_lo && r.fringe_power_ratio <= t.f_lo)
		return Verdict::Decoherence;
	return Verdict::Inconclusive;
}

/// delta_g2 -> compare_to_reference -> classify.
inline CorrelationResult analyze(const Ensemble &e, const OpticalParams &p, const ClassifierThresholds &t = {},
                                 double mask_epsilon = default_mask_epsilon) {
	auto r = compare_to_reference(delta_g2(e, mask_epsilon), p);
	r.verdict = classify(r, t);
	return r;
}

/// Single-shot contrast (max - min) / (max + min) of the box-smoothed pattern
/// over the central lobe |x| <= lambda L2 / d; box width is one fringe period / 8.
inline double fringe_visibility(const IntensityPattern &pattern, const OpticalParams &p) {
	const Grid &g = pattern.grid;
	const double lambda = p.wavelength();
	const double period = lambda * p.L2 / p.slit_separation;
	const double lobe = lambda * p.L2 / p.slit_width * (1.0 + 1e-12);
	const auto half = static_cast<std::size_t>(std::max(0.0, std::round(period / 8.0 / g.step()) / 2.0));

	double lo = INFINITY, hi = -INFINITY;
	for (std::size_t i = 0; i < g.size(); ++i) {
		if (std::abs(g.point(i) - g.center()) > lobe)
			continue;
		const std::size_t a = i >= half ? i - half : 0;
		const std::size_t b = std::min(g.size() - 1, i + half);
		double s = 0.0;
		for (std::size_t k = a; k <= b; ++k)
			s += pattern.values[k];
		s /= static_cast<double>(b - a + 1);
		lo = std::min(lo, s);
		hi = std::max(hi, s);
	}
	if (!(hi + lo > 0.0))
		return 0.0;
	return (hi - lo) / (hi + lo);
}

} // namespace fringelab

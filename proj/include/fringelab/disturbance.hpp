#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "grid.hpp"

namespace fringelab {

/// Per-realization random stream.
using Rng = std::mt19937_64;

struct Interval {
	double lo = 0.0;
	double hi = 0.0;
	double length() const noexcept { return hi - lo; }
	bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// Statistics of the smooth random phase: a sum of Gaussian bumps with
/// uniform amplitudes, uniform centers over `window`, and normal widths.
struct DephaserSpec {
	int n_gaussians = 500;
	double amp_low = 0.0;
	double amp_high = 2.0 * std::numbers::pi;
	double sigma_mean = 4e-9;
	double sigma_std = 1e-9;
	double sigma_floor = 0.5e-9; // widths below this are redrawn
	Interval window{-250e-9, 250e-9};

	void validate() const {
		if (n_gaussians < 1)
			throw ConfigError("dephaser needs at least one Gaussian");
		if (!(amp_low <= amp_high))
			throw ConfigError("dephaser amplitude range is inverted");
		if (!(sigma_mean > 0.0) || !(sigma_std >= 0.0) || !(sigma_floor > 0.0))
			throw ConfigError("dephaser widths must be positive");
		if (!(window.hi > window.lo))
			throw ConfigError("dephaser window is empty");
	}
};

struct GaussianBump {
	double amplitude;
	double center;
	double sigma;
};

/// Draws the bump parameters in a fixed order: amplitude, center, width.
inline std::vector<GaussianBump> sample_dephaser_terms(const DephaserSpec &spec, Rng &rng) {
	spec.validate();
	std::uniform_real_distribution<double> amp(spec.amp_low, spec.amp_high);
	std::uniform_real_distribution<double> pos(spec.window.lo, spec.window.hi);
	std::normal_distribution<double> width(spec.sigma_mean, spec.sigma_std);
	std::vector<GaussianBump> terms;
	terms.reserve(static_cast<std::size_t>(spec.n_gaussians));
	for (int i = 0; i < spec.n_gaussians; ++i) {
		GaussianBump b{};
		b.amplitude = amp(rng);
		b.center = pos(rng);
		do {
			b.sigma = width(rng);
		} while (b.sigma < spec.sigma_floor);
		terms.push_back(b);
	}
	return terms;
}

/// theta(x') in radians on the slit-plane grid; zero outside the window.
struct PhaseField {
	Grid grid;
	std::vector<double> theta;
};

/// Evaluates sum_i A_i exp(-((x - x_i) / (sqrt(2) s_i))^2). Each bump is cut
/// at 9 s_i, where it has fallen below 3e-18 of its amplitude.
inline PhaseField render_phase(std::span<const GaussianBump> terms, const Grid &grid, Interval window) {
	PhaseField field{grid, std::vector<double>(grid.size(), 0.0)};
	const double h = grid.step();
	const double x0 = grid.lo();
	const auto last = static_cast<double>(grid.size() - 1);
	for (const auto &b : terms) {
		const double reach = 9.0 * b.sigma;
		const double first = std::clamp(std::floor((b.center - reach - x0) / h), 0.0, last);
		const double stop = std::clamp(std::ceil((b.center + reach - x0) / h), 0.0, last);
		const double inv = 1.0 / (std::numbers::sqrt2 * b.sigma);
		for (auto i = static_cast<std::size_t>(first); i <= static_cast<std::size_t>(stop); ++i) {
			const double x = grid.point(i);
			if (!window.contains(x))
				continue;
			const double u = (x - b.center) * inv;
			field.theta[i] += b.amplitude * std::exp(-u * u);
		}
	}
	return field;
}

inline PhaseField sample_dephaser(const DephaserSpec &spec, Rng &rng, const Grid &grid) {
	if (!grid.contains(spec.window.lo) || !grid.contains(spec.window.hi))
		throw ConfigError("slit-plane grid does not cover the dephaser window");
	const auto terms = sample_dephaser_terms(spec, rng);
	return render_phase(terms, grid, spec.window);
}

/// Copy of `theta` with the phase switched off on [center - width/2, center + width/2].
inline PhaseField with_phase_off(PhaseField theta, double center, double width) {
	for (std::size_t i = 0; i < theta.theta.size(); ++i)
		if (std::abs(theta.grid.point(i) - center) <= 0.5 * width)
			theta.theta[i] = 0.0;
	return theta;
}

inline WaveField apply_phase(WaveField f, const PhaseField &theta) {
	if (!(f.grid == theta.grid))
		throw ShapeError("phase field and wave field live on different grids");
	for (std::size_t i = 0; i < f.size(); ++i)
		f.amplitudes[i] *= std::polar(1.0, theta.theta[i]);
	return f;
}

enum class DecohererModel { Gaussian, TopHat };

/// Splits the wavefront into incoherent windowed components.
struct DecohererSpec {
	DecohererModel model = DecohererModel::Gaussian;
	double delta0 = 100e-9; // Gaussian window width
	double x0 = 12.5e-9;    // Gaussian center spacing
	double w = 12.5e-9;     // top-hat width
	Interval window{-250e-9, 250e-9};

	void validate() const {
		if (model == DecohererModel::Gaussian && (!(delta0 > 0.0) || !(x0 > 0.0)))
			throw ConfigError("Gaussian decoherer needs positive delta0 and x0");
		if (model == DecohererModel::TopHat && !(w > 0.0))
			throw ConfigError("top-hat decoherer needs a positive width");
		if (!(window.hi > window.lo))
			throw ConfigError("decoherer window is empty");
	}
};

/// FWHM of exp(-(x/(sqrt(2) delta0))^2), i.e. 2 sqrt(2 ln 2) delta0.
inline double gaussian_coherence_length(double delta0) { return 2.0 * std::sqrt(2.0 * std::numbers::ln2) * delta0; }
inline double gaussian_width_for_coherence_length(double w) { return w / (2.0 * std::sqrt(2.0 * std::numbers::ln2)); }

/// Equal-weight mixture {phi_n, 1/N}.
struct ComponentSet {
	std::vector<WaveField> components;

	std::size_t size() const noexcept { return components.size(); }
	double weight() const noexcept { return components.empty() ? 0.0 : 1.0 / static_cast<double>(components.size()); }

	/// sum_n (1/N) int |phi_n|^2
	double trace() const {
		double t = 0.0;
		for (const auto &c : components)
			t += norm_squared(c);
		return t * weight();
	}
};

/// Component centers n * x0 for every integer n with n * x0 inside the window.
inline std::vector<double> gaussian_centers(const DecohererSpec &spec) {
	const double tol = 1e-9;
	const auto first = static_cast<long>(std::ceil(spec.window.lo / spec.x0 - tol));
	const auto last = static_cast<long>(std::floor(spec.window.hi / spec.x0 + tol));
	std::vector<double> centers;
	for (long n = first; n <= last; ++n)
		centers.push_back(static_cast<double>(n) * spec.x0);
	return centers;
}

inline std::size_t tophat_count(const DecohererSpec &spec) {
	return static_cast<std::size_t>(std::max(1.0, std::ceil(spec.window.length() / spec.w - 1e-9)));
}

inline ComponentSet decompose(const WaveField &f, const DecohererSpec &spec) {
	spec.validate();
	ComponentSet set;
	if (spec.model == DecohererModel::Gaussian) {
		const auto centers = gaussian_centers(spec);
		if (centers.empty())
			throw ConfigError("no Gaussian component center falls inside the window");
		const double inv = 1.0 / (std::numbers::sqrt2 * spec.delta0);
		for (double c : centers) {
			WaveField phi(f.grid);
			for (std::size_t i = 0; i < f.size(); ++i) {
				const double u = (f.grid.point(i) - c) * inv;
				phi.amplitudes[i] = f.amplitudes[i] * std::exp(-u * u);
			}
			set.components.push_back(std::move(phi));
		}
	} else {
		const std::size_t cells = tophat_count(spec);
		set.components.assign(cells, WaveField(f.grid));
		for (std::size_t i = 0; i < f.size(); ++i) {
			const double x = f.grid.point(i);
			if (!spec.window.contains(x))
				continue;
			const auto cell = std::min(cells - 1, static_cast<std::size_t>(std::floor((x - spec.window.lo) / spec.w)));
			set.components[cell].amplitudes[i] = f.amplitudes[i];
		}
	}

	const double total = set.trace();
	if (!(total > 0.0))
		throw DegenerateInputError("decoherer windows do not overlap the field");
	const double scale = 1.0 / std::sqrt(total);
	for (auto &c : set.components)
		for (auto &a : c.amplitudes)
			a *= scale;
	return set;
}

} // namespace fringelab

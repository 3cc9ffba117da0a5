#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fringelab {

using complex = std::complex<double>;

/// Uniform closed 1-D grid: n points from center - span/2 to center + span/2.
class Grid {
public:
	Grid() = default;

	Grid(double center, double span, std::size_t n) : center_(center), span_(span), n_(n) {
		if (n < 2)
			throw ConfigError("grid needs at least 2 points, got " + std::to_string(n));
		if (!(span > 0.0) || !std::isfinite(span))
			throw ConfigError("grid span must be positive and finite");
		if (!std::isfinite(center))
			throw ConfigError("grid center must be finite");
		step_ = span / static_cast<double>(n - 1);
	}

	double center() const noexcept { return center_; }
	double span() const noexcept { return span_; }
	std::size_t size() const noexcept { return n_; }
	double step() const noexcept { return step_; }
	double lo() const noexcept { return point(0); }
	double hi() const noexcept { return point(n_ - 1); }

	// Offsets are taken from the midpoint so that a symmetric grid holds exact +/- pairs.
	double point(std::size_t i) const noexcept {
		const double half = 0.5 * static_cast<double>(n_ - 1);
		return center_ + (static_cast<double>(i) - half) * step_;
	}

	std::vector<double> points() const {
		std::vector<double> xs(n_);
		for (std::size_t i = 0; i < n_; ++i)
			xs[i] = point(i);
		return xs;
	}

	/// Trapezoid quadrature weight of point i.
	double weight(std::size_t i) const noexcept {
		return (i == 0 || i + 1 == n_) ? 0.5 * step_ : step_;
	}

	bool symmetric() const noexcept { return center_ == 0.0 && n_ % 2 == 1; }

	/// Index of the point mirrored through the center.
	std::size_t mirror(std::size_t i) const noexcept { return n_ - 1 - i; }

	bool contains(double x) const noexcept {
		const double tol = 1e-9 * step_;
		return x >= lo() - tol && x <= hi() + tol;
	}

	friend bool operator==(const Grid &, const Grid &) = default;

private:
	double center_ = 0.0;
	double span_ = 1.0;
	std::size_t n_ = 2;
	double step_ = 1.0;
};

inline Grid make_grid(double center, double span, std::size_t n) { return Grid(center, span, n); }

/// Trapezoid integral of samples on `grid`.
inline double integrate(const Grid &grid, std::span<const double> values) {
	if (values.size() != grid.size())
		throw ShapeError("sample count does not match grid");
	double acc = 0.0;
	for (std::size_t i = 0; i < values.size(); ++i)
		acc += grid.weight(i) * values[i];
	return acc;
}

/// Complex amplitudes on a grid, in units of 1/sqrt(m).
struct WaveField {
	Grid grid;
	std::vector<complex> amplitudes;

	WaveField() = default;
	explicit WaveField(Grid g) : grid(g), amplitudes(g.size()) {}
	WaveField(Grid g, std::vector<complex> a) : grid(g), amplitudes(std::move(a)) {
		if (amplitudes.size() != grid.size())
			throw ShapeError("amplitude count does not match grid");
	}

	std::size_t size() const noexcept { return amplitudes.size(); }
};

/// Non-negative probability density on a grid.
struct IntensityPattern {
	Grid grid;
	std::vector<double> values;

	IntensityPattern() = default;
	IntensityPattern(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
		if (values.size() != grid.size())
			throw ShapeError("intensity count does not match grid");
	}

	std::size_t size() const noexcept { return values.size(); }
	double integral() const { return integrate(grid, values); }
};

inline double norm_squared(const WaveField &f) {
	double acc = 0.0;
	for (std::size_t i = 0; i < f.size(); ++i)
		acc += f.grid.weight(i) * std::norm(f.amplitudes[i]);
	return acc;
}

/// Trapezoid inner product <a|b> = sum w_i conj(a_i) b_i.
inline complex inner_product(const WaveField &a, const WaveField &b) {
	if (!(a.grid == b.grid))
		throw ShapeError("inner product of fields on different grids");
	complex acc{};
	for (std::size_t i = 0; i < a.size(); ++i)
		acc += a.grid.weight(i) * std::conj(a.amplitudes[i]) * b.amplitudes[i];
	return acc;
}

inline WaveField normalize(WaveField f) {
	const double n2 = norm_squared(f);
	if (!(n2 > 0.0) || !std::isfinite(n2))
		throw DegenerateInputError("cannot normalize a field with zero norm");
	const double scale = 1.0 / std::sqrt(n2);
	for (auto &a : f.amplitudes)
		a *= scale;
	return f;
}

inline IntensityPattern intensity(const WaveField &f) {
	std::vector<double> v(f.size());
	for (std::size_t i = 0; i < f.size(); ++i)
		v[i] = std::norm(f.amplitudes[i]);
	return IntensityPattern(f.grid, std::move(v));
}

/// Rescale to unit trapezoid integral.
inline IntensityPattern normalized(IntensityPattern p) {
	const double total = p.integral();
	if (!(total > 0.0) || !std::isfinite(total))
		throw DegenerateInputError("cannot normalize an intensity pattern with zero integral");
	for (auto &v : p.values)
		v /= total;
	return p;
}

} // namespace fringelab

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "disturbance.hpp"
#include "optics.hpp"

namespace fringelab {

/// rho(x, x') discretized as sqrt(w_i) rho(x_i, x_j) sqrt(w_j), so the matrix
/// eigenvalues are those of the integral operator and sum to one.
struct DensityMatrix {
	Grid grid;
	Eigen::MatrixXcd weighted;

	/// Un-weighted kernel value rho(x_i, x_j).
	complex value(std::size_t i, std::size_t j) const {
		return weighted(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /
		       std::sqrt(grid.weight(i) * grid.weight(j));
	}

	complex trace() const { return weighted.trace(); }
};

inline constexpr double eigenvalue_clamp = -1e-10;
inline constexpr double eigenvalue_error = -1e-6;

namespace detail {

// Columns sqrt(w_i / N) phi_n(x_i), restricted to rows where some component is nonzero.
inline Eigen::MatrixXcd weighted_columns(const ComponentSet &c, bool drop_empty_rows) {
	if (c.size() == 0)
		throw DegenerateInputError("empty component set");
	const Grid &grid = c.components.front().grid;
	for (const auto &phi : c.components)
		if (!(phi.grid == grid))
			throw ShapeError("components live on different grids");

	std::vector<std::size_t> rows;
	for (std::size_t i = 0; i < grid.size(); ++i) {
		bool any = !drop_empty_rows;
		for (std::size_t n = 0; n < c.size() && !any; ++n)
			any = c.components[n].amplitudes[i] != complex{};
		if (any)
			rows.push_back(i);
	}

	const double wn = c.weight();
	Eigen::MatrixXcd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(c.size()));
	for (std::size_t r = 0; r < rows.size(); ++r) {
		const double s = std::sqrt(grid.weight(rows[r]) * wn);
		for (std::size_t n = 0; n < c.size(); ++n)
			a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n)) = s * c.components[n].amplitudes[rows[r]];
	}
	return a;
}

} // namespace detail

inline DensityMatrix build_density(const ComponentSet &c) {
	const Eigen::MatrixXcd a = detail::weighted_columns(c, false);
	Eigen::MatrixXcd rho = a * a.adjoint();
	// Symmetrize away the rounding asymmetry of the product.
	rho = (0.5 * (rho + rho.adjoint())).eval();
	DensityMatrix out{c.components.front().grid, std::move(rho)};
	const double tr = out.trace().real();
	if (std::abs(tr - 1.0) > 1e-10)
		throw NumericalError("density matrix trace is " + std::to_string(tr) + ", expected 1");
	return out;
}

/// Throws NumericalError unless rho is Hermitian (1e-12), trace one (1e-10) and PSD (-1e-10).
inline void validate(const DensityMatrix &rho) {
	const auto &m = rho.weighted;
	if (((m - m.adjoint()).cwiseAbs().maxCoeff()) > 1e-12)
		throw NumericalError("density matrix is not Hermitian");
	if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
		throw NumericalError("density matrix trace is not one");
	Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
	if (solver.eigenvalues().minCoeff() < eigenvalue_clamp)
		throw NumericalError("density matrix is not positive semidefinite");
}

/// -sum lambda ln lambda, with lambda ln lambda := 0 for lambda <= 0.
inline double entropy_of_spectrum(std::span<const double> eigenvalues) {
	double s = 0.0;
	for (double l : eigenvalues) {
		if (l < eigenvalue_error)
			throw NumericalError("eigenvalue " + std::to_string(l) + " below " + std::to_string(eigenvalue_error) +
			                     ": matrix is not positive semidefinite");
		if (l > 0.0)
			s -= l * std::log(l);
	}
	// An eigenvalue a few ulp above one gives -1e-15; entropy is non-negative.
	return std::max(0.0, s);
}

inline double von_neumann_entropy(const DensityMatrix &rho) {
	Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.weighted, Eigen::EigenvaluesOnly);
	if (solver.info() != Eigen::Success)
		throw NumericalError("eigen-decomposition of the density matrix failed");
	const Eigen::VectorXd ev = solver.eigenvalues();
	return entropy_of_spectrum(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

/// Eigenvalues of G_mn = (1/N) <phi_m|phi_n>; same nonzero spectrum as rho.
inline Eigen::VectorXd gram_spectrum(const ComponentSet &c) {
	const Eigen::MatrixXcd a = detail::weighted_columns(c, true);
	Eigen::MatrixXcd gram = a.adjoint() * a;
	gram = (0.5 * (gram + gram.adjoint())).eval();
	Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
	if (solver.info() != Eigen::Success)
		throw NumericalError("eigen-decomposition of the Gram matrix failed");
	return solver.eigenvalues();
}

inline double gram_entropy(const ComponentSet &c) {
	const Eigen::VectorXd ev = gram_spectrum(c);
	return entropy_of_spectrum(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

/// ln(2d / w): entropy of landing in one of 2d/w equally likely top-hat cells.
inline double shannon_tophat(double slit_width, double w) {
	if (!(w > 0.0) || w > 2.0 * slit_width)
		throw ConfigError("top-hat width must satisfy 0 < w <= 2d");
	return std::log(2.0 * slit_width / w);
}

enum class EntropyModel { Gaussian, TopHat, Shannon };

inline std::string to_string(EntropyModel m) {
	switch (m) {
	case EntropyModel::Gaussian: return "gaussian";
	case EntropyModel::TopHat: return "tophat";
	case EntropyModel::Shannon: return "shannon";
	}
	return "unknown";
}

struct EntropyPoint {
	double w;
	double entropy;
	EntropyModel model;
};

struct EntropyCurve {
	std::vector<EntropyPoint> points;

	std::vector<EntropyPoint> of(EntropyModel m) const {
		std::vector<EntropyPoint> out;
		std::copy_if(points.begin(), points.end(), std::back_inserter(out), [m](const auto &p) { return p.model == m; });
		return out;
	}
};

/// Decoherer spec at transverse coherence length w. The Gaussian model keeps
/// delta0 / x0 = `center_ratio`.
inline DecohererSpec decoherer_at(DecohererModel model, double w, Interval window, double center_ratio = 8.0) {
	DecohererSpec spec;
	spec.model = model;
	spec.window = window;
	spec.w = w;
	spec.delta0 = gaussian_width_for_coherence_length(w);
	spec.x0 = spec.delta0 / center_ratio;
	return spec;
}

/// Entropy versus coherence length for one decoherer model applied to the
/// post-slit field, plus the analytic top-hat Shannon curve where w <= 2d.
inline EntropyCurve entropy_sweep(const WaveField &post_slit, const OpticalParams &p, DecohererModel model,
                                  std::span<const double> w_values, Interval window, double center_ratio = 8.0) {
	if (w_values.empty())
		throw ConfigError("entropy sweep needs at least one w value");
	for (double w : w_values)
		if (!(w > 0.0))
			throw ConfigError("entropy sweep w values must be positive");
	if (!std::is_sorted(w_values.begin(), w_values.end()))
		throw ConfigError("entropy sweep w values must be sorted ascending");

	EntropyCurve curve;
	const auto tag = model == DecohererModel::Gaussian ? EntropyModel::Gaussian : EntropyModel::TopHat;
	for (double w : w_values) {
		const auto set = decompose(post_slit, decoherer_at(model, w, window, center_ratio));
		curve.points.push_back({w, gram_entropy(set), tag});
	}
	for (double w : w_values)
		if (w <= 2.0 * p.slit_width)
			curve.points.push_back({w, shannon_tophat(p.slit_width, w), EntropyModel::Shannon});
	return curve;
}

} // namespace fringelab

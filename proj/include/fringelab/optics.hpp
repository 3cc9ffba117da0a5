#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "grid.hpp"

namespace fringelab {

namespace constants {
inline constexpr double planck = 6.62607015e-34;         // J s
inline constexpr double electron_mass = 9.1093837015e-31; // kg
inline constexpr double electron_volt = 1.602176634e-19;  // J
} // namespace constants

/// Receives non-fatal diagnostics (Fresnel validity). Defaults to stderr.
inline std::function<void(const std::string &)> &warning_handler() {
	static std::function<void(const std::string &)> handler = [](const std::string &msg) {
		std::cerr << "fringelab: warning: " << msg << '\n';
	};
	return handler;
}

inline void warn(const std::string &msg) {
	if (auto &h = warning_handler())
		h(msg);
}

/// Non-relativistic electron wavelength h / sqrt(2 m E).
inline double de_broglie_wavelength(double energy_ev) {
	if (!(energy_ev > 0.0) || !std::isfinite(energy_ev))
		throw ConfigError("electron energy must be positive");
	const double joules = energy_ev * constants::electron_volt;
	return constants::planck / std::sqrt(2.0 * constants::electron_mass * joules);
}

struct OpticalParams {
	double energy_ev = 1670.0;
	double L1 = 0.24;
	double L2 = 0.25;
	double slit_separation = 150e-9; // D, center to center
	double slit_width = 50e-9;       // d
	double surface_window = 500e-9;
	double source_width = 15e-6; // intensity FWHM

	double wavelength() const { return de_broglie_wavelength(energy_ev); }
	double wavenumber() const { return 2.0 * std::numbers::pi / wavelength(); }

	void validate() const {
		(void)wavelength();
		if (!(L1 > 0.0) || !(L2 > 0.0))
			throw ConfigError("propagation distances must be positive");
		if (!(slit_width > 0.0) || !(slit_separation > 0.0))
			throw ConfigError("slit width and separation must be positive");
		if (!(slit_width < slit_separation))
			throw ConfigError("slit width must be smaller than the slit separation");
		if (surface_window < slit_separation + slit_width)
			throw ConfigError("surface window must cover both slits");
		if (!(source_width > 0.0))
			throw ConfigError("source width must be positive");
	}
};

/// Complex transmission, |T| <= 1 everywhere.
struct TransmissionMask {
	Grid grid;
	std::vector<complex> values;
};

/// Indicator of the closed interval [center - width/2, center + width/2].
inline TransmissionMask slit_mask(const Grid &grid, double center, double width) {
	if (!(width > 0.0))
		throw ConfigError("slit width must be positive");
	if (!grid.contains(center - 0.5 * width) || !grid.contains(center + 0.5 * width))
		throw ConfigError("slit is not contained in the grid");
	TransmissionMask mask{grid, std::vector<complex>(grid.size())};
	for (std::size_t i = 0; i < grid.size(); ++i)
		if (std::abs(grid.point(i) - center) <= 0.5 * width)
			mask.values[i] = 1.0;
	return mask;
}

/// Two slits of width d centered at +/- D/2.
inline TransmissionMask double_slit_mask(const Grid &grid, double separation, double width) {
	if (!(width > 0.0) || !(width < separation))
		throw ConfigError("double slit needs 0 < d < D");
	const double outer = 0.5 * separation + 0.5 * width;
	if (!grid.contains(-outer) || !grid.contains(outer))
		throw ConfigError("double slit is not contained in the grid");
	TransmissionMask mask{grid, std::vector<complex>(grid.size())};
	for (std::size_t i = 0; i < grid.size(); ++i) {
		const double x = grid.point(i);
		if (std::abs(x - 0.5 * separation) <= 0.5 * width || std::abs(x + 0.5 * separation) <= 0.5 * width)
			mask.values[i] = 1.0;
	}
	return mask;
}

inline WaveField apply_mask(WaveField f, const TransmissionMask &mask) {
	if (!(f.grid == mask.grid))
		throw ShapeError("mask and field live on different grids");
	for (std::size_t i = 0; i < f.size(); ++i)
		f.amplitudes[i] *= mask.values[i];
	return f;
}

namespace detail {

inline void check_fresnel_validity(const Grid &src, const Grid &dst, double z) {
	const double reach = std::max(std::abs(dst.hi() - src.lo()), std::abs(src.hi() - dst.lo()));
	if (z < 100.0 * reach)
		warn("Fresnel approximation questionable: z = " + std::to_string(z) + " m vs transverse reach " +
		     std::to_string(reach) + " m");
}

// e^{ikz} / sqrt(i lambda z)
inline complex fresnel_prefactor(double z, double wavelength) {
	const double k = 2.0 * std::numbers::pi / wavelength;
	return std::polar(1.0, k * z) * std::polar(1.0 / std::sqrt(wavelength * z), -0.25 * std::numbers::pi);
}

inline void check_propagation_args(double z, double wavelength) {
	if (!(z > 0.0) || !std::isfinite(z))
		throw ConfigError("propagation distance must be positive");
	if (!(wavelength > 0.0))
		throw ConfigError("wavelength must be positive");
}

} // namespace detail

/// Fresnel propagation by direct quadrature over the source grid:
/// psi(x) = C * sum_j w_j e^{ik(x - x'_j)^2 / 2z} psi(x'_j).
/// The kernel is evaluated on the fly, so memory stays O(n_src + n_dst).
inline WaveField propagate(const WaveField &f, const Grid &dst, double z, double wavelength) {
	detail::check_propagation_args(z, wavelength);
	detail::check_fresnel_validity(f.grid, dst, z);

	const double k = 2.0 * std::numbers::pi / wavelength;
	const double chirp = k / (2.0 * z);
	const complex prefactor = detail::fresnel_prefactor(z, wavelength);

	std::vector<std::size_t> support;
	std::vector<complex> weighted;
	for (std::size_t j = 0; j < f.size(); ++j) {
		if (f.amplitudes[j] != complex{}) {
			support.push_back(j);
			weighted.push_back(f.grid.weight(j) * f.amplitudes[j]);
		}
	}

	WaveField out(dst);
	for (std::size_t i = 0; i < dst.size(); ++i) {
		const double x = dst.point(i);
		complex acc{};
		for (std::size_t s = 0; s < support.size(); ++s) {
			const double dx = x - f.grid.point(support[s]);
			acc += weighted[s] * std::polar(1.0, chirp * dx * dx);
		}
		out.amplitudes[i] = prefactor * acc;
	}
	return out;
}

/// Cached Fresnel kernel between two fixed grids, restricted to the source
/// points in `support`. Reused across realizations that share an aperture.
class FresnelPropagator {
public:
	FresnelPropagator() = default;

	FresnelPropagator(const Grid &src, const Grid &dst, double z, double wavelength, std::vector<std::size_t> support)
	    : src_(src), dst_(dst), support_(std::move(support)), in_support_(src.size(), 0) {
		detail::check_propagation_args(z, wavelength);
		detail::check_fresnel_validity(src, dst, z);
		const double k = 2.0 * std::numbers::pi / wavelength;
		const double chirp = k / (2.0 * z);
		const complex prefactor = detail::fresnel_prefactor(z, wavelength);

		kernel_.resize(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(support_.size()));
		for (std::size_t s = 0; s < support_.size(); ++s) {
			const std::size_t j = support_[s];
			if (j >= src.size())
				throw ShapeError("support index outside the source grid");
			in_support_[j] = 1;
			const double xs = src.point(j);
			const complex wj = prefactor * src.weight(j);
			for (std::size_t i = 0; i < dst.size(); ++i) {
				const double dx = dst.point(i) - xs;
				kernel_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = wj * std::polar(1.0, chirp * dx * dx);
			}
		}
	}

	/// Support = every point where `mask` is nonzero.
	static std::vector<std::size_t> support_of(const TransmissionMask &mask) {
		std::vector<std::size_t> s;
		for (std::size_t i = 0; i < mask.values.size(); ++i)
			if (mask.values[i] != complex{})
				s.push_back(i);
		return s;
	}

	const Grid &source_grid() const noexcept { return src_; }
	const Grid &destination_grid() const noexcept { return dst_; }
	const std::vector<std::size_t> &support() const noexcept { return support_; }

	/// Gather the supported samples of `f` into a column vector.
	Eigen::VectorXcd gather(const WaveField &f) const {
		if (!(f.grid == src_))
			throw ShapeError("field is not on the propagator's source grid");
		for (std::size_t j = 0; j < f.size(); ++j)
			if (!in_support_[j] && f.amplitudes[j] != complex{})
				throw ShapeError("field is nonzero outside the propagator support");
		Eigen::VectorXcd v(static_cast<Eigen::Index>(support_.size()));
		for (std::size_t s = 0; s < support_.size(); ++s)
			v(static_cast<Eigen::Index>(s)) = f.amplitudes[support_[s]];
		return v;
	}

	WaveField apply(const WaveField &f) const {
		const Eigen::VectorXcd out = kernel_ * gather(f);
		return WaveField(dst_, std::vector<complex>(out.data(), out.data() + out.size()));
	}

	/// Propagate many gathered fields at once, one per column.
	Eigen::MatrixXcd apply_columns(const Eigen::MatrixXcd &columns) const {
		if (columns.rows() != kernel_.cols())
			throw ShapeError("column height does not match the propagator support");
		return kernel_ * columns;
	}

private:
	Grid src_;
	Grid dst_;
	std::vector<std::size_t> support_;
	std::vector<char> in_support_;
	Eigen::MatrixXcd kernel_;
};

/// Normalized Gaussian whose intensity FWHM is `fwhm`, centered on the grid.
inline WaveField source_wave(const Grid &grid, double fwhm) {
	if (!(fwhm > 0.0))
		throw ConfigError("source width must be positive");
	if (grid.span() < 3.0 * fwhm)
		throw ConfigError("source grid must span at least three source widths");
	// |psi|^2 = exp(-x^2 / s^2) has FWHM 2 s sqrt(ln 2).
	const double s = fwhm / (2.0 * std::sqrt(std::numbers::ln2));
	WaveField f(grid);
	for (std::size_t i = 0; i < grid.size(); ++i) {
		const double u = (grid.point(i) - grid.center()) / s;
		f.amplitudes[i] = std::exp(-0.5 * u * u);
	}
	return normalize(std::move(f));
}

enum class FarFieldMode {
	Direct,     // theta = x / L2, a detector pattern
	Correlation // theta = 2x / L2, the symmetric-pair coordinate of delta g2
};

/// Fraunhofer double-slit intensity sinc^2(pi d sin t / lambda) cos^2(pi D sin t / lambda), peak 1.
inline double farfield_reference(double x, const OpticalParams &p, FarFieldMode mode = FarFieldMode::Correlation) {
	const double lambda = p.wavelength();
	const double theta = (mode == FarFieldMode::Correlation ? 2.0 * x : x) / p.L2;
	const double s = std::sin(theta);
	const double beta = std::numbers::pi * p.slit_width * s / lambda;
	const double sinc = beta == 0.0 ? 1.0 : std::sin(beta) / beta;
	const double c = std::cos(std::numbers::pi * p.slit_separation * s / lambda);
	return sinc * sinc * c * c;
}

} // namespace fringelab

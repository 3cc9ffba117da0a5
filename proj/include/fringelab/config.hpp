#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "correlation.hpp"
#include "density.hpp"
#include "disturbance.hpp"
#include "format.hpp"
#include "optics.hpp"

namespace fringelab {

enum class Mode { None, Dephaser, Decoherer, SingleSlitDephaser };

inline std::string to_string(Mode m) {
	switch (m) {
	case Mode::None: return "none";
	case Mode::Dephaser: return "dephaser";
	case Mode::Decoherer: return "decoherer";
	case Mode::SingleSlitDephaser: return "single_slit_dephaser";
	}
	return "none";
}

struct Numerics {
	std::size_t n_source = 4096;   // source plane points
	double source_span = 90e-6;    // source plane window
	std::size_t n_src = 4096;      // slit plane points over the surface window
	std::size_t n_det = 2049;      // detector points, odd
	double detector_span = 1.2e-3; // detector window, centered on 0
};

struct SweepSpec {
	std::vector<double> w_values;
	std::vector<DecohererModel> models{DecohererModel::Gaussian, DecohererModel::TopHat};
	double center_ratio = 8.0; // delta0 / x0 for the Gaussian model
};

struct ExperimentConfig {
	OpticalParams optical;
	Numerics numerics;
	Mode mode = Mode::None;
	DephaserSpec dephaser;
	DecohererSpec decoherer;
	std::size_t n_realizations = 500;
	std::uint64_t master_seed = 1;
	bool pair_seeds = true; // dephaser and decoherer runs share theta per index
	ClassifierThresholds thresholds;
	double mask_epsilon = default_mask_epsilon;
	SweepSpec sweep;

	Interval surface() const { return {-0.5 * optical.surface_window, 0.5 * optical.surface_window}; }

	/// Disturbances act over the surface window.
	void sync_windows() {
		dephaser.window = surface();
		decoherer.window = surface();
	}

	void validate() const {
		optical.validate();
		dephaser.validate();
		decoherer.validate();
		if (numerics.n_det < 3 || numerics.n_det % 2 == 0)
			throw ConfigError("detector point count must be odd and at least 3");
		if (numerics.n_src < 2 || numerics.n_source < 2)
			throw ConfigError("grids need at least two points");
		if (!(numerics.detector_span > 0.0) || !(numerics.source_span > 0.0))
			throw ConfigError("grid spans must be positive");
		if (n_realizations < 1)
			throw ConfigError("n_realizations must be at least 1");
		if (!(mask_epsilon >= 0.0))
			throw ConfigError("mask_epsilon must be non-negative");
		if (!std::is_sorted(sweep.w_values.begin(), sweep.w_values.end()))
			throw ConfigError("sweep w_values must be sorted ascending");
		for (double w : sweep.w_values)
			if (!(w > 0.0))
				throw ConfigError("sweep w_values must be positive");
		if (!(sweep.center_ratio > 0.0))
			throw ConfigError("sweep center_ratio must be positive");
	}

	/// Baseline apparatus: 1670 eV electrons, 24 cm + 25 cm, 150 nm / 50 nm slits.
	static ExperimentConfig baseline() {
		ExperimentConfig c;
		c.sync_windows();
		return c;
	}
};

namespace detail {

inline std::string trim(std::string_view s) {
	const auto b = s.find_first_not_of(" \t\r");
	if (b == std::string_view::npos)
		return {};
	const auto e = s.find_last_not_of(" \t\r");
	return std::string(s.substr(b, e - b + 1));
}

inline std::string lower(std::string s) {
	std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return s;
}

enum class Quantity { Length, Energy, Angle, Plain };

// "<number> [unit]" converted to SI (energies stay in eV).
inline double parse_quantity(const std::string &text, Quantity q) {
	const std::string t = trim(text);
	std::size_t split = 0;
	while (split < t.size() && (std::isdigit(static_cast<unsigned char>(t[split])) || t[split] == '.' ||
	                            t[split] == '-' || t[split] == '+' || t[split] == 'e' || t[split] == 'E')) {
		// Stop before a unit that starts with 'e' (eV), i.e. an 'e' not followed by a digit or sign.
		if ((t[split] == 'e' || t[split] == 'E') &&
		    (split + 1 >= t.size() ||
		     !(std::isdigit(static_cast<unsigned char>(t[split + 1])) || t[split + 1] == '-' || t[split + 1] == '+')))
			break;
		++split;
	}
	const double value = parse_double(trim(t.substr(0, split)));
	const std::string unit = trim(t.substr(split));
	if (unit.empty())
		return value;

	// Sub-unit prefixes divide so that e.g. "6.25 nm" rounds to the same double as 6.25e-9.
	static const std::map<std::string, double> lengths{{"m", 1.0},   {"cm", -1e2}, {"mm", -1e3},
	                                                   {"um", -1e6}, {"μm", -1e6}, {"nm", -1e9},
	                                                   {"pm", -1e12}};
	static const std::map<std::string, double> energies{{"ev", 1.0}, {"kev", 1e3}};
	static const std::map<std::string, double> angles{{"rad", 1.0}, {"pi", std::numbers::pi}};
	const std::map<std::string, double> *table = nullptr;
	switch (q) {
	case Quantity::Length: table = &lengths; break;
	case Quantity::Energy: table = &energies; break;
	case Quantity::Angle: table = &angles; break;
	case Quantity::Plain: break;
	}
	const std::string key = q == Quantity::Length ? unit : lower(unit);
	if (table) {
		if (auto it = table->find(key); it != table->end())
			return it->second < 0.0 ? value / -it->second : value * it->second;
	}
	throw ConfigError("unknown unit '" + unit + "' in '" + t + "'");
}

inline std::size_t parse_count(const std::string &text) {
	const double v = parse_double(trim(text));
	if (v < 0.0 || v != std::floor(v) || v > 1e15)
		throw ConfigError("expected a non-negative integer, got '" + text + "'");
	return static_cast<std::size_t>(v);
}

inline std::uint64_t parse_seed(const std::string &text) {
	const std::string t = trim(text);
	std::uint64_t v = 0;
	const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
	if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size())
		throw ConfigError("expected an unsigned 64-bit seed, got '" + text + "'");
	return v;
}

inline bool parse_bool(const std::string &text) {
	const auto t = lower(trim(text));
	if (t == "true" || t == "yes" || t == "1")
		return true;
	if (t == "false" || t == "no" || t == "0")
		return false;
	throw ConfigError("expected a boolean, got '" + text + "'");
}

inline DecohererModel parse_model(const std::string &text) {
	const auto t = lower(trim(text));
	if (t == "gaussian")
		return DecohererModel::Gaussian;
	if (t == "tophat")
		return DecohererModel::TopHat;
	throw ConfigError("unknown decoherer model '" + text + "'");
}

inline std::vector<std::string> split_list(const std::string &text) {
	std::vector<std::string> out;
	std::stringstream ss(text);
	std::string item;
	while (std::getline(ss, item, ','))
		if (auto t = trim(item); !t.empty())
			out.push_back(t);
	return out;
}

} // namespace detail

/// Parses the sectioned key = value format. Unknown sections or keys are errors.
inline ExperimentConfig parse_config(std::string_view text) {
	using detail::Quantity;
	ExperimentConfig c = ExperimentConfig::baseline();
	std::string section;
	std::istringstream in{std::string(text)};
	std::string raw;
	int line_no = 0;
	while (std::getline(in, raw)) {
		++line_no;
		if (auto hash = raw.find('#'); hash != std::string::npos)
			raw.erase(hash);
		const std::string line = detail::trim(raw);
		if (line.empty())
			continue;
		const std::string where = "line " + std::to_string(line_no) + ": ";
		if (line.front() == '[') {
			if (line.back() != ']')
				throw ConfigError(where + "unterminated section header");
			section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
			continue;
		}
		const auto eq = line.find('=');
		if (eq == std::string::npos)
			throw ConfigError(where + "expected key = value");
		const std::string key = detail::trim(std::string_view(line).substr(0, eq));
		const std::string value = detail::trim(std::string_view(line).substr(eq + 1));

		auto len = [&] { return detail::parse_quantity(value, Quantity::Length); };
		auto num = [&] { return detail::parse_quantity(value, Quantity::Plain); };
		try {
			if (section == "optical") {
				if (key == "energy") c.optical.energy_ev = detail::parse_quantity(value, Quantity::Energy);
				else if (key == "L1") c.optical.L1 = len();
				else if (key == "L2") c.optical.L2 = len();
				else if (key == "slit_separation") c.optical.slit_separation = len();
				else if (key == "slit_width") c.optical.slit_width = len();
				else if (key == "surface_window") c.optical.surface_window = len();
				else if (key == "source_width") c.optical.source_width = len();
				else throw ConfigError("unknown key");
			} else if (section == "numerics") {
				if (key == "n_source") c.numerics.n_source = detail::parse_count(value);
				else if (key == "source_span") c.numerics.source_span = len();
				else if (key == "n_src") c.numerics.n_src = detail::parse_count(value);
				else if (key == "n_det") c.numerics.n_det = detail::parse_count(value);
				else if (key == "detector_span") c.numerics.detector_span = len();
				else throw ConfigError("unknown key");
			} else if (section == "experiment") {
				if (key == "mode") {
					const auto m = detail::lower(value);
					if (m == "none") c.mode = Mode::None;
					else if (m == "dephaser") c.mode = Mode::Dephaser;
					else if (m == "decoherer") c.mode = Mode::Decoherer;
					else if (m == "single_slit_dephaser") c.mode = Mode::SingleSlitDephaser;
					else throw ConfigError("unknown mode '" + value + "'");
				} else if (key == "n_realizations") c.n_realizations = detail::parse_count(value);
				else if (key == "master_seed") c.master_seed = detail::parse_seed(value);
				else if (key == "pair_seeds") c.pair_seeds = detail::parse_bool(value);
				else throw ConfigError("unknown key");
			} else if (section == "dephaser") {
				if (key == "n_gaussians") c.dephaser.n_gaussians = static_cast<int>(detail::parse_count(value));
				else if (key == "amp_low") c.dephaser.amp_low = detail::parse_quantity(value, Quantity::Angle);
				else if (key == "amp_high") c.dephaser.amp_high = detail::parse_quantity(value, Quantity::Angle);
				else if (key == "sigma_mean") c.dephaser.sigma_mean = len();
				else if (key == "sigma_std") c.dephaser.sigma_std = len();
				else if (key == "sigma_floor") c.dephaser.sigma_floor = len();
				else throw ConfigError("unknown key");
			} else if (section == "decoherer") {
				if (key == "model") c.decoherer.model = detail::parse_model(value);
				else if (key == "delta0") c.decoherer.delta0 = len();
				else if (key == "x0") c.decoherer.x0 = len();
				else if (key == "w") c.decoherer.w = len();
				else throw ConfigError("unknown key");
			} else if (section == "classifier") {
				if (key == "r_hi") c.thresholds.r_hi = num();
				else if (key == "r_lo") c.thresholds.r_lo = num();
				else if (key == "f_hi") c.thresholds.f_hi = num();
				else if (key == "f_lo") c.thresholds.f_lo = num();
				else if (key == "mask_epsilon") c.mask_epsilon = num();
				else throw ConfigError("unknown key");
			} else if (section == "sweep") {
				if (key == "w_values") {
					c.sweep.w_values.clear();
					for (const auto &item : detail::split_list(value))
						c.sweep.w_values.push_back(detail::parse_quantity(item, Quantity::Length));
				} else if (key == "models") {
					c.sweep.models.clear();
					for (const auto &item : detail::split_list(value))
						c.sweep.models.push_back(detail::parse_model(item));
				} else if (key == "center_ratio") c.sweep.center_ratio = num();
				else throw ConfigError("unknown key");
			} else {
				throw ConfigError("unknown section [" + section + "]");
			}
		} catch (const ConfigError &e) {
			throw ConfigError(where + "[" + section + "] " + key + ": " + e.what());
		} catch (const std::exception &e) {
			throw ConfigError(where + "[" + section + "] " + key + ": bad value '" + value + "'");
		}
	}
	c.sync_windows();
	c.validate();
	return c;
}

inline ExperimentConfig load_config(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw ConfigError("cannot read config file '" + path + "'");
	std::stringstream ss;
	ss << in.rdbuf();
	return parse_config(ss.str());
}

/// Canonical form: every key in a fixed order, SI values in shortest
/// round-trip decimal. It is itself a valid config file.
inline std::string canonical_text(const ExperimentConfig &c) {
	std::ostringstream o;
	auto f = format_double;
	auto model = [](DecohererModel m) { return m == DecohererModel::Gaussian ? "gaussian" : "tophat"; };
	o << "[optical]\n"
	  << "energy = " << f(c.optical.energy_ev) << "\n"
	  << "L1 = " << f(c.optical.L1) << "\n"
	  << "L2 = " << f(c.optical.L2) << "\n"
	  << "slit_separation = " << f(c.optical.slit_separation) << "\n"
	  << "slit_width = " << f(c.optical.slit_width) << "\n"
	  << "surface_window = " << f(c.optical.surface_window) << "\n"
	  << "source_width = " << f(c.optical.source_width) << "\n";
	o << "[numerics]\n"
	  << "n_source = " << c.numerics.n_source << "\n"
	  << "source_span = " << f(c.numerics.source_span) << "\n"
	  << "n_src = " << c.numerics.n_src << "\n"
	  << "n_det = " << c.numerics.n_det << "\n"
	  << "detector_span = " << f(c.numerics.detector_span) << "\n";
	o << "[experiment]\n"
	  << "mode = " << to_string(c.mode) << "\n"
	  << "n_realizations = " << c.n_realizations << "\n"
	  << "master_seed = " << c.master_seed << "\n"
	  << "pair_seeds = " << (c.pair_seeds ? "true" : "false") << "\n";
	o << "[dephaser]\n"
	  << "n_gaussians = " << c.dephaser.n_gaussians << "\n"
	  << "amp_low = " << f(c.dephaser.amp_low) << "\n"
	  << "amp_high = " << f(c.dephaser.amp_high) << "\n"
	  << "sigma_mean = " << f(c.dephaser.sigma_mean) << "\n"
	  << "sigma_std = " << f(c.dephaser.sigma_std) << "\n"
	  << "sigma_floor = " << f(c.dephaser.sigma_floor) << "\n";
	o << "[decoherer]\n"
	  << "model = " << model(c.decoherer.model) << "\n"
	  << "delta0 = " << f(c.decoherer.delta0) << "\n"
	  << "x0 = " << f(c.decoherer.x0) << "\n"
	  << "w = " << f(c.decoherer.w) << "\n";
	o << "[classifier]\n"
	  << "r_hi = " << f(c.thresholds.r_hi) << "\n"
	  << "r_lo = " << f(c.thresholds.r_lo) << "\n"
	  << "f_hi = " << f(c.thresholds.f_hi) << "\n"
	  << "f_lo = " << f(c.thresholds.f_lo) << "\n"
	  << "mask_epsilon = " << f(c.mask_epsilon) << "\n";
	o << "[sweep]\n";
	if (!c.sweep.w_values.empty()) {
		o << "w_values = ";
		for (std::size_t i = 0; i < c.sweep.w_values.size(); ++i)
			o << (i ? ", " : "") << f(c.sweep.w_values[i]);
		o << "\n";
	}
	o << "models = ";
	for (std::size_t i = 0; i < c.sweep.models.size(); ++i)
		o << (i ? ", " : "") << model(c.sweep.models[i]);
	o << "\n"
	  << "center_ratio = " << f(c.sweep.center_ratio) << "\n";
	return o.str();
}

/// Stable token binding outputs to the configuration that produced them.
inline std::string config_digest(const ExperimentConfig &c) { return hex64(fnv1a(canonical_text(c))); }

} // namespace fringelab

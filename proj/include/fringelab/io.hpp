#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "correlation.hpp"
#include "density.hpp"
#include "format.hpp"

namespace fringelab {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr const char *ensemble_format = "fringelab-ensemble/1";

namespace detail {

inline void write_text(const fs::path &path, const std::string &text) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw IoError("cannot write '" + path.string() + "'");
	out << text;
	if (!out)
		throw IoError("write failed for '" + path.string() + "'");
}

inline std::string read_text(const fs::path &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw IoError("cannot read '" + path.string() + "'");
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

inline std::string csv_number(double v) { return std::isnan(v) ? "nan" : format_double(v); }

inline std::vector<std::string> split_csv_line(const std::string &line) {
	std::vector<std::string> cells;
	std::size_t start = 0;
	for (;;) {
		const auto comma = line.find(',', start);
		cells.push_back(line.substr(start, comma - start));
		if (comma == std::string::npos)
			return cells;
		start = comma + 1;
	}
}

} // namespace detail

/// Header `x_m,intensity`.
inline std::string pattern_csv(const IntensityPattern &p) {
	std::string s = "x_m,intensity\n";
	for (std::size_t i = 0; i < p.size(); ++i)
		s += format_double(p.grid.point(i)) + "," + format_double(p.values[i]) + "\n";
	return s;
}

/// Header `x_m,delta_g2,reference`; masked points are written as nan.
inline std::string delta_g2_csv(const CorrelationResult &r) {
	std::string s = "x_m,delta_g2,reference\n";
	for (std::size_t i = 0; i < r.x.size(); ++i) {
		const double g = r.valid[i] ? r.delta_g2[i] : std::nan("");
		const double ref = i < r.reference.size() ? r.reference[i] : std::nan("");
		s += format_double(r.x[i]) + "," + detail::csv_number(g) + "," + detail::csv_number(ref) + "\n";
	}
	return s;
}

/// Header `w_m,S_nats,model`, one row per (w, model).
inline std::string entropy_csv(const EntropyCurve &c) {
	std::string s = "w_m,S_nats,model\n";
	for (const auto &p : c.points)
		s += format_double(p.w) + "," + format_double(p.entropy) + "," + to_string(p.model) + "\n";
	return s;
}

inline json summary_json(const CorrelationResult &r) {
	return json{{"pearson_r", r.pearson_r},
	            {"fringe_power_ratio", r.fringe_power_ratio},
	            {"verdict", to_string(r.verdict)},
	            {"n_realizations", r.n_realizations},
	            {"config_digest", r.config_digest}};
}

/// Writes `manifest.json` and `patterns.csv` (first column x_m, then one
/// column per realization) into `dir`.
inline void save_ensemble(const fs::path &dir, const Ensemble &e, const ExperimentConfig &cfg,
                          const std::optional<CorrelationResult> &inline_result = std::nullopt) {
	e.validate();
	fs::create_directories(dir);
	const Grid &g = e.grid();
	json manifest{{"format", ensemble_format},
	              {"config", canonical_text(cfg)},
	              {"config_digest", e.config_digest},
	              {"n_realizations", e.size()},
	              {"seeds", e.seeds},
	              {"grid", {{"center", g.center()}, {"span", g.span()}, {"n", g.size()}}}};
	if (inline_result)
		manifest["summary"] = summary_json(*inline_result);
	detail::write_text(dir / "manifest.json", manifest.dump(2) + "\n");

	std::string csv = "x_m";
	for (std::size_t k = 0; k < e.size(); ++k)
		csv += ",r" + std::to_string(k);
	csv += "\n";
	for (std::size_t i = 0; i < g.size(); ++i) {
		csv += format_double(g.point(i));
		for (const auto &p : e.patterns)
			csv += "," + format_double(p.values[i]);
		csv += "\n";
	}
	detail::write_text(dir / "patterns.csv", csv);
}

struct LoadedEnsemble {
	Ensemble ensemble;
	ExperimentConfig config;
	std::optional<json> summary;
};

/// Reads a directory written by save_ensemble, or any directory following
/// the same schema. Missing or malformed files raise IoError.
inline LoadedEnsemble load_ensemble(const fs::path &dir) {
	json manifest;
	try {
		manifest = json::parse(detail::read_text(dir / "manifest.json"));
	} catch (const json::exception &e) {
		throw IoError("corrupt manifest in '" + dir.string() + "': " + e.what());
	}

	LoadedEnsemble out;
	try {
		out.config = parse_config(manifest.at("config").get<std::string>());
	} catch (const json::exception &e) {
		throw IoError("manifest lacks a config: " + std::string(e.what()));
	} catch (const ConfigError &e) {
		throw IoError("manifest config is invalid: " + std::string(e.what()));
	}
	out.ensemble.config_digest = manifest.value("config_digest", config_digest(out.config));
	if (manifest.contains("summary"))
		out.summary = manifest["summary"];

	std::istringstream csv(detail::read_text(dir / "patterns.csv"));
	std::string line;
	if (!std::getline(csv, line))
		throw IoError("patterns.csv is empty");
	const auto header = detail::split_csv_line(line);
	if (header.empty() || header.front() != "x_m")
		throw IoError("patterns.csv must start with an x_m column");
	const std::size_t columns = header.size() - 1;

	std::vector<double> xs;
	std::vector<std::vector<double>> values(columns);
	std::size_t row = 1;
	while (std::getline(csv, line)) {
		++row;
		if (line.empty())
			continue;
		const auto cells = detail::split_csv_line(line);
		if (cells.size() != header.size())
			throw IoError("patterns.csv row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells");
		try {
			xs.push_back(parse_double(cells[0]));
			for (std::size_t k = 0; k < columns; ++k)
				values[k].push_back(parse_double(cells[k + 1]));
		} catch (const ConfigError &) {
			throw IoError("patterns.csv row " + std::to_string(row) + " is not numeric");
		}
	}
	if (xs.size() < 2)
		throw IoError("patterns.csv has fewer than two rows");

	Grid grid;
	try {
		if (manifest.contains("grid")) {
			const auto &gj = manifest["grid"];
			grid = Grid(gj.at("center").get<double>(), gj.at("span").get<double>(), gj.at("n").get<std::size_t>());
		} else {
			grid = Grid(0.5 * (xs.front() + xs.back()), xs.back() - xs.front(), xs.size());
		}
	} catch (const std::exception &e) {
		throw IoError("bad grid description: " + std::string(e.what()));
	}
	if (grid.size() != xs.size())
		throw IoError("grid size does not match patterns.csv");
	for (std::size_t i = 0; i < xs.size(); ++i)
		if (std::abs(grid.point(i) - xs[i]) > 1e-6 * grid.step())
			throw IoError("x_m column does not match the grid at row " + std::to_string(i + 2));

	for (auto &v : values)
		out.ensemble.patterns.emplace_back(grid, std::move(v));
	if (manifest.contains("seeds"))
		out.ensemble.seeds = manifest["seeds"].get<std::vector<std::uint64_t>>();
	if (!out.ensemble.seeds.empty() && out.ensemble.seeds.size() != out.ensemble.patterns.size())
		throw IoError("manifest seed count does not match patterns.csv");
	return out;
}

/// Exclusive lock on an output directory, released on destruction.
class DirectoryLock {
public:
	explicit DirectoryLock(const fs::path &dir) : path_(dir / ".fringelab.lock") {
		fs::create_directories(dir);
		std::FILE *f = std::fopen(path_.c_str(), "wx");
		if (!f)
			throw IoError("output directory '" + dir.string() + "' is locked by another run (" + path_.string() + ")");
		std::fclose(f);
	}
	DirectoryLock(const DirectoryLock &) = delete;
	DirectoryLock &operator=(const DirectoryLock &) = delete;
	~DirectoryLock() {
		std::error_code ec;
		fs::remove(path_, ec);
	}

private:
	fs::path path_;
};

} // namespace fringelab

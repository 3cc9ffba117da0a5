#pragma once

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"
#include "runner.hpp"

namespace fringelab::cli {

struct Options {
	std::string config_path;
	std::optional<std::uint64_t> seed;
	std::string out = "out";
	std::size_t jobs = 0;
	std::string ensemble_dir;
};

/// --jobs, then FRINGELAB_JOBS, then the hardware thread count.
inline std::size_t resolve_jobs(std::size_t requested) {
	if (requested > 0)
		return requested;
	if (const char *env = std::getenv("FRINGELAB_JOBS")) {
		try {
			const auto v = std::stoul(env);
			if (v > 0)
				return v;
		} catch (const std::exception &) {
			throw ConfigError(std::string("FRINGELAB_JOBS is not a positive integer: '") + env + "'");
		}
	}
	return std::max(1u, std::thread::hardware_concurrency());
}

class Run {
public:
	Run(std::string command, const Options &opt) : command_(std::move(command)), opt_(opt) {}

	void add(const fs::path &file) { artifacts_.push_back(file.string()); }

	void finish(const fs::path &dir, const std::string &digest) {
		const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
		for (const auto &f : artifacts_)
			if (!fs::exists(f))
				throw IoError("expected output '" + f + "' is missing");
		json m{{"command", command_},
		       {"config", opt_.config_path},
		       {"out", dir.string()},
		       {"wall_time_s", wall},
		       {"artifacts", artifacts_},
		       {"config_digest", digest}};
		detail::write_text(dir / "run_manifest.json", m.dump(2) + "\n");
	}

private:
	std::string command_;
	Options opt_;
	std::vector<std::string> artifacts_;
	std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline void write(Run &run, const fs::path &path, const std::string &text) {
	detail::write_text(path, text);
	run.add(path);
}

inline int cmd_simulate(const Options &opt) {
	const auto cfg = load_config(opt.config_path);
	const fs::path out = opt.out;
	DirectoryLock lock(out);
	Run run("simulate", opt);
	const auto app = prepare(cfg);
	const std::uint64_t seed = opt.seed.value_or(realization_seed(cfg, 0));
	const auto rec = run_realization(app, seed);

	write(run, out / "pattern.csv", pattern_csv(rec.pattern));
	if (cfg.mode == Mode::Decoherer) {
		json e{{"entropy_slit_plane_nats", rec.entropy_slit_plane},
		       {"seed", seed},
		       {"mode", to_string(cfg.mode)},
		       {"config_digest", config_digest(cfg)}};
		write(run, out / "entropy.json", e.dump(2) + "\n");
	}
	run.finish(out, config_digest(cfg));
	std::cout << "simulate: mode " << to_string(cfg.mode) << ", seed " << seed << ", slit-plane entropy "
	          << format_double(rec.entropy_slit_plane) << " nats -> " << out.string() << "\n";
	return 0;
}

inline int cmd_ensemble(const Options &opt) {
	const auto cfg = load_config(opt.config_path);
	const fs::path out = opt.out;
	DirectoryLock lock(out);
	Run run("ensemble", opt);
	const auto app = prepare(cfg);
	const auto ensemble = run_ensemble(app, resolve_jobs(opt.jobs));

	std::optional<CorrelationResult> result;
	if (ensemble.size() >= 2)
		result = analyze(ensemble, cfg.optical, cfg.thresholds, cfg.mask_epsilon);

	save_ensemble(out / "ensemble", ensemble, cfg, result);
	run.add(out / "ensemble" / "manifest.json");
	run.add(out / "ensemble" / "patterns.csv");
	write(run, out / "mean_pattern.csv", pattern_csv(ensemble_mean(ensemble)));
	if (!result)
		throw DegenerateInputError("correlation analysis needs at least two realizations");
	write(run, out / "delta_g2.csv", delta_g2_csv(*result));
	write(run, out / "summary.json", summary_json(*result).dump(2) + "\n");
	run.finish(out, ensemble.config_digest);
	std::cout << "ensemble: " << ensemble.size() << " realizations, pearson_r " << format_double(result->pearson_r)
	          << ", fringe_power_ratio " << format_double(result->fringe_power_ratio) << ", verdict "
	          << to_string(result->verdict) << "\n";
	return 0;
}

inline int cmd_entropy_sweep(const Options &opt) {
	const auto cfg = load_config(opt.config_path);
	if (cfg.sweep.w_values.empty())
		throw ConfigError("entropy-sweep needs [sweep] w_values");
	const fs::path out = opt.out;
	DirectoryLock lock(out);
	Run run("entropy-sweep", opt);
	const auto curve = run_entropy_sweep(prepare(cfg));
	write(run, out / "entropy_curve.csv", entropy_csv(curve));
	run.finish(out, config_digest(cfg));
	std::cout << "entropy-sweep: " << curve.points.size() << " points -> " << (out / "entropy_curve.csv").string()
	          << "\n";
	return 0;
}

inline int cmd_classify(const Options &opt) {
	const auto loaded = load_ensemble(opt.ensemble_dir);
	const auto &cfg = loaded.config;
	const auto result = analyze(loaded.ensemble, cfg.optical, cfg.thresholds, cfg.mask_epsilon);
	json summary = summary_json(result);
	if (loaded.summary)
		summary["matches_generation"] = (*loaded.summary == summary_json(result));
	if (!opt.out.empty()) {
		const fs::path out = opt.out;
		DirectoryLock lock(out);
		Run run("classify", opt);
		write(run, out / "summary.json", summary.dump(2) + "\n");
		run.finish(out, loaded.ensemble.config_digest);
	}
	std::cout << summary.dump(2) << "\n";
	return 0;
}

/// Entry point shared by the `fringelab` executable and the tests.
inline int run_cli(int argc, const char *const *argv) {
	CLI::App app{"fringelab: double-slit diffraction under dephasing and decoherence"};
	app.require_subcommand(1);
	Options opt;
	std::size_t seed_value = 0;

	auto add_common = [&](CLI::App *sub, bool needs_config) {
		auto *c = sub->add_option("--config", opt.config_path, "experiment config file");
		if (needs_config)
			c->required();
		sub->add_option("--out", opt.out, "output directory");
		sub->add_option("--jobs", opt.jobs, "worker threads (falls back to FRINGELAB_JOBS)");
	};
	auto *simulate = app.add_subcommand("simulate", "one realization: pattern.csv (+ entropy.json)");
	add_common(simulate, true);
	auto *seed_opt = simulate->add_option("--seed", seed_value, "explicit realization seed");
	auto *ensemble = app.add_subcommand("ensemble", "many realizations, delta g2 and verdict");
	add_common(ensemble, true);
	auto *sweep = app.add_subcommand("entropy-sweep", "entropy versus transverse coherence length");
	add_common(sweep, true);
	auto *classify = app.add_subcommand("classify", "re-run the correlation analysis on a stored ensemble");
	add_common(classify, false);
	classify->add_option("ensemble_dir", opt.ensemble_dir, "directory with manifest.json and patterns.csv")->required();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		const int code = app.exit(e);
		return code == 0 ? 0 : 2;
	}
	if (seed_opt->count() > 0)
		opt.seed = static_cast<std::uint64_t>(seed_value);
	if (classify->parsed() && classify->get_option("--out")->count() == 0)
		opt.out.clear();

	try {
		if (simulate->parsed())
			return cmd_simulate(opt);
		if (ensemble->parsed())
			return cmd_ensemble(opt);
		if (sweep->parsed())
			return cmd_entropy_sweep(opt);
		return cmd_classify(opt);
	} catch (const Error &e) {
		std::cerr << "fringelab: error: " << e.what() << "\n";
		return e.exit_code();
	} catch (const fs::filesystem_error &e) {
		std::cerr << "fringelab: error: " << e.what() << "\n";
		return 3;
	}
}

} // namespace fringelab::cli

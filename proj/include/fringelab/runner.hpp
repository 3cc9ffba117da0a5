#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "correlation.hpp"
#include "density.hpp"
#include "disturbance.hpp"
#include "optics.hpp"
#include "seed.hpp"

namespace fringelab {

/// Everything about one configuration that does not depend on the random
/// stream: grids, the undisturbed post-slit field, and the cached
/// slit-to-detector kernel.
struct Apparatus {
	ExperimentConfig config;
	double wavelength = 0.0;
	Grid source_grid;
	Grid slit_grid;
	Grid detector_grid;
	TransmissionMask slits;
	WaveField post_slit;
	FresnelPropagator to_detector;
};

inline Apparatus prepare(const ExperimentConfig &cfg) {
	cfg.validate();
	Apparatus a;
	a.config = cfg;
	a.config.sync_windows();
	const auto &p = a.config.optical;
	const auto &n = a.config.numerics;
	a.wavelength = p.wavelength();
	a.source_grid = make_grid(0.0, n.source_span, n.n_source);
	a.slit_grid = make_grid(0.0, p.surface_window, n.n_src);
	a.detector_grid = make_grid(0.0, n.detector_span, n.n_det);
	a.slits = double_slit_mask(a.slit_grid, p.slit_separation, p.slit_width);

	const WaveField source = source_wave(a.source_grid, p.source_width);
	a.post_slit = apply_mask(propagate(source, a.slit_grid, p.L1, a.wavelength), a.slits);
	a.to_detector = FresnelPropagator(a.slit_grid, a.detector_grid, p.L2, a.wavelength,
	                                  FresnelPropagator::support_of(a.slits));
	return a;
}

/// One simulated experiment: a detector pattern (unit integral) and the
/// slit-plane entropy of the state that reached the detector.
struct RealizationRecord {
	std::uint64_t seed = 0;
	IntensityPattern pattern;
	double entropy_slit_plane = 0.0;
};

/// Random stream seed for realization `index`. Unpaired runs salt the master
/// with the mode so dephaser and decoherer ensembles draw different phases.
inline std::uint64_t realization_seed(const ExperimentConfig &cfg, std::uint64_t index) {
	const std::uint64_t master =
	    cfg.pair_seeds ? cfg.master_seed : derive_seed(cfg.master_seed, 0x5eed0000ULL + static_cast<std::uint64_t>(cfg.mode));
	return derive_seed(master, index);
}

inline ComponentSet pure_state(const WaveField &f) {
	ComponentSet set;
	set.components.push_back(normalize(f));
	return set;
}

/// The phase field a dephasing realization applies: the sampled theta,
/// switched off over the positive-x slit for the single-slit control.
inline PhaseField realization_phase(const Apparatus &a, Rng &rng) {
	PhaseField theta = sample_dephaser(a.config.dephaser, rng, a.slit_grid);
	if (a.config.mode == Mode::SingleSlitDephaser)
		theta = with_phase_off(std::move(theta), 0.5 * a.config.optical.slit_separation, a.config.optical.slit_width);
	return theta;
}

/// Slit-plane state of one realization as an equal-weight mixture.
inline ComponentSet realization_state(const Apparatus &a, std::uint64_t seed) {
	if (a.config.mode == Mode::None)
		return pure_state(a.post_slit);
	Rng rng(seed);
	const WaveField dephased = apply_phase(a.post_slit, realization_phase(a, rng));
	if (a.config.mode == Mode::Decoherer)
		return decompose(dephased, a.config.decoherer);
	return pure_state(dephased);
}

/// Detector intensity sum_n (1/N) |f_n(x)|^2 with every component propagated separately.
inline IntensityPattern detector_intensity(const Apparatus &a, const ComponentSet &state) {
	const auto &support = a.to_detector.support();
	Eigen::MatrixXcd columns(static_cast<Eigen::Index>(support.size()), static_cast<Eigen::Index>(state.size()));
	for (std::size_t n = 0; n < state.size(); ++n)
		columns.col(static_cast<Eigen::Index>(n)) = a.to_detector.gather(state.components[n]);
	const Eigen::MatrixXcd out = a.to_detector.apply_columns(columns);

	std::vector<double> values(a.detector_grid.size(), 0.0);
	const double wn = state.weight();
	for (Eigen::Index i = 0; i < out.rows(); ++i) {
		double acc = 0.0;
		for (Eigen::Index n = 0; n < out.cols(); ++n)
			acc += std::norm(out(i, n));
		values[static_cast<std::size_t>(i)] = wn * acc;
	}
	return IntensityPattern(a.detector_grid, std::move(values));
}

inline RealizationRecord run_realization(const Apparatus &a, std::uint64_t seed) {
	const ComponentSet state = realization_state(a, seed);
	RealizationRecord r;
	r.seed = seed;
	r.entropy_slit_plane = gram_entropy(state);
	r.pattern = normalized(detector_intensity(a, state));
	return r;
}

inline RealizationRecord run_realization(const ExperimentConfig &cfg, std::uint64_t seed) {
	return run_realization(prepare(cfg), seed);
}

/// Error raised inside realization `index`, keeping the original exit code.
class RealizationError : public Error {
public:
	RealizationError(std::size_t index, const Error &inner)
	    : Error("realization " + std::to_string(index) + ": " + inner.what()), index_(index), code_(inner.exit_code()) {}
	std::size_t index() const noexcept { return index_; }
	int exit_code() const noexcept override { return code_; }

private:
	std::size_t index_;
	int code_;
};

/// Runs realizations 0..n-1 on `jobs` threads. Records are stored by index,
/// so the result does not depend on scheduling.
inline std::vector<RealizationRecord> run_records(const Apparatus &a, std::size_t jobs = 1) {
	const std::size_t n = a.config.n_realizations;
	std::vector<RealizationRecord> records(n);
	std::atomic<std::size_t> next{0};
	std::mutex failure_lock;
	std::optional<std::size_t> failed_index;
	std::exception_ptr failure;

	auto worker = [&] {
		for (;;) {
			const std::size_t i = next.fetch_add(1);
			if (i >= n)
				return;
			try {
				records[i] = run_realization(a, realization_seed(a.config, i));
			} catch (...) {
				std::lock_guard lock(failure_lock);
				if (!failed_index || i < *failed_index) {
					failed_index = i;
					failure = std::current_exception();
				}
				next.store(n);
			}
		}
	};

	jobs = std::max<std::size_t>(1, std::min(jobs, n));
	if (jobs == 1) {
		worker();
	} else {
		std::vector<std::jthread> pool;
		for (std::size_t t = 0; t < jobs; ++t)
			pool.emplace_back(worker);
	}

	if (failure) {
		try {
			std::rethrow_exception(failure);
		} catch (const Error &e) {
			throw RealizationError(*failed_index, e);
		}
	}
	return records;
}

inline Ensemble to_ensemble(const std::vector<RealizationRecord> &records, std::string digest) {
	Ensemble e;
	e.config_digest = std::move(digest);
	for (const auto &r : records) {
		e.patterns.push_back(r.pattern);
		e.seeds.push_back(r.seed);
	}
	return e;
}

inline Ensemble run_ensemble(const Apparatus &a, std::size_t jobs = 1) {
	return to_ensemble(run_records(a, jobs), config_digest(a.config));
}

inline Ensemble run_ensemble(const ExperimentConfig &cfg, std::size_t jobs = 1) { return run_ensemble(prepare(cfg), jobs); }

/// Entropy versus coherence length for every model in the config's sweep.
inline EntropyCurve run_entropy_sweep(const Apparatus &a) {
	const auto &cfg = a.config;
	if (cfg.sweep.w_values.empty())
		throw ConfigError("entropy sweep needs [sweep] w_values");
	EntropyCurve all;
	bool shannon_done = false;
	for (auto model : cfg.sweep.models) {
		auto curve = entropy_sweep(a.post_slit, cfg.optical, model, cfg.sweep.w_values, cfg.surface(), cfg.sweep.center_ratio);
		for (const auto &pt : curve.points)
			if (pt.model != EntropyModel::Shannon || !shannon_done)
				all.points.push_back(pt);
		shannon_done = true;
	}
	return all;
}

} // namespace fringelab

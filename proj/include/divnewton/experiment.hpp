#pragma once
/**
 * Batch trajectories, the seeded eigenpair experiment, and writers
 * for their output directories.
 *
 * Work is split across threads by index and results are written in index
 * order, so output files do not depend on the worker count.
 */

#include "divnewton/config.hpp"
#include "divnewton/driver.hpp"
#include "divnewton/field_scanner.hpp"
#include "divnewton/lagrange.hpp"
#include "divnewton/records.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace divnewton {

/// Calls job(i) for i in [0, count) on up to `workers` threads.
inline void parallel_for(int count, int workers, const std::function<void(int)>& job) {
    workers = std::clamp(workers, 1, std::max(1, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            job(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                job(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

inline std::vector<TrajectoryRecord> run_batch(const ObjectiveModel& model, const std::vector<Point>& starts,
                                               Strategy strategy, const ZigzagConfig& cfg = {},
                                               int workers = 1, const RunLimits& limits = {}) {
    std::vector<TrajectoryRecord> out(starts.size());
    parallel_for(static_cast<int>(starts.size()), workers,
                 [&](int i) { out[i] = run(model, starts[i], strategy, cfg, limits); });
    return out;
}

inline int success_count(const std::vector<TrajectoryRecord>& records) {
    return static_cast<int>(std::count_if(records.begin(), records.end(),
                                          [](const TrajectoryRecord& r) { return r.converged(); }));
}

struct EigenRun {
    TrajectoryRecord record;
    double lambda = 0.0;
    double w_norm = 0.0;
    double nearest_eigenvalue = 0.0;
    /// |lambda - nearest| / nearest
    double relative_error = 0.0;
};

struct EigenExperiment {
    EigenProblem problem;
    std::uint64_t seed = 0;
    std::vector<EigenRun> runs;

    bool all_converged() const {
        return std::all_of(runs.begin(), runs.end(), [](const EigenRun& r) { return r.record.converged(); });
    }
};

/// Run i starts from sample_start(problem, derive_seed(seed, i)); the problem itself uses `seed`.
inline EigenExperiment run_eigen_experiment(int n, int count, std::uint64_t seed, const ZigzagConfig& cfg = {},
                                            int workers = 1, Strategy strategy = Strategy::zigzag_parallel) {
    EigenExperiment ex;
    ex.seed = seed;
    ex.problem = build_eigen_problem(n, seed);
    const ObjectiveModel model = eigen_model(ex.problem);
    ex.runs.resize(static_cast<std::size_t>(count));
    parallel_for(count, workers, [&](int i) {
        EigenRun& r = ex.runs[i];
        r.record = run(model, sample_start(ex.problem, derive_seed(seed, static_cast<std::uint64_t>(i))),
                       strategy, cfg);
        const Point& z = r.record.final_point();
        r.lambda = z(n);
        r.w_norm = z.head(n).norm();
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) {
            const double e = ex.problem.spectrum(k);
            if (std::abs(r.lambda - e) < best) {
                best = std::abs(r.lambda - e);
                r.nearest_eigenvalue = e;
            }
        }
        r.relative_error = best / std::abs(r.nearest_eigenvalue);
    });
    return ex;
}

namespace fs = std::filesystem;

inline std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    return out;
}

/// trajectories.txt plus alpha/run_<i>.txt under dir.
inline void write_run_outputs(const fs::path& dir, const std::string& function, Strategy strategy,
                              const std::vector<TrajectoryRecord>& records) {
    auto traj = open_output(dir / "trajectories.txt");
    for (std::size_t i = 0; i < records.size(); ++i) {
        traj << trajectory_line(static_cast<int>(i), function, strategy, records[i]) << '\n';
        auto alpha = open_output(dir / "alpha" / ("run_" + std::to_string(i) + ".txt"));
        write_alpha_log(alpha, records[i]);
    }
}

struct ScanResult {
    FieldGrid grid;
    std::vector<ZeroCurve> tau_curves;
    std::vector<ZeroCurve> det_curves;
    std::vector<SingularityStats> det_kinds;
};

inline ScanResult scan_function(const ObjectiveModel& model, const Window& window, int nx, int ny,
                                const ZigzagConfig& cfg = {}, int workers = 1) {
    ScanResult r;
    r.grid = scan(model, window, nx, ny, workers);
    r.tau_curves = zero_curves(r.grid, CurveField::tau_minus_one, cfg.entry_threshold);
    r.det_curves = zero_curves(r.grid, CurveField::det_hess);
    for (const auto& c : r.det_curves) {
        r.det_kinds.push_back(singularity_stats(r.grid, c));
    }
    return r;
}

/// One file per layer plus mask, both curve files and singularities.txt under dir.
inline void write_scan_outputs(const fs::path& dir, const ScanResult& r) {
    for (const auto& name : layer_names()) {
        auto out = open_output(dir / (name + ".txt"));
        write_grid_layer(out, r.grid, name);
    }
    {
        auto out = open_output(dir / "mask.txt");
        write_grid_layer(out, r.grid, "mask");
    }
    {
        auto out = open_output(dir / "curves_tau_minus_one.txt");
        write_curves(out, r.tau_curves, CurveField::tau_minus_one);
    }
    {
        auto out = open_output(dir / "curves_det_hess.txt");
        write_curves(out, r.det_curves, CurveField::det_hess);
    }
    auto out = open_output(dir / "singularities.txt");
    for (std::size_t i = 0; i < r.det_kinds.size(); ++i) {
        const auto& s = r.det_kinds[i];
        out << "curve=" << i << " points=" << r.det_curves[i].polyline.size() << " kind=" << to_string(s.kind)
            << " samples=" << s.samples << " tangent_cos_plus=" << format_double(s.tangent_cos_plus)
            << " tangent_cos_minus=" << format_double(s.tangent_cos_minus)
            << " opposing=" << format_double(s.opposing_fraction) << '\n';
    }
}

/// matrix.txt, eigen.txt (one line per run) and criterion/run_<i>.txt under dir.
inline void write_eigen_outputs(const fs::path& dir, const EigenExperiment& ex, Strategy strategy) {
    {
        auto out = open_output(dir / "matrix.txt");
        out << "# n=" << ex.problem.n << " seed=" << ex.seed << '\n';
        for (int i = 0; i < ex.problem.n; ++i) {
            for (int j = 0; j < ex.problem.n; ++j) {
                out << (j ? " " : "") << format_double(ex.problem.c(i, j));
            }
            out << '\n';
        }
    }
    auto summary = open_output(dir / "eigen.txt");
    std::vector<TrajectoryRecord> records;
    for (std::size_t i = 0; i < ex.runs.size(); ++i) {
        const EigenRun& r = ex.runs[i];
        summary << "run=" << i << " converged=" << (r.record.converged() ? 1 : 0)
                << " outcome=" << to_string(r.record.outcome) << " steps=" << r.record.steps_taken
                << " lambda=" << format_double(r.lambda) << " w_norm=" << format_double(r.w_norm)
                << " nearest_eigenvalue=" << format_double(r.nearest_eigenvalue)
                << " relative_error=" << format_double(r.relative_error)
                << " grad_norm=" << format_double(r.record.final_gradient_norm)
                << " ids=" << (r.record.strategy_string.empty() ? "-" : r.record.strategy_string) << '\n';
        auto crit = open_output(dir / "criterion" / ("run_" + std::to_string(i) + ".txt"));
        crit << "# iterate tau_check\n";
        for (std::size_t k = 0; k < r.record.tau_check.size(); ++k) {
            crit << k << ' ' << format_double(r.record.tau_check[k]) << '\n';
        }
        records.push_back(r.record);
    }
    write_run_outputs(dir, "eigen", strategy, records);
}

}  // namespace divnewton

// Command-line front end: run, scan, eigen, presets.

#include "divnewton/divnewton.hpp"
#include "divnewton/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace dn = divnewton;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::string> function;
    std::optional<std::string> strategy;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> workers;
    std::optional<std::string> resolution;
    std::optional<std::string> window;
    std::optional<std::string> starts;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "experiment config file (key = value)");
    cmd->add_option("--function", o.function, "function preset, or 'eigen'");
    cmd->add_option("--strategy", o.strategy, "Sno-Mno-Cval2 | Sno-Mex-Cval2 | Szz-Mlm-Ctau | Szzp-Mlm-Ctau");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--out", o.out, "output directory (default $DIVNEWTON_OUT or ./out)");
    cmd->add_option("--workers", o.workers, "worker threads");
    cmd->add_option("--resolution", o.resolution, "grid resolution N or NX,NY");
    cmd->add_option("--window", o.window, "scan window xmin,xmax,ymin,ymax");
    cmd->add_option("--starts", o.starts, "start points 'x,y;x,y' or 'fixture'");
}

dn::ExperimentConfig build_config(const CommonOptions& o) {
    dn::ExperimentConfig c = o.config_path.empty() ? dn::ExperimentConfig{} : dn::load_config(o.config_path);
    if (o.function) dn::apply_setting(c, "function", *o.function);
    if (o.strategy) dn::apply_setting(c, "strategy", *o.strategy);
    if (o.seed) c.seed = *o.seed;
    if (o.workers) c.workers = *o.workers;
    if (o.resolution) dn::apply_setting(c, "resolution", *o.resolution);
    if (o.window) dn::apply_setting(c, "window", *o.window);
    if (o.starts) dn::apply_setting(c, "starts", *o.starts);
    if (o.out) {
        c.output = *o.out;
    } else if (c.output.empty()) {
        const char* env = std::getenv("DIVNEWTON_OUT");
        c.output = env && *env ? env : "out";
    }
    c.validate();
    return c;
}

int cmd_run(const dn::ExperimentConfig& c) {
    if (c.is_eigen()) {
        throw std::invalid_argument("use the 'eigen' subcommand for the eigen experiment");
    }
    const dn::ObjectiveModel model = dn::make_model(c.function);
    const auto starts = c.start_points();
    for (const auto& s : starts) {
        if (s.size() != model.dimension) {
            throw std::invalid_argument("start point dimension does not match the function");
        }
    }
    const auto records = dn::run_batch(model, starts, c.strategy, c.zigzag, c.workers);
    const dn::fs::path dir = dn::fs::path(c.output) / "run" / c.function / dn::to_string(c.strategy);
    dn::write_run_outputs(dir, c.function, c.strategy, records);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        std::printf("run %zu start=%s outcome=%s steps=%d grad_norm=%.3e ids=%s\n", i,
                    dn::format_point(r.start).c_str(), dn::to_string(r.outcome), r.steps_taken,
                    r.final_gradient_norm, r.strategy_string.empty() ? "-" : r.strategy_string.c_str());
    }
    std::printf("%s %s success %d/%zu\n", c.function.c_str(), dn::to_string(c.strategy),
                dn::success_count(records), records.size());
    std::printf("wrote %s\n", dir.string().c_str());
    return 0;
}

int cmd_scan(const dn::ExperimentConfig& c) {
    if (c.is_eigen()) {
        throw std::invalid_argument("scan needs a two-dimensional function preset");
    }
    const dn::ObjectiveModel model = dn::make_model(c.function);
    const auto result = dn::scan_function(model, c.scan_window(), c.nx, c.ny, c.zigzag, c.workers);
    const dn::fs::path dir = dn::fs::path(c.output) / "scan" / c.function;
    dn::write_scan_outputs(dir, result);
    std::size_t masked = 0;
    for (auto m : result.grid.mask) masked += m == 0;
    std::printf("%s %dx%d masked=%zu tau_curves=%zu det_curves=%zu\n", c.function.c_str(), c.nx, c.ny, masked,
                result.tau_curves.size(), result.det_curves.size());
    for (std::size_t i = 0; i < result.det_kinds.size(); ++i) {
        std::printf("det curve %zu: %zu points, %s\n", i, result.det_curves[i].polyline.size(),
                    dn::to_string(result.det_kinds[i].kind));
    }
    std::printf("wrote %s\n", dir.string().c_str());
    return 0;
}

int cmd_eigen(const dn::ExperimentConfig& c) {
    const auto ex = dn::run_eigen_experiment(c.dimension, c.runs, c.seed, c.zigzag, c.workers, c.strategy);
    const dn::fs::path dir = dn::fs::path(c.output) / "eigen" / ("seed_" + std::to_string(c.seed));
    dn::write_eigen_outputs(dir, ex, c.strategy);
    int converged = 0;
    for (std::size_t i = 0; i < ex.runs.size(); ++i) {
        const auto& r = ex.runs[i];
        converged += r.record.converged();
        std::printf("run %zu converged=%d steps=%d lambda=%.10g nearest=%g |w|=%.12f\n", i,
                    r.record.converged() ? 1 : 0, r.record.steps_taken, r.lambda, r.nearest_eigenvalue,
                    r.w_norm);
    }
    std::printf("eigen n=%d seed=%llu converged %d/%zu\n", c.dimension, static_cast<unsigned long long>(c.seed),
                converged, ex.runs.size());
    std::printf("wrote %s\n", dir.string().c_str());
    return 0;
}

int cmd_presets() {
    for (const auto& p : dn::presets()) {
        std::printf("%-32s window=%g,%g,%g,%g", p.name.c_str(), p.window.xmin, p.window.xmax, p.window.ymin,
                    p.window.ymax);
        for (const auto& [k, v] : p.params) {
            std::printf(" %s=%g", k.c_str(), v);
        }
        std::printf("\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Newton's method with divergence-based line search"};
    app.require_subcommand(1);
    CommonOptions run_o, scan_o, eigen_o;
    auto* run = app.add_subcommand("run", "run trajectories from a start set");
    add_common(run, run_o);
    auto* scan = app.add_subcommand("scan", "sample fields on a grid and extract zero curves");
    add_common(scan, scan_o);
    auto* eigen = app.add_subcommand("eigen", "seeded eigenpair experiment (Lagrange-Newton)");
    add_common(eigen, eigen_o);
    int eigen_n = 10, eigen_runs = 10;
    eigen->add_option("--n", eigen_n, "dimension");
    eigen->add_option("--runs", eigen_runs, "number of runs");
    auto* list = app.add_subcommand("presets", "list function presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(build_config(run_o));
        if (scan->parsed()) return cmd_scan(build_config(scan_o));
        if (eigen->parsed()) {
            if (!eigen_o.function) eigen_o.function = "eigen";
            if (!eigen_o.strategy && eigen_o.config_path.empty()) eigen_o.strategy = "Szzp-Mlm-Ctau";
            dn::ExperimentConfig c = build_config(eigen_o);
            if (eigen->count("--n")) c.dimension = eigen_n;
            if (eigen->count("--runs")) c.runs = eigen_runs;
            c.validate();
            return cmd_eigen(c);
        }
        if (list->parsed()) return cmd_presets();
    } catch (const dn::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

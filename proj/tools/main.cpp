#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrid/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mrid: frequency-domain identification of multirate closed-loop performance"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", w_path, z_path, report_path;
    std::vector<std::string> pfg_paths;
    std::string sensitivity_path;
    bool baseline = false, assert_tol = false;
    double median_tol = 1.0, p95_tol = 5.0;

    auto* sim = app.add_subcommand("simulate", "run the multirate loop and write w/z/u/y CSVs");
    sim->add_option("--config", config_path, "experiment config (JSON)")->required();
    sim->add_option("--out-dir", out_dir, "output directory");

    auto* ident = app.add_subcommand(
        "identify", "identify the lifted closed loop and the performance frequency gain");
    ident->add_option("--config", config_path, "experiment config (JSON)")->required();
    ident->add_option("--w", w_path, "excitation record CSV")->required();
    ident->add_option("--z", z_path, "performance record CSV")->required();
    ident->add_option("--out-dir", out_dir, "output directory");
    ident->add_flag("--baseline", baseline, "also run the single-rate baseline (no lifting)");

    auto* analytic = app.add_subcommand(
        "analytic", "evaluate the analytic gain curve and slow-rate sensitivity");
    analytic->add_option("--config", config_path, "experiment config (JSON)")->required();
    analytic->add_option("--out-dir", out_dir, "output directory");

    std::string signal_path;
    auto* cpscmd = app.add_subcommand(
        "cps", "Welch density and cumulative power spectrum, fast grid and downsampled");
    cpscmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    cpscmd->add_option("--signal", signal_path, "fast-rate record CSV")->required();
    cpscmd->add_option("--out-dir", out_dir, "output directory");

    auto* cmp = app.add_subcommand("compare",
                                   "compare gain curves against the first (reference) file");
    cmp->add_option("files", pfg_paths, "reference.csv candidate.csv [...]")
        ->required()
        ->expected(-2);
    cmp->add_option("--sensitivity", sensitivity_path, "slow-rate sensitivity CSV to overlay");
    cmp->add_option("--report", report_path, "per-bin error report CSV");
    cmp->add_flag("--assert", assert_tol, "exit 4 when tolerances are exceeded");
    cmp->add_option("--config", config_path,
                    "experiment config supplying the tolerances block");
    auto* med_opt =
        cmp->add_option("--median-tol-pct", median_tol, "median relative error tolerance [%]");
    auto* p95_opt = cmp->add_option("--p95-tol-pct", p95_tol, "95th percentile tolerance [%]");

    auto* demo = app.add_subcommand("demo-config", "write the default demo experiment config");
    demo->add_option("--out", config_path, "output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    if (sim->parsed()) return mrid::cmd_simulate(config_path, out_dir);
    if (ident->parsed()) return mrid::cmd_identify(config_path, w_path, z_path, out_dir, baseline);
    if (analytic->parsed()) return mrid::cmd_analytic(config_path, out_dir);
    if (cpscmd->parsed()) return mrid::cmd_cps(config_path, signal_path, out_dir);
    if (cmp->parsed()) {
        std::optional<std::string> sens;
        if (!sensitivity_path.empty()) sens = sensitivity_path;
        if (!config_path.empty()) {
            try {
                const mrid::ExperimentConfig cfg = mrid::load_experiment_config(config_path);
                if (med_opt->count() == 0) median_tol = cfg.median_tol_pct;
                if (p95_opt->count() == 0) p95_tol = cfg.p95_tol_pct;
            } catch (const std::exception& e) {
                std::fprintf(stderr, "config error: %s\n", e.what());
                return 2;
            }
        }
        return mrid::cmd_compare(pfg_paths, sens, report_path, assert_tol, median_tol, p95_tol);
    }
    if (demo->parsed()) {
        try {
            mrid::write_demo_config(config_path);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 2;
        }
        return 0;
    }
    return 2;
}

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrid/local_model.hpp"
#include "mrid/lti.hpp"
#include "mrid/signals.hpp"

namespace mrid {

struct ExcitationSpec {
    std::string type = "multisine"; // multisine | single_sine
    int band_min = 1;
    int band_max = 0; // 0 -> N/2 - 1
    double amplitude = 1.0;
    std::uint64_t seed = 1;
    double freq_hz = 0.0; // single_sine only
};

struct AnalysisSpec {
    int segment_len = 0; // 0 -> N/8
    double overlap = 0.5;
    std::string window = "hann";
};

struct ExperimentConfig {
    RateConfig rate;
    std::string plant_kind = "two_mass"; // or "files"
    std::string plant_g11, plant_g12, plant_g21, plant_g22;
    std::string controller_kind = "demo"; // or "file"
    std::string controller_file;
    ExcitationSpec excitation;
    int settle_periods = 0;
    double divergence_threshold = 1e9;
    LocalModelConfig local_model;
    int threads = 0;
    AnalysisSpec analysis;
    double median_tol_pct = 1.0;
    double p95_tol_pct = 5.0;

    MultirateLoop build_loop() const;
    Signal build_excitation() const;
};

/// Parses the JSON experiment config; throws ConfigError with line/column
/// diagnostics on malformed input.
ExperimentConfig load_experiment_config(const std::string& path);

void write_demo_config(const std::string& path);

// Subcommand drivers; return process exit codes
// (0 ok, 2 config error, 3 numerical failure, 4 tolerance failure).
int cmd_simulate(const std::string& config_path, const std::string& out_dir);
int cmd_identify(const std::string& config_path, const std::string& w_path,
                 const std::string& z_path, const std::string& out_dir, bool baseline);
int cmd_compare(const std::vector<std::string>& pfg_paths,
                const std::optional<std::string>& sensitivity_path,
                const std::string& report_path, bool assert_tolerances,
                double median_tol_pct, double p95_tol_pct);
/// Evaluates the analytic gain curve and slow-rate sensitivity of the
/// configured loop (reference curves for cmd_compare).
int cmd_analytic(const std::string& config_path, const std::string& out_dir);
/// Welch density and cumulative power spectrum of a fast-rate record and of
/// its downsampled counterpart.
int cmd_cps(const std::string& config_path, const std::string& signal_path,
            const std::string& out_dir);

} // namespace mrid

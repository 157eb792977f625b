#include "mrid/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "mrid/analysis.hpp"
#include "mrid/csv.hpp"
#include "mrid/errors.hpp"
#include "mrid/pfg.hpp"

namespace mrid {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_config_text(const std::string& text, const std::string& path) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // translate the byte offset into line:column
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": " + e.what());
    }
}

DenominatorStructure parse_denominator(const std::string& word) {
    if (word == "full" || word == "full_matrix") return DenominatorStructure::full_matrix;
    if (word == "scalar") return DenominatorStructure::scalar;
    if (word == "identity") return DenominatorStructure::identity;
    throw ConfigError("unknown denominator structure '" + word + "'");
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InstabilityError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const EvalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

struct ErrorStats {
    double median_pct = 0.0;
    double p95_pct = 0.0;
    double max_pct = 0.0;
    int compared = 0;
    int skipped = 0;
};

double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

ErrorStats curve_errors(const PfgCurve& ref, const PfgCurve& est,
                        std::vector<double>* per_bin = nullptr) {
    ErrorStats stats;
    std::vector<double> errs;
    errs.reserve(ref.values.size());
    if (per_bin) per_bin->assign(ref.values.size(), std::nan(""));
    for (std::size_t k = 0; k < ref.values.size(); ++k) {
        const bool usable = !ref.flag[k] && !est.flag[k] && std::isfinite(ref.values[k]) &&
                            std::isfinite(est.values[k]) && ref.values[k] > 0.0;
        if (!usable) {
            ++stats.skipped;
            continue;
        }
        const double e = std::abs(est.values[k] - ref.values[k]) / ref.values[k];
        errs.push_back(e);
        if (per_bin) (*per_bin)[k] = e;
    }
    stats.compared = static_cast<int>(errs.size());
    if (!errs.empty()) {
        stats.median_pct = 100.0 * percentile(errs, 0.5);
        stats.p95_pct = 100.0 * percentile(errs, 0.95);
        stats.max_pct = 100.0 * (*std::max_element(errs.begin(), errs.end()));
    }
    return stats;
}

} // namespace

MultirateLoop ExperimentConfig::build_loop() const {
    MultirateLoop loop;
    loop.rate = rate;
    if (plant_kind == "files") {
        loop.plant.g11 = read_state_space(plant_g11);
        loop.plant.g12 = read_state_space(plant_g12);
        loop.plant.g21 = read_state_space(plant_g21);
        loop.plant.g22 = read_state_space(plant_g22);
    } else {
        loop.plant = make_demo_plant(plant_kind, rate.tsh);
    }
    if (controller_kind == "file") {
        loop.controller = read_state_space(controller_file);
    } else if (controller_kind == "demo") {
        loop.controller = make_demo_controller(rate.tsl());
    } else if (controller_kind == "none") {
        loop.controller = StateSpaceModel::gain(0.0, Rate::slow, rate.tsl());
    } else {
        throw ConfigError("unknown controller kind '" + controller_kind + "'");
    }
    loop.validate();
    return loop;
}

Signal ExperimentConfig::build_excitation() const {
    if (excitation.type == "multisine") {
        const int kmax = excitation.band_max > 0 ? excitation.band_max : rate.n_fast / 2 - 1;
        return multisine(rate, excitation.band_min, kmax, excitation.amplitude, excitation.seed);
    }
    if (excitation.type == "single_sine")
        return single_sine(cd(excitation.amplitude, 0.0), 2.0 * kPi * excitation.freq_hz, rate);
    throw ConfigError("unknown excitation type '" + excitation.type + "'");
}

ExperimentConfig load_experiment_config(const std::string& path) {
    const json root = parse_config_text(read_file(path), path);
    ExperimentConfig cfg;
    try {
        const auto& rates = root.at("rates");
        const double fs = rates.at("fs_fast_hz").get<double>();
        if (!(fs > 0.0)) throw ConfigError("rates.fs_fast_hz must be > 0");
        cfg.rate = RateConfig::make(1.0 / fs, rates.at("downsample_factor").get<int>(),
                                    rates.at("n_fast").get<int>());

        if (root.contains("plant")) {
            const auto& plant = root.at("plant");
            cfg.plant_kind = plant.value("kind", std::string("two_mass"));
            if (plant.contains("files")) {
                cfg.plant_kind = "files";
                const auto& files = plant.at("files");
                cfg.plant_g11 = files.at("g11").get<std::string>();
                cfg.plant_g12 = files.at("g12").get<std::string>();
                cfg.plant_g21 = files.at("g21").get<std::string>();
                cfg.plant_g22 = files.at("g22").get<std::string>();
            }
        }
        if (root.contains("controller")) {
            const auto& ctl = root.at("controller");
            cfg.controller_kind = ctl.value("kind", std::string("demo"));
            if (ctl.contains("file")) {
                cfg.controller_kind = "file";
                cfg.controller_file = ctl.at("file").get<std::string>();
            }
        }
        if (root.contains("excitation")) {
            const auto& exc = root.at("excitation");
            cfg.excitation.type = exc.value("type", std::string("multisine"));
            if (exc.contains("band")) {
                cfg.excitation.band_min = exc.at("band").at(0).get<int>();
                cfg.excitation.band_max = exc.at("band").at(1).get<int>();
            }
            cfg.excitation.amplitude = exc.value("amplitude", 1.0);
            cfg.excitation.seed = exc.value("seed", std::uint64_t{1});
            cfg.excitation.freq_hz = exc.value("freq_hz", 0.0);
        }
        if (root.contains("simulation")) {
            const auto& sim = root.at("simulation");
            cfg.settle_periods = sim.value("settle_periods", 0);
            cfg.divergence_threshold = sim.value("divergence_threshold", 1e9);
        }
        if (root.contains("local_model")) {
            const auto& lm = root.at("local_model");
            cfg.local_model.wsize = lm.value("wsize", 60);
            cfg.local_model.degree_n = lm.value("degree_n", 3);
            cfg.local_model.degree_l = lm.value("degree_l", 3);
            cfg.local_model.degree_d = lm.value("degree_d", 3);
            cfg.local_model.denominator =
                parse_denominator(lm.value("denominator", std::string("full")));
            cfg.threads = lm.value("threads", 0);
        }
        if (root.contains("analysis")) {
            const auto& an = root.at("analysis");
            cfg.analysis.segment_len = an.value("segment_len", 0);
            cfg.analysis.overlap = an.value("overlap", 0.5);
            cfg.analysis.window = an.value("window", std::string("hann"));
        }
        if (root.contains("tolerances")) {
            const auto& tol = root.at("tolerances");
            cfg.median_tol_pct = tol.value("median_pct", 1.0);
            cfg.p95_tol_pct = tol.value("p95_pct", 5.0);
        }
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return cfg;
}

void write_demo_config(const std::string& path) {
    json root;
    root["rates"] = {{"fs_fast_hz", 240.0}, {"downsample_factor", 3}, {"n_fast", 10800}};
    root["plant"] = {{"kind", "two_mass"}};
    root["controller"] = {{"kind", "demo"}};
    root["excitation"] = {
        {"type", "multisine"}, {"band", {1, 5399}}, {"amplitude", 1.0}, {"seed", 1}};
    root["simulation"] = {{"settle_periods", 0}, {"divergence_threshold", 1e9}};
    root["local_model"] = {{"wsize", 60},          {"degree_n", 3}, {"degree_l", 3},
                           {"degree_d", 3},        {"denominator", "full"},
                           {"threads", 0}};
    root["tolerances"] = {{"median_pct", 1.0}, {"p95_pct", 5.0}};
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << root.dump(2) << "\n";
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    return run_guarded([&] {
        const ExperimentConfig cfg = load_experiment_config(config_path);
        const MultirateLoop loop = cfg.build_loop();
        const Signal w = cfg.build_excitation();
        const MultirateRecord rec =
            simulate_multirate_loop(loop, w, cfg.settle_periods, cfg.divergence_threshold);
        fs::create_directories(out_dir);
        write_signal_csv(out_dir + "/w.csv", w);
        write_signal_csv(out_dir + "/z.csv", rec.z);
        write_signal_csv(out_dir + "/u.csv", rec.u);
        write_signal_csv(out_dir + "/y.csv", rec.y);

        json manifest;
        manifest["rates"] = {{"fs_fast_hz", cfg.rate.fs_fast_hz()},
                             {"fs_slow_hz", cfg.rate.fs_slow_hz()},
                             {"downsample_factor", cfg.rate.fac},
                             {"n_fast", cfg.rate.n_fast},
                             {"m_slow", cfg.rate.m_slow()}};
        manifest["plant"] = cfg.plant_kind;
        manifest["controller"] = cfg.controller_kind;
        manifest["excitation"] = {{"type", cfg.excitation.type},
                                  {"seed", cfg.excitation.seed},
                                  {"amplitude", cfg.excitation.amplitude}};
        manifest["settle_periods"] = cfg.settle_periods;
        std::ofstream mf(out_dir + "/manifest.json");
        mf << manifest.dump(2) << "\n";
        std::cout << "wrote " << out_dir << "/{w,z,u,y}.csv (" << w.size() << " samples)\n";
    });
}

int cmd_identify(const std::string& config_path, const std::string& w_path,
                 const std::string& z_path, const std::string& out_dir, bool baseline) {
    return run_guarded([&] {
        const ExperimentConfig cfg = load_experiment_config(config_path);
        const Signal w = read_signal_csv(w_path, Rate::fast, cfg.rate.tsh);
        const Signal z = read_signal_csv(z_path, Rate::fast, cfg.rate.tsh);
        if (w.size() != z.size())
            throw std::invalid_argument("record length mismatch: " + std::to_string(w.size()) +
                                        " vs " + std::to_string(z.size()));
        if (w.size() != cfg.rate.n_fast)
            throw std::invalid_argument("record length does not match configured n_fast");

        const LiftedFrf frf =
            identify_lifted_frf(w, z, cfg.rate.fac, cfg.local_model, cfg.threads);
        fs::create_directories(out_dir);
        write_lifted_frf_csv(out_dir + "/lifted_frf.csv", out_dir + "/lifted_transient.csv", frf);
        write_diagnostics_csv(out_dir + "/diagnostics.csv", frf);
        write_pfg_csv(out_dir + "/pfg.csv", pfg_from_lifted(frf));
        std::cout << "identified " << frf.n << " bins, " << frf.flagged_count()
                  << " flagged\n";
        if (baseline) {
            const LiftedFrf direct = identify_direct_baseline(w, z, cfg.local_model, cfg.threads);
            write_pfg_csv(out_dir + "/baseline_pfg.csv", pfg_from_lifted(direct));
            std::cout << "baseline (no lifting): " << direct.flagged_count() << " flagged\n";
        }
    });
}

int cmd_analytic(const std::string& config_path, const std::string& out_dir) {
    return run_guarded([&] {
        const ExperimentConfig cfg = load_experiment_config(config_path);
        const MultirateLoop loop = cfg.build_loop();
        fs::create_directories(out_dir);
        write_pfg_csv(out_dir + "/analytic_pfg.csv", pfg_analytic(loop));
        write_pfg_csv(out_dir + "/sensitivity.csv", slow_rate_sensitivity(loop));
        std::cout << "wrote " << out_dir << "/analytic_pfg.csv and sensitivity.csv\n";
    });
}

int cmd_cps(const std::string& config_path, const std::string& signal_path,
            const std::string& out_dir) {
    return run_guarded([&] {
        const ExperimentConfig cfg = load_experiment_config(config_path);
        const WindowKind window = cfg.analysis.window == "rect" ? WindowKind::rect
                                                                : WindowKind::hann;
        const Signal fast = read_signal_csv(signal_path, Rate::fast, cfg.rate.tsh);
        const Signal slow = downsample(fast, cfg.rate.fac);
        const int seg_fast = cfg.analysis.segment_len > 0 ? cfg.analysis.segment_len
                                                          : fast.size() / 8;
        const int seg_slow = std::max(2, seg_fast / cfg.rate.fac);
        const PsdEstimate fast_psd = welch_psd(fast, seg_fast, cfg.analysis.overlap, window);
        const PsdEstimate slow_psd = welch_psd(slow, seg_slow, cfg.analysis.overlap, window);
        fs::create_directories(out_dir);
        write_psd_csv(out_dir + "/cps_fast.csv", fast_psd,
                      cps(fast_psd.psd, fast_psd.freq_resolution_hz));
        write_psd_csv(out_dir + "/cps_slow.csv", slow_psd,
                      cps(slow_psd.psd, slow_psd.freq_resolution_hz));
        std::cout << "wrote " << out_dir << "/cps_fast.csv and cps_slow.csv\n";
    });
}

int cmd_compare(const std::vector<std::string>& pfg_paths,
                const std::optional<std::string>& sensitivity_path,
                const std::string& report_path, bool assert_tolerances,
                double median_tol_pct, double p95_tol_pct) {
    bool tolerance_failed = false;
    const int rc = run_guarded([&] {
        if (pfg_paths.size() < 2)
            throw std::invalid_argument("compare needs a reference and at least one candidate");
        const PfgCurve ref = read_pfg_csv(pfg_paths[0]);
        std::vector<PfgCurve> candidates;
        std::vector<std::vector<double>> per_bin(pfg_paths.size() - 1);
        std::vector<ErrorStats> stats;
        for (std::size_t i = 1; i < pfg_paths.size(); ++i) {
            PfgCurve cand = read_pfg_csv(pfg_paths[i]);
            if (cand.size() != ref.size())
                throw std::invalid_argument("incompatible grids: " + pfg_paths[i] + " has " +
                                            std::to_string(cand.size()) + " bins, reference has " +
                                            std::to_string(ref.size()));
            stats.push_back(curve_errors(ref, cand, &per_bin[i - 1]));
            candidates.push_back(std::move(cand));
        }

        std::optional<PfgCurve> sens;
        if (sensitivity_path) {
            sens = read_pfg_csv(*sensitivity_path);
            if (ref.size() % sens->size() != 0)
                throw std::invalid_argument(
                    "incompatible grids: sensitivity length must divide the fast grid");
        }

        if (!report_path.empty()) {
            std::ofstream out(report_path);
            if (!out) throw ConfigError("cannot open '" + report_path + "' for writing");
            out << "k,freq_hz,ref";
            for (std::size_t i = 1; i < pfg_paths.size(); ++i)
                out << ",value_" << i << ",rel_err_" << i << ",err_db_" << i;
            if (sens) out << ",sensitivity";
            out << "\n";
            char buf[40];
            auto put = [&](double v) {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                out << "," << buf;
            };
            for (int k = 0; k < ref.size(); ++k) {
                out << k;
                put(ref.freq_hz(k));
                put(ref.values[k]);
                for (std::size_t i = 0; i < candidates.size(); ++i) {
                    put(candidates[i].values[k]);
                    put(per_bin[i][k]);
                    put(20.0 * std::log10(candidates[i].values[k] / ref.values[k]));
                }
                if (sens) put(sens->values[k % sens->size()]);
                out << "\n";
            }
        }

        std::printf("%-32s %10s %10s %10s %9s\n", "curve", "median[%]", "p95[%]", "max[%]",
                    "bins");
        for (std::size_t i = 0; i < stats.size(); ++i) {
            std::printf("%-32s %10.4f %10.4f %10.4f %9d\n", pfg_paths[i + 1].c_str(),
                        stats[i].median_pct, stats[i].p95_pct, stats[i].max_pct,
                        stats[i].compared);
            if (assert_tolerances &&
                (stats[i].median_pct > median_tol_pct || stats[i].p95_pct > p95_tol_pct))
                tolerance_failed = true;
        }
        if (sens)
            std::printf("sensitivity overlay: %d slow bins aligned periodically\n",
                        sens->size());
    });
    if (rc != 0) return rc;
    if (tolerance_failed) {
        std::cerr << "tolerance check failed (median > " << median_tol_pct << "% or p95 > "
                  << p95_tol_pct << "%)\n";
        return 4;
    }
    return 0;
}

} // namespace mrid

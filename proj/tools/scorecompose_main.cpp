// scorecompose CLI: drives the shared-library C API. Subcommands: simulate,
// sweep, schedule, selftest. All numeric output uses %.17g so files
// round-trip doubles exactly.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scorecompose/scorecompose.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int config_error(const std::string& message) {
    std::cerr << "config error: " << message << "\n";
    return kExitConfigError;
}

struct ConfigHandle {
    sc_config* ptr = nullptr;
    ~ConfigHandle() { sc_config_free(ptr); }
};

struct ResultHandle {
    sc_result* ptr = nullptr;
    ~ResultHandle() { sc_result_free(ptr); }
};

struct CommonOptions {
    std::string config_path;
    bool appendix_defaults = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::int64_t samples = 0;
    std::int64_t steps = 0;
    std::string strategies;
    std::string output_dir;
    std::vector<std::string> formats;
    bool record_trajectories = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "Path to a JSON run configuration");
        cmd->add_flag("--appendix-defaults", appendix_defaults,
                      "Use the built-in reference simulation configuration");
        cmd->add_option("--seed", seed, "Master seed")->each([this](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--samples", samples, "Number of samples per strategy")
            ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 31));
        cmd->add_option("--steps", steps, "Number of sampler steps")
            ->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 24));
        cmd->add_option("--strategies", strategies,
                        "Comma-separated strategy names to keep (subset of the config)");
        cmd->add_option("-o,--output-dir", output_dir, "Output directory");
        cmd->add_option("--formats", formats,
                        "Output formats (summary-json, samples-csv, histogram-csv, "
                        "trajectories-csv)")
            ->delimiter(',');
        cmd->add_flag("--record-trajectories", record_trajectories,
                      "Record per-step trajectories");
    }

    // Returns 0 and fills `out` on success, else an exit code.
    int load(ConfigHandle& out) const {
        if (config_path.empty() && !appendix_defaults) {
            return config_error("provide --config <path> or --appendix-defaults");
        }
        sc_status rc;
        if (!config_path.empty()) {
            std::ifstream in(config_path, std::ios::binary);
            if (!in) return config_error("cannot read config file '" + config_path + "'");
            std::ostringstream text;
            text << in.rdbuf();
            rc = sc_config_parse_json(text.str().c_str(), &out.ptr);
        } else {
            rc = sc_config_appendix_defaults(&out.ptr);
        }
        if (rc != SC_OK) return config_error(sc_last_error());

        if (seed_set && sc_config_set_seed(out.ptr, seed) != SC_OK) {
            return config_error(sc_last_error());
        }
        if (samples > 0 &&
            sc_config_set_sample_count(out.ptr, static_cast<size_t>(samples)) != SC_OK) {
            return config_error(sc_last_error());
        }
        if (steps > 0 && sc_config_set_step_count(out.ptr, static_cast<int>(steps)) != SC_OK) {
            return config_error(sc_last_error());
        }
        if (!strategies.empty() &&
            sc_config_select_strategies(out.ptr, strategies.c_str()) != SC_OK) {
            return config_error(sc_last_error());
        }
        if (!output_dir.empty() && sc_config_set_output_dir(out.ptr, output_dir.c_str()) != SC_OK) {
            return config_error(sc_last_error());
        }
        if (record_trajectories && sc_config_set_record_trajectories(out.ptr, 1) != SC_OK) {
            return config_error(sc_last_error());
        }
        for (const auto& f : formats) {
            if (f != "summary-json" && f != "samples-csv" && f != "histogram-csv" &&
                f != "trajectories-csv") {
                return config_error("unknown output format '" + f + "'");
            }
        }
        return 0;
    }

    bool wants(const sc_config* cfg, const char* format) const {
        if (!formats.empty()) {
            for (const auto& f : formats) {
                if (f == format) return true;
            }
            return false;
        }
        return sc_config_has_format(cfg, format) != 0;
    }
};

// no_guidance, tc_cfg, tc_cfg_2, ... for repeated kinds in one run
std::string unique_row_name(std::map<std::string, int>& counts, const std::string& strategy) {
    const int n = ++counts[strategy];
    return n == 1 ? strategy : strategy + "_" + std::to_string(n);
}

bool write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write '" << path.string() << "'\n";
        return false;
    }
    out << contents;
    return out.good();
}

std::string summary_json(const sc_result* res, size_t row, std::uint64_t seed) {
    double mean, sd, klb, klg, wall;
    sc_result_summary(res, row, &mean, &sd, &klb, &klg, &wall);
    const std::string strategy = sc_result_strategy(res, row);
    const std::string param_name = sc_result_parameter_name(res, row);

    std::ostringstream out;
    out << "{\n";
    out << "  \"strategy\": \"" << strategy << "\",\n";
    out << "  \"parameters\": {";
    if (!param_name.empty()) {
        double value = 0.0;
        sc_result_parameter_value(res, row, &value);
        out << "\"" << param_name << "\": " << fmt(value);
    }
    out << "},\n";
    out << "  \"mean\": " << fmt(mean) << ",\n";
    out << "  \"std\": " << fmt(sd) << ",\n";
    out << "  \"kl_binned\": " << fmt(klb) << ",\n";
    out << "  \"kl_gauss_fit\": " << fmt(klg) << ",\n";
    out << "  \"seed\": " << seed << ",\n";
    out << "  \"wall_time_ms\": " << fmt(wall) << "\n";
    out << "}\n";
    return out.str();
}

std::string samples_csv(const sc_result* res, size_t row) {
    const double* data = nullptr;
    size_t len = 0;
    sc_result_samples(res, row, &data, &len);
    std::ostringstream out;
    out << "x\n";
    for (size_t i = 0; i < len; ++i) out << fmt(data[i]) << "\n";
    return out.str();
}

std::string histogram_csv(const sc_result* res, size_t row) {
    const double *edges = nullptr, *emp = nullptr, *ref = nullptr;
    size_t bins = 0;
    sc_result_histogram(res, row, &edges, &emp, &ref, &bins);
    std::ostringstream out;
    out << "bin_lo,bin_hi,empirical_mass,reference_mass\n";
    for (size_t i = 0; i < bins; ++i) {
        out << fmt(edges[i]) << "," << fmt(edges[i + 1]) << "," << fmt(emp[i]) << ","
            << fmt(ref[i]) << "\n";
    }
    return out.str();
}

std::string trajectories_csv(const sc_result* res, size_t row) {
    const double* samples = nullptr;
    size_t n = 0;
    sc_result_samples(res, row, &samples, &n);
    std::ostringstream out;
    out << "sample,step,x\n";
    for (size_t i = 0; i < n; ++i) {
        const double* traj = nullptr;
        size_t len = 0;
        if (sc_result_trajectory(res, row, i, &traj, &len) != SC_OK) break;
        for (size_t t = 0; t < len; ++t) {
            out << i << "," << t << "," << fmt(traj[t]) << "\n";
        }
    }
    return out.str();
}

int emit_simulation(const CommonOptions& opts, const sc_config* cfg, const sc_result* res) {
    const std::filesystem::path dir = sc_config_output_dir(cfg);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        std::cerr << "cannot create output dir '" << dir.string() << "': " << ec.message() << "\n";
        return kExitFailure;
    }
    const std::uint64_t seed = sc_config_seed(cfg);
    std::map<std::string, int> counts;
    for (size_t row = 0; row < sc_result_count(res); ++row) {
        const std::string name = unique_row_name(counts, sc_result_strategy(res, row));
        if (opts.wants(cfg, "summary-json") &&
            !write_file(dir / (name + "_summary.json"), summary_json(res, row, seed))) {
            return kExitFailure;
        }
        if (opts.wants(cfg, "samples-csv") &&
            !write_file(dir / (name + "_samples.csv"), samples_csv(res, row))) {
            return kExitFailure;
        }
        if (opts.wants(cfg, "histogram-csv") &&
            !write_file(dir / (name + "_histogram.csv"), histogram_csv(res, row))) {
            return kExitFailure;
        }
        if (opts.wants(cfg, "trajectories-csv") &&
            !write_file(dir / (name + "_trajectories.csv"), trajectories_csv(res, row))) {
            return kExitFailure;
        }
        double mean, sd, klb, klg, wall;
        sc_result_summary(res, row, &mean, &sd, &klb, &klg, &wall);
        std::cout << name << ": mean=" << fmt(mean) << " std=" << fmt(sd)
                  << " kl_binned=" << fmt(klb) << " kl_gauss_fit=" << fmt(klg) << "\n";
    }
    return 0;
}

int cmd_simulate(const CommonOptions& opts) {
    ConfigHandle cfg;
    if (int rc = opts.load(cfg); rc != 0) return rc;
    ResultHandle res;
    const sc_status rc = sc_config_run(cfg.ptr, &res.ptr);
    if (rc == SC_ERROR_NUMERIC) {
        std::cerr << "numerical abort: " << sc_last_error() << "\n";
        return kExitNumericError;
    }
    if (rc != SC_OK) return config_error(sc_last_error());
    return emit_simulation(opts, cfg.ptr, res.ptr);
}

int cmd_sweep(const CommonOptions& opts, const std::vector<double>& scales,
              const std::vector<double>& alphas) {
    if (scales.empty() && alphas.empty()) {
        return config_error("sweep needs at least one of --scales / --alphas");
    }
    ConfigHandle cfg;
    if (int rc = opts.load(cfg); rc != 0) return rc;
    ResultHandle res;
    const sc_status rc =
        sc_config_sweep(cfg.ptr, scales.data(), scales.size(), alphas.data(), alphas.size(),
                        &res.ptr);
    if (rc == SC_ERROR_NUMERIC) {
        std::cerr << "numerical abort: " << sc_last_error() << "\n";
        return kExitNumericError;
    }
    if (rc != SC_OK) return config_error(sc_last_error());

    const std::filesystem::path dir = sc_config_output_dir(cfg.ptr);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        std::cerr << "cannot create output dir '" << dir.string() << "': " << ec.message() << "\n";
        return kExitFailure;
    }
    std::ostringstream out;
    out << "strategy,parameter_name,parameter_value,mean,std,kl_binned,kl_gauss_fit,seed\n";
    const std::uint64_t seed = sc_config_seed(cfg.ptr);
    for (size_t row = 0; row < sc_result_count(res.ptr); ++row) {
        double mean, sd, klb, klg, value = 0.0;
        sc_result_summary(res.ptr, row, &mean, &sd, &klb, &klg, nullptr);
        sc_result_parameter_value(res.ptr, row, &value);
        out << sc_result_strategy(res.ptr, row) << "," << sc_result_parameter_name(res.ptr, row)
            << "," << fmt(value) << "," << fmt(mean) << "," << fmt(sd) << "," << fmt(klb) << ","
            << fmt(klg) << "," << seed << "\n";
    }
    if (!write_file(dir / "sweep.csv", out.str())) return kExitFailure;
    std::cout << out.str();
    return 0;
}

int cmd_schedule(const std::string& kind, int steps, double sigma_init, double sigma_final,
                 double shift, double logsnr_min, double logsnr_max) {
    if (kind == "ve-log-linear") {
        std::vector<double> sigmas(static_cast<size_t>(steps) + 1);
        if (sc_schedule_ve_log_linear(steps, sigma_init, sigma_final, sigmas.data()) != SC_OK) {
            return config_error(sc_last_error());
        }
        std::cout << "step,sigma\n";
        for (size_t i = 0; i < sigmas.size(); ++i) std::cout << i << "," << fmt(sigmas[i]) << "\n";
        return 0;
    }
    if (kind == "vp-shifted-cosine") {
        if (steps < 1) return config_error("vp-shifted-cosine needs --steps >= 1");
        std::cout << "step,sigma,alpha,logsnr\n";
        for (int i = 0; i <= steps; ++i) {
            double alpha = 0.0, sigma = 0.0;
            const double t = static_cast<double>(i) / steps;
            if (sc_schedule_vp_shifted_cosine(t, shift, &alpha, &sigma) != SC_OK) {
                return config_error(sc_last_error());
            }
            std::cout << i << "," << fmt(sigma) << "," << fmt(alpha) << ","
                      << fmt(2.0 * (std::log(alpha) - std::log(sigma))) << "\n";
        }
        return 0;
    }
    if (kind == "logsnr-linear") {
        std::vector<double> alphas(static_cast<size_t>(steps) + 1);
        std::vector<double> sigmas(static_cast<size_t>(steps) + 1);
        if (sc_schedule_logsnr_linear(steps, logsnr_min, logsnr_max, alphas.data(),
                                      sigmas.data()) != SC_OK) {
            return config_error(sc_last_error());
        }
        std::cout << "step,sigma,alpha,logsnr\n";
        for (size_t i = 0; i < sigmas.size(); ++i) {
            std::cout << i << "," << fmt(sigmas[i]) << "," << fmt(alphas[i]) << ","
                      << fmt(2.0 * (std::log(alphas[i]) - std::log(sigmas[i]))) << "\n";
        }
        return 0;
    }
    return config_error("unknown schedule kind '" + kind +
                        "' (expected ve-log-linear, vp-shifted-cosine or logsnr-linear)");
}

int cmd_selftest() {
    char* report = nullptr;
    const int rc = sc_selftest(&report);
    if (report != nullptr) {
        std::cout << report;
        sc_string_free(report);
    }
    return rc == 0 ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analytic diffusion guidance-composition simulator"};
    app.require_subcommand(1);

    CommonOptions sim_opts;
    CLI::App* simulate = app.add_subcommand("simulate", "Run the guidance-comparison simulation");
    sim_opts.attach(simulate);

    CommonOptions sweep_opts;
    std::vector<double> scales;
    std::vector<double> alphas;
    CLI::App* sweep = app.add_subcommand("sweep", "Sensitivity sweep over guidance parameters");
    sweep_opts.attach(sweep);
    sweep->add_option("--scales", scales, "tc_cfg guidance scales")->delimiter(',');
    sweep->add_option("--alphas", alphas, "score_average weights")->delimiter(',');

    std::string schedule_kind;
    int schedule_steps = 0;
    double sigma_init = 80.0, sigma_final = 0.005, shift = 0.5;
    double logsnr_min = -8.0, logsnr_max = 10.0;
    CLI::App* schedule = app.add_subcommand("schedule", "Print a noise schedule as CSV");
    schedule->add_option("kind", schedule_kind, "ve-log-linear | vp-shifted-cosine | logsnr-linear")
        ->required();
    schedule->add_option("--steps", schedule_steps, "Number of steps T (emits T+1 rows)")
        ->required();
    schedule->add_option("--sigma-init", sigma_init, "VE initial noise level");
    schedule->add_option("--sigma-final", sigma_final, "VE final noise level");
    schedule->add_option("--shift", shift, "Shifted-cosine scale s");
    schedule->add_option("--min", logsnr_min, "logSNR lower bound");
    schedule->add_option("--max", logsnr_max, "logSNR upper bound");

    CLI::App* selftest = app.add_subcommand("selftest", "Run the fast invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfigError;
    }

    if (simulate->parsed()) return cmd_simulate(sim_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, scales, alphas);
    if (schedule->parsed()) {
        return cmd_schedule(schedule_kind, schedule_steps, sigma_init, sigma_final, shift,
                            logsnr_min, logsnr_max);
    }
    if (selftest->parsed()) return cmd_selftest();
    return kExitConfigError;
}

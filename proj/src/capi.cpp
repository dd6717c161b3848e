#include "scorecompose/scorecompose.h"

#include <cstring>
#include <limits>
#include <sstream>
#include <string>

#include "scorecompose/config.hpp"
#include "scorecompose/selftest.hpp"

using namespace scorecompose;

struct sc_gmm {
    Gmm1D model;
};

struct sc_config {
    RunConfig config;
};

struct sc_result {
    SimulationResult rows;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) {
    g_last_error = message;
}

sc_status fail(sc_status code, const std::string& message) {
    set_error(message);
    return code;
}

/// Runs `body`, translating C++ exceptions into status codes.
template <typename Fn>
sc_status guarded(Fn&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        return fail(SC_ERROR_PARSE, e.what());
    } catch (const std::domain_error& e) {
        return fail(SC_ERROR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(SC_ERROR_INVALID_ARGUMENT, e.what());
    }
}

sc_status require_ptr(const void* p, const char* name) {
    if (p == nullptr) {
        return fail(SC_ERROR_INVALID_ARGUMENT, std::string(name) + " must not be NULL");
    }
    return SC_OK;
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

const StrategyResult* row_at(const sc_result* result, size_t row) {
    if (result == nullptr || row >= result->rows.size()) return nullptr;
    return &result->rows[row];
}

}  // namespace

extern "C" {

const char* sc_version(void) {
    return "1.0.0";
}

const char* sc_last_error(void) {
    return g_last_error.c_str();
}

void sc_string_free(char* str) {
    delete[] str;
}

/* ---------------- Gaussian mixtures ---------------- */

sc_status sc_gmm_create(const double* means, const double* stds, const double* weights,
                        size_t n_components, sc_gmm** out) {
    if (auto rc = require_ptr(means, "means"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(stds, "stds"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(weights, "weights"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(out, "out"); rc != SC_OK) return rc;
    return guarded([&] {
        std::vector<GaussianComponent> comps;
        comps.reserve(n_components);
        for (size_t i = 0; i < n_components; ++i) {
            comps.push_back(GaussianComponent{means[i], stds[i], weights[i]});
        }
        *out = new sc_gmm{Gmm1D(std::move(comps))};
        return SC_OK;
    });
}

void sc_gmm_free(sc_gmm* gmm) {
    delete gmm;
}

size_t sc_gmm_component_count(const sc_gmm* gmm) {
    return gmm == nullptr ? 0 : gmm->model.size();
}

sc_status sc_gmm_log_density(const sc_gmm* gmm, double x, double* out) {
    if (auto rc = require_ptr(gmm, "gmm"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(out, "out"); rc != SC_OK) return rc;
    return guarded([&] {
        *out = log_density(gmm->model, x);
        return SC_OK;
    });
}

sc_status sc_gmm_score(const sc_gmm* gmm, double x, double* out) {
    if (auto rc = require_ptr(gmm, "gmm"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(out, "out"); rc != SC_OK) return rc;
    return guarded([&] {
        *out = score(gmm->model, x);
        return SC_OK;
    });
}

sc_status sc_gmm_diffuse_ve(const sc_gmm* gmm, double sigma, sc_gmm** out) {
    if (auto rc = require_ptr(gmm, "gmm"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(out, "out"); rc != SC_OK) return rc;
    return guarded([&] {
        *out = new sc_gmm{diffuse_ve(gmm->model, sigma)};
        return SC_OK;
    });
}

sc_status sc_gmm_component_posterior(const sc_gmm* gmm, double x, double sigma,
                                     double* probs_out) {
    if (auto rc = require_ptr(gmm, "gmm"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(probs_out, "probs_out"); rc != SC_OK) return rc;
    return guarded([&] {
        const ComponentPosterior post = component_posterior(gmm->model, x, sigma);
        std::memcpy(probs_out, post.probabilities.data(),
                    post.probabilities.size() * sizeof(double));
        return SC_OK;
    });
}

sc_status sc_gmm_conditional_score(const sc_gmm* gmm, double x, double sigma, size_t component,
                                   double* out) {
    if (auto rc = require_ptr(gmm, "gmm"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(out, "out"); rc != SC_OK) return rc;
    return guarded([&] {
        *out = conditional_score(gmm->model, x, sigma, component);
        return SC_OK;
    });
}

sc_status sc_gmm_posterior_guidance_score(const sc_gmm* gmm, double x, double sigma,
                                          size_t component, double* out) {
    if (auto rc = require_ptr(gmm, "gmm"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(out, "out"); rc != SC_OK) return rc;
    return guarded([&] {
        *out = posterior_guidance_score(gmm->model, x, sigma, component);
        return SC_OK;
    });
}

/* ---------------- noise schedules ---------------- */

sc_status sc_schedule_ve_log_linear(int steps, double sigma_init, double sigma_final,
                                    double* sigmas_out) {
    if (auto rc = require_ptr(sigmas_out, "sigmas_out"); rc != SC_OK) return rc;
    return guarded([&] {
        ScheduleSpec spec;
        spec.kind = ScheduleKind::VeLogLinear;
        spec.steps = steps;
        spec.sigma_init = sigma_init;
        spec.sigma_final = sigma_final;
        const auto sigmas = ve_log_linear(spec);
        std::memcpy(sigmas_out, sigmas.data(), sigmas.size() * sizeof(double));
        return SC_OK;
    });
}

sc_status sc_schedule_vp_shifted_cosine(double t, double shift, double* alpha_out,
                                        double* sigma_out) {
    if (auto rc = require_ptr(alpha_out, "alpha_out"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(sigma_out, "sigma_out"); rc != SC_OK) return rc;
    return guarded([&] {
        const NoiseLevel level = vp_shifted_cosine(t, shift);
        *alpha_out = level.alpha;
        *sigma_out = level.sigma;
        return SC_OK;
    });
}

sc_status sc_schedule_logsnr_linear(int steps, double logsnr_min, double logsnr_max,
                                    double* alphas_out, double* sigmas_out) {
    if (auto rc = require_ptr(alphas_out, "alphas_out"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(sigmas_out, "sigmas_out"); rc != SC_OK) return rc;
    return guarded([&] {
        ScheduleSpec spec;
        spec.kind = ScheduleKind::LogSnrLinear;
        spec.steps = steps;
        spec.logsnr_min = logsnr_min;
        spec.logsnr_max = logsnr_max;
        const auto levels = logsnr_linear_schedule(spec);
        for (std::size_t i = 0; i < levels.size(); ++i) {
            alphas_out[i] = levels[i].alpha;
            sigmas_out[i] = levels[i].sigma;
        }
        return SC_OK;
    });
}

/* ---------------- sampler ---------------- */

sc_status sc_ve_reverse_sample(sc_score_fn score_fn, void* user_data, int steps,
                               double sigma_init, double sigma_final, size_t n_samples,
                               uint64_t seed, int terminal_noise, double* samples_out) {
    if (score_fn == nullptr) return fail(SC_ERROR_INVALID_ARGUMENT, "score must not be NULL");
    if (auto rc = require_ptr(samples_out, "samples_out"); rc != SC_OK) return rc;
    if (n_samples < 1 || n_samples > static_cast<size_t>(std::numeric_limits<int>::max())) {
        return fail(SC_ERROR_INVALID_ARGUMENT, "n_samples out of range");
    }
    return guarded([&] {
        SamplerConfig config;
        config.schedule.kind = ScheduleKind::VeLogLinear;
        config.schedule.steps = steps;
        config.schedule.sigma_init = sigma_init;
        config.schedule.sigma_final = sigma_final;
        config.n_samples = static_cast<int>(n_samples);
        config.master_seed = seed;
        config.terminal_noise = terminal_noise != 0;
        const SampleBatch batch = ve_reverse_sample(
            [score_fn, user_data](double x, double sigma) { return score_fn(x, sigma, user_data); },
            config);
        std::memcpy(samples_out, batch.values.data(), batch.values.size() * sizeof(double));
        return SC_OK;
    });
}

/* ---------------- run configuration ---------------- */

sc_status sc_config_appendix_defaults(sc_config** out) {
    if (auto rc = require_ptr(out, "out"); rc != SC_OK) return rc;
    return guarded([&] {
        *out = new sc_config{appendix_run_config()};
        return SC_OK;
    });
}

sc_status sc_config_parse_json(const char* json_text, sc_config** out) {
    if (auto rc = require_ptr(json_text, "json_text"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(out, "out"); rc != SC_OK) return rc;
    return guarded([&] {
        *out = new sc_config{parse_run_config(json_text)};
        return SC_OK;
    });
}

sc_status sc_config_to_json(const sc_config* config, char** json_out) {
    if (auto rc = require_ptr(config, "config"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(json_out, "json_out"); rc != SC_OK) return rc;
    return guarded([&] {
        *json_out = dup_string(serialize_run_config(config->config));
        return SC_OK;
    });
}

void sc_config_free(sc_config* config) {
    delete config;
}

sc_status sc_config_set_seed(sc_config* config, uint64_t seed) {
    if (auto rc = require_ptr(config, "config"); rc != SC_OK) return rc;
    config->config.scenario.sampler.master_seed = seed;
    return SC_OK;
}

sc_status sc_config_set_sample_count(sc_config* config, size_t n_samples) {
    if (auto rc = require_ptr(config, "config"); rc != SC_OK) return rc;
    if (n_samples < 1 || n_samples > static_cast<size_t>(std::numeric_limits<int>::max())) {
        return fail(SC_ERROR_INVALID_ARGUMENT, "n_samples out of range");
    }
    config->config.scenario.sampler.n_samples = static_cast<int>(n_samples);
    return SC_OK;
}

sc_status sc_config_set_step_count(sc_config* config, int steps) {
    if (auto rc = require_ptr(config, "config"); rc != SC_OK) return rc;
    if (steps < 2) return fail(SC_ERROR_INVALID_ARGUMENT, "steps must be >= 2");
    config->config.scenario.sampler.schedule.steps = steps;
    return SC_OK;
}

sc_status sc_config_set_record_trajectories(sc_config* config, int enabled) {
    if (auto rc = require_ptr(config, "config"); rc != SC_OK) return rc;
    config->config.scenario.sampler.record_trajectories = enabled != 0;
    return SC_OK;
}

sc_status sc_config_select_strategies(sc_config* config, const char* names) {
    if (auto rc = require_ptr(config, "config"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(names, "names"); rc != SC_OK) return rc;
    return guarded([&] {
        std::vector<std::string> wanted;
        std::stringstream ss(names);
        std::string token;
        while (std::getline(ss, token, ',')) {
            if (!token.empty()) wanted.push_back(token);
        }
        if (wanted.empty()) throw std::invalid_argument("strategy list is empty");
        std::vector<GuidanceStrategy> kept;
        for (const auto& name : wanted) {
            bool found = false;
            for (const auto& s : config->config.scenario.strategies) {
                if (s.name() == name) {
                    kept.push_back(s);
                    found = true;
                }
            }
            if (!found) {
                throw std::invalid_argument("strategy '" + name + "' not present in config");
            }
        }
        config->config.scenario.strategies = std::move(kept);
        return SC_OK;
    });
}

sc_status sc_config_set_output_dir(sc_config* config, const char* dir) {
    if (auto rc = require_ptr(config, "config"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(dir, "dir"); rc != SC_OK) return rc;
    config->config.output_dir = dir;
    return SC_OK;
}

const char* sc_config_output_dir(const sc_config* config) {
    return config == nullptr ? "" : config->config.output_dir.c_str();
}

int sc_config_has_format(const sc_config* config, const char* name) {
    if (config == nullptr || name == nullptr) return 0;
    for (OutputFormat f : config->config.formats) {
        if (format_name(f) == name) return 1;
    }
    return 0;
}

uint64_t sc_config_seed(const sc_config* config) {
    return config == nullptr ? 0 : config->config.scenario.sampler.master_seed;
}

sc_status sc_config_true_enhanced(const sc_config* config, double* mean, double* std_dev) {
    if (auto rc = require_ptr(config, "config"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(mean, "mean"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(std_dev, "std_dev"); rc != SC_OK) return rc;
    return guarded([&] {
        const GaussianComponent g = derive_true_enhanced(config->config.scenario);
        *mean = g.mean;
        *std_dev = g.std_dev;
        return SC_OK;
    });
}

sc_status sc_config_enhancement_model(const sc_config* config, double* mean, double* std_dev) {
    if (auto rc = require_ptr(config, "config"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(mean, "mean"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(std_dev, "std_dev"); rc != SC_OK) return rc;
    return guarded([&] {
        const GaussianComponent g = derive_enhancement_model(config->config.scenario);
        *mean = g.mean;
        *std_dev = g.std_dev;
        return SC_OK;
    });
}

/* ---------------- simulation results ---------------- */

sc_status sc_config_run(const sc_config* config, sc_result** out) {
    if (auto rc = require_ptr(config, "config"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(out, "out"); rc != SC_OK) return rc;
    return guarded([&] {
        *out = new sc_result{run(config->config.scenario)};
        return SC_OK;
    });
}

sc_status sc_config_sweep(const sc_config* config, const double* scales, size_t n_scales,
                          const double* alphas, size_t n_alphas, sc_result** out) {
    if (auto rc = require_ptr(config, "config"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(out, "out"); rc != SC_OK) return rc;
    if (n_scales > 0 && scales == nullptr) {
        return fail(SC_ERROR_INVALID_ARGUMENT, "scales must not be NULL when n_scales > 0");
    }
    if (n_alphas > 0 && alphas == nullptr) {
        return fail(SC_ERROR_INVALID_ARGUMENT, "alphas must not be NULL when n_alphas > 0");
    }
    return guarded([&] {
        *out = new sc_result{sweep(config->config.scenario,
                                   std::vector<double>(scales, scales + n_scales),
                                   std::vector<double>(alphas, alphas + n_alphas))};
        return SC_OK;
    });
}

void sc_result_free(sc_result* result) {
    delete result;
}

size_t sc_result_count(const sc_result* result) {
    return result == nullptr ? 0 : result->rows.size();
}

const char* sc_result_strategy(const sc_result* result, size_t row) {
    const StrategyResult* r = row_at(result, row);
    return r == nullptr ? "" : r->strategy.c_str();
}

const char* sc_result_parameter_name(const sc_result* result, size_t row) {
    const StrategyResult* r = row_at(result, row);
    return r == nullptr ? "" : r->parameter_name.c_str();
}

sc_status sc_result_parameter_value(const sc_result* result, size_t row, double* out) {
    if (auto rc = require_ptr(out, "out"); rc != SC_OK) return rc;
    const StrategyResult* r = row_at(result, row);
    if (r == nullptr) return fail(SC_ERROR_INVALID_ARGUMENT, "result row out of range");
    *out = r->parameter_value;
    return SC_OK;
}

sc_status sc_result_summary(const sc_result* result, size_t row, double* mean, double* std_dev,
                            double* kl_binned, double* kl_gauss_fit, double* wall_time_ms) {
    const StrategyResult* r = row_at(result, row);
    if (r == nullptr) return fail(SC_ERROR_INVALID_ARGUMENT, "result row out of range");
    if (mean != nullptr) *mean = r->mean;
    if (std_dev != nullptr) *std_dev = r->std_dev;
    if (kl_binned != nullptr) *kl_binned = r->kl_binned;
    if (kl_gauss_fit != nullptr) *kl_gauss_fit = r->kl_gauss_fit;
    if (wall_time_ms != nullptr) *wall_time_ms = r->wall_time_ms;
    return SC_OK;
}

sc_status sc_result_samples(const sc_result* result, size_t row, const double** data,
                            size_t* len) {
    if (auto rc = require_ptr(data, "data"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(len, "len"); rc != SC_OK) return rc;
    const StrategyResult* r = row_at(result, row);
    if (r == nullptr) return fail(SC_ERROR_INVALID_ARGUMENT, "result row out of range");
    *data = r->samples.values.data();
    *len = r->samples.values.size();
    return SC_OK;
}

sc_status sc_result_histogram(const sc_result* result, size_t row, const double** edges,
                              const double** empirical_mass, const double** reference_mass,
                              size_t* bin_count) {
    if (auto rc = require_ptr(edges, "edges"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(empirical_mass, "empirical_mass"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(reference_mass, "reference_mass"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(bin_count, "bin_count"); rc != SC_OK) return rc;
    const StrategyResult* r = row_at(result, row);
    if (r == nullptr) return fail(SC_ERROR_INVALID_ARGUMENT, "result row out of range");
    *edges = r->histogram.edges.data();
    *empirical_mass = r->histogram.empirical_mass.data();
    *reference_mass = r->histogram.reference_mass.data();
    *bin_count = r->histogram.empirical_mass.size();
    return SC_OK;
}

sc_status sc_result_trajectory(const sc_result* result, size_t row, size_t sample,
                               const double** data, size_t* len) {
    if (auto rc = require_ptr(data, "data"); rc != SC_OK) return rc;
    if (auto rc = require_ptr(len, "len"); rc != SC_OK) return rc;
    const StrategyResult* r = row_at(result, row);
    if (r == nullptr) return fail(SC_ERROR_INVALID_ARGUMENT, "result row out of range");
    if (r->samples.trajectories.empty()) {
        return fail(SC_ERROR_INVALID_ARGUMENT, "trajectories were not recorded for this run");
    }
    if (sample >= r->samples.trajectories.size()) {
        return fail(SC_ERROR_INVALID_ARGUMENT, "sample index out of range");
    }
    *data = r->samples.trajectories[sample].data();
    *len = r->samples.trajectories[sample].size();
    return SC_OK;
}

/* ---------------- self test ---------------- */

int sc_selftest(char** report_out) {
    std::ostringstream out;
    const bool ok = run_selftest(out);
    if (report_out != nullptr) *report_out = dup_string(out.str());
    return ok ? 0 : 1;
}

}  // extern "C"

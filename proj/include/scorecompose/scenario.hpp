/**
 * The guidance-comparison simulation: scenario parameters, derived model
 * parameters, strategy runs and their metrics.
 */

#ifndef SCORECOMPOSE_SCENARIO_HPP
#define SCORECOMPOSE_SCENARIO_HPP

#include <string>
#include <vector>

#include "scorecompose/gmm.hpp"
#include "scorecompose/guidance.hpp"
#include "scorecompose/metrics.hpp"
#include "scorecompose/sampler.hpp"

namespace scorecompose {

struct ScenarioSpec {
    Gmm1D tts_prior = Gmm1D::single(0.0, 1.0);
    std::size_t target_component = 0;  // y
    double delta_mu = 0.0;             // enhancement mean shift
    double var_reduction = 1.0;        // >= 1
    double model_bias = 0.0;           // imperfect-model mean bias
    double var_inflation = 1.0;        // > 0, imperfect-model std inflation
    SamplerConfig sampler;
    std::vector<GuidanceStrategy> strategies;
};

struct StrategyResult {
    std::string strategy;        // no_guidance | tc_cfg | score_average | analytic_posterior
    std::string parameter_name;  // "guidance_scale", "alpha" or ""
    double parameter_value = 0.0;
    SampleBatch samples;
    double mean = 0.0;
    double std_dev = 0.0;
    double kl_binned = 0.0;     // nats, vs the true enhanced distribution
    double kl_gauss_fit = 0.0;  // nats
    double wall_time_ms = 0.0;
    Histogram histogram;  // same binning the KL used; plot-ready
};

using SimulationResult = std::vector<StrategyResult>;

/// The reference configuration: bimodal prior at -4/+4 (std 0.9, equal
/// weights), target component 0, mean shift 2, variance reduction 4, model
/// bias 0.4, variance inflation 1.8, 5000 samples over 200 steps from
/// sigma 80 down to 0.005, strategies no_guidance / tc_cfg(1e4) /
/// score_average(0.5).
ScenarioSpec build_appendix_scenario();

/// N(mu_y + delta_mu, (sigma_y / var_reduction)^2) — the ideal target.
GaussianComponent derive_true_enhanced(const ScenarioSpec& spec);

/// N(mu_y + delta_mu + bias, (var_inflation * sigma_y / var_reduction)^2) —
/// the imperfect model actually sampled from.
GaussianComponent derive_enhancement_model(const ScenarioSpec& spec);

/// Runs every configured strategy against a shared noise realization
/// (common random numbers derived from the master seed), then evaluates
/// moments and both KL metrics against derive_true_enhanced.
SimulationResult run(const ScenarioSpec& spec);

/// Sensitivity grid: one tc_cfg row per scale plus one score_average row per
/// alpha, each run exactly as in run(). At least one grid must be non-empty.
SimulationResult sweep(const ScenarioSpec& spec, const std::vector<double>& scales,
                       const std::vector<double>& alphas);

}  // namespace scorecompose

#endif

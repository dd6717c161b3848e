/**
 * Reverse-time variance-exploding sampler.
 *
 * Update rule over consecutive schedule levels:
 *   x <- x + (sigma_t^2 - sigma_{t+1}^2) * s_total(x, sigma_t)
 *          + sqrt(sigma_t^2 - sigma_{t+1}^2) * eps
 * with the noise term omitted on the final transition unless
 * terminal_noise is set.
 *
 * Sample i always draws from RandomStream::substream(master_seed, i), so a
 * batch is bit-identical no matter how many workers split it.
 */

#ifndef SCORECOMPOSE_SAMPLER_HPP
#define SCORECOMPOSE_SAMPLER_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "scorecompose/guidance.hpp"
#include "scorecompose/schedules.hpp"

namespace scorecompose {

struct ScenarioSpec;

struct SamplerConfig {
    ScheduleSpec schedule;  // kind VeLogLinear
    int n_samples = 1;
    std::uint64_t master_seed = 0;
    bool record_trajectories = false;
    bool terminal_noise = false;
    unsigned max_threads = 0;  // 0 = hardware default; SCORECOMPOSE_THREADS caps further
};

struct SampleBatch {
    std::vector<double> values;
    /// trajectories[i][t] for t = 0..T when recording is enabled; the last
    /// entry of each trajectory equals values[i] exactly.
    std::vector<std::vector<double>> trajectories;
};

/// total_score(x, sigma_t) is the composed score against the model diffused
/// at sigma_t; it must be safe to call concurrently.
using ScoreFn = std::function<double(double x, double sigma_t)>;

/// Throws std::domain_error naming the sample, step index and x if the score
/// returns a non-finite value.
SampleBatch ve_reverse_sample(const ScoreFn& total_score, const SamplerConfig& config);

/// Binds a guidance strategy to the scenario's analytic models: enhancement
/// score from the derived enhancement Gaussian, TTS conditional/marginal
/// scores from the prior, all diffused at the queried sigma_t.
ScoreFn make_total_score(const ScenarioSpec& scenario, const GuidanceStrategy& strategy);

}  // namespace scorecompose

#endif

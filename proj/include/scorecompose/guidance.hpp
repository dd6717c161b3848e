/**
 * Score-composition combinators. These operate on score values only; model
 * evaluation order and caching live in the sampler.
 */

#ifndef SCORECOMPOSE_GUIDANCE_HPP
#define SCORECOMPOSE_GUIDANCE_HPP

#include <optional>
#include <string_view>

#include "scorecompose/schedules.hpp"

namespace scorecompose {

struct LogSnrGate {
    double threshold = 0.0;    // logSNR units
    bool enabled_above = true; // guidance active strictly above the threshold
};

struct GuidanceStrategy {
    enum class Kind { NoGuidance, ScoreAverage, TcCfg, AnalyticPosterior };

    Kind kind = Kind::NoGuidance;
    double alpha = 0.0;           // ScoreAverage weight, in [0, 1]
    double guidance_scale = 0.0;  // TcCfg / AnalyticPosterior, >= 0
    std::optional<LogSnrGate> gate;

    static GuidanceStrategy none();
    static GuidanceStrategy make_score_average(double alpha);
    static GuidanceStrategy make_tc_cfg(double scale, std::optional<LogSnrGate> gate = {});
    static GuidanceStrategy make_analytic_posterior(double scale,
                                                    std::optional<LogSnrGate> gate = {});

    /// no_guidance | score_average | tc_cfg | analytic_posterior
    std::string_view name() const noexcept;
};

/// (1 - alpha) * s_enh + alpha * s_tts_cond.
double score_average(double s_enh, double s_tts_cond, double alpha);

/// s_uncond + scale * (s_cond - s_uncond); scale = 1 returns s_cond exactly.
double cfg(double s_cond, double s_uncond, double scale);

/// s_enh + scale * (s_tts_cond - s_tts_uncond).
double tc_cfg(double s_enh, double s_tts_cond, double s_tts_uncond, double scale);

/// s_enh + scale * guidance_grad, with guidance_grad the analytic
/// posterior_guidance_score at the current noise level.
double analytic_posterior_guided(double s_enh, double guidance_grad, double scale);

/// Returns `composed` when the strategy's gate is absent or
/// logsnr(level) > threshold, else `base`. The switch is exact, never blended.
double apply_gate(const GuidanceStrategy& strategy, const NoiseLevel& level, double composed,
                  double base);

}  // namespace scorecompose

#endif

#include "scorecompose/guidance.hpp"

#include <cmath>
#include <stdexcept>

namespace scorecompose {

namespace {

void check_scale(double scale) {
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("guidance: scale must be finite and >= 0");
    }
}

}  // namespace

GuidanceStrategy GuidanceStrategy::none() {
    return GuidanceStrategy{};
}

GuidanceStrategy GuidanceStrategy::make_score_average(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("GuidanceStrategy: alpha must be in [0, 1]");
    }
    GuidanceStrategy s;
    s.kind = Kind::ScoreAverage;
    s.alpha = alpha;
    return s;
}

GuidanceStrategy GuidanceStrategy::make_tc_cfg(double scale, std::optional<LogSnrGate> gate) {
    check_scale(scale);
    GuidanceStrategy s;
    s.kind = Kind::TcCfg;
    s.guidance_scale = scale;
    s.gate = gate;
    return s;
}

GuidanceStrategy GuidanceStrategy::make_analytic_posterior(double scale,
                                                           std::optional<LogSnrGate> gate) {
    check_scale(scale);
    GuidanceStrategy s;
    s.kind = Kind::AnalyticPosterior;
    s.guidance_scale = scale;
    s.gate = gate;
    return s;
}

std::string_view GuidanceStrategy::name() const noexcept {
    switch (kind) {
        case Kind::NoGuidance: return "no_guidance";
        case Kind::ScoreAverage: return "score_average";
        case Kind::TcCfg: return "tc_cfg";
        case Kind::AnalyticPosterior: return "analytic_posterior";
    }
    return "unknown";
}

double score_average(double s_enh, double s_tts_cond, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("score_average: alpha must be in [0, 1]");
    }
    // endpoint degeneracies are contractual: alpha 0/1 return the inputs bitwise
    if (alpha == 0.0) return s_enh;
    if (alpha == 1.0) return s_tts_cond;
    return (1.0 - alpha) * s_enh + alpha * s_tts_cond;
}

double cfg(double s_cond, double s_uncond, double scale) {
    if (scale == 1.0) return s_cond;
    if (scale == 0.0) return s_uncond;
    return s_uncond + scale * (s_cond - s_uncond);
}

double tc_cfg(double s_enh, double s_tts_cond, double s_tts_uncond, double scale) {
    if (scale == 0.0) return s_enh;
    return s_enh + scale * (s_tts_cond - s_tts_uncond);
}

double analytic_posterior_guided(double s_enh, double guidance_grad, double scale) {
    if (scale == 0.0) return s_enh;
    return s_enh + scale * guidance_grad;
}

double apply_gate(const GuidanceStrategy& strategy, const NoiseLevel& level, double composed,
                  double base) {
    if (!strategy.gate) return composed;
    const bool above = logsnr(level) > strategy.gate->threshold;
    return above == strategy.gate->enabled_above ? composed : base;
}

}  // namespace scorecompose

#include "scorecompose/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scorecompose {

namespace {

constexpr double kPi = 3.14159265358979323846;

double stable_sigmoid(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void require_vp(const NoiseLevel& level, const char* where) {
    if (level.kind != NoiseLevel::Kind::VP) {
        throw std::invalid_argument(std::string(where) + ": VP noise level required");
    }
}

NoiseLevel vp_from_logsnr(double lambda) {
    NoiseLevel level;
    level.kind = NoiseLevel::Kind::VP;
    level.alpha = std::sqrt(stable_sigmoid(lambda));
    level.sigma = std::sqrt(stable_sigmoid(-lambda));
    return level;
}

}  // namespace

NoiseLevel NoiseLevel::ve(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("NoiseLevel::ve: sigma must be finite and > 0");
    }
    return NoiseLevel{Kind::VE, 1.0, sigma};
}

NoiseLevel NoiseLevel::vp(double alpha, double sigma) {
    if (!(alpha > 0.0 && alpha <= 1.0) || !(sigma >= 0.0)) {
        throw std::invalid_argument("NoiseLevel::vp: alpha in (0,1], sigma >= 0 required");
    }
    if (std::abs(alpha * alpha + sigma * sigma - 1.0) > 1e-9) {
        throw std::invalid_argument("NoiseLevel::vp: alpha^2 + sigma^2 must equal 1");
    }
    return NoiseLevel{Kind::VP, alpha, sigma};
}

std::vector<double> ve_log_linear(const ScheduleSpec& spec) {
    if (spec.kind != ScheduleKind::VeLogLinear) {
        throw std::invalid_argument("ve_log_linear: schedule kind must be VeLogLinear");
    }
    if (spec.steps < 2) throw std::invalid_argument("ve_log_linear: steps must be >= 2");
    if (!(spec.sigma_init > spec.sigma_final) || !(spec.sigma_final > 0.0)) {
        throw std::invalid_argument("ve_log_linear: need sigma_init > sigma_final > 0");
    }
    const int T = spec.steps;
    const double log_init = std::log(spec.sigma_init);
    const double log_final = std::log(spec.sigma_final);
    std::vector<double> sigmas(static_cast<std::size_t>(T) + 1);
    sigmas.front() = spec.sigma_init;  // exact endpoints
    sigmas.back() = spec.sigma_final;
    for (int t = 1; t < T; ++t) {
        const double ft = static_cast<double>(t) / T;
        sigmas[static_cast<std::size_t>(t)] = std::exp(ft * log_final + (1.0 - ft) * log_init);
    }
    return sigmas;
}

NoiseLevel vp_shifted_cosine(double t, double s) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw std::invalid_argument("vp_shifted_cosine: t must be in [0, 1]");
    }
    if (!(s > 0.0)) throw std::invalid_argument("vp_shifted_cosine: shift s must be > 0");
    const double tc = std::clamp(t, kVpClampEps, 1.0 - kVpClampEps);
    const double lambda = -2.0 * std::log(std::tan(kPi * tc / 2.0)) + 2.0 * std::log(s);
    return vp_from_logsnr(lambda);
}

double logsnr(const NoiseLevel& level) {
    if (level.kind == NoiseLevel::Kind::VP) {
        return 2.0 * (std::log(level.alpha) - std::log(level.sigma));
    }
    return -2.0 * std::log(level.sigma);
}

std::vector<NoiseLevel> logsnr_linear_schedule(const ScheduleSpec& spec) {
    if (spec.kind != ScheduleKind::LogSnrLinear) {
        throw std::invalid_argument("logsnr_linear_schedule: schedule kind must be LogSnrLinear");
    }
    if (spec.steps < 2) throw std::invalid_argument("logsnr_linear_schedule: steps must be >= 2");
    if (!(spec.logsnr_min < spec.logsnr_max)) {
        throw std::invalid_argument("logsnr_linear_schedule: need logsnr_min < logsnr_max");
    }
    const int T = spec.steps;
    std::vector<NoiseLevel> levels;
    levels.reserve(static_cast<std::size_t>(T) + 1);
    for (int i = 0; i <= T; ++i) {
        const double frac = static_cast<double>(i) / T;
        levels.push_back(vp_from_logsnr(spec.logsnr_min + frac * (spec.logsnr_max - spec.logsnr_min)));
    }
    return levels;
}

double sigmoid_weight(double lambda, const LossWeightSpec& spec) {
    if (!std::isfinite(lambda) || !std::isfinite(spec.bias)) {
        throw std::invalid_argument("sigmoid_weight: lambda and bias must be finite");
    }
    return stable_sigmoid(spec.bias - lambda);
}

double velocity_from(double x, double eps, const NoiseLevel& level) {
    require_vp(level, "velocity_from");
    return level.alpha * eps - level.sigma * x;
}

double x_from_velocity(double z, double v, const NoiseLevel& level) {
    require_vp(level, "x_from_velocity");
    return level.alpha * z - level.sigma * v;
}

double eps_from_velocity(double z, double v, const NoiseLevel& level) {
    require_vp(level, "eps_from_velocity");
    return level.sigma * z + level.alpha * v;
}

double dsm_loss(const std::function<double(double)>& score_candidate, const Gmm1D& target,
                const NoiseLevel& level, int n_mc, RandomStream& rng,
                const std::optional<LossWeightSpec>& weight) {
    if (n_mc < 1) throw std::invalid_argument("dsm_loss: n_mc must be >= 1");
    if (!(level.sigma > 0.0)) throw std::invalid_argument("dsm_loss: sigma must be > 0");
    const double a = level.kind == NoiseLevel::Kind::VP ? level.alpha : 1.0;
    double acc = 0.0;
    for (int i = 0; i < n_mc; ++i) {
        const double x = sample_gmm(target, rng);
        const double eps = rng.next_normal();
        const double z = a * x + level.sigma * eps;
        const double resid = score_candidate(z) - (-eps / level.sigma);
        acc += resid * resid;
    }
    const double w = weight ? sigmoid_weight(logsnr(level), *weight) : 1.0;
    return w * acc / n_mc;
}

}  // namespace scorecompose

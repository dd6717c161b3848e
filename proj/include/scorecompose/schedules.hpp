/**
 * Noise schedules, logSNR utilities, loss weighting, velocity
 * parameterization and the denoising score matching objective.
 */

#ifndef SCORECOMPOSE_SCHEDULES_HPP
#define SCORECOMPOSE_SCHEDULES_HPP

#include <functional>
#include <optional>
#include <vector>

#include "scorecompose/gmm.hpp"
#include "scorecompose/rng.hpp"

namespace scorecompose {

struct NoiseLevel {
    enum class Kind { VE, VP };

    Kind kind = Kind::VE;
    double alpha = 1.0;  // 1 for VE
    double sigma = 1.0;

    static NoiseLevel ve(double sigma);
    /// Requires alpha^2 + sigma^2 = 1 within 1e-9.
    static NoiseLevel vp(double alpha, double sigma);
};

enum class ScheduleKind { VeLogLinear, VpShiftedCosine, LogSnrLinear };

struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::VeLogLinear;
    int steps = 2;  // T; the emitted sequence has T+1 levels

    // VeLogLinear
    double sigma_init = 0.0;
    double sigma_final = 0.0;

    // VpShiftedCosine
    double shift_s = 1.0;

    // LogSnrLinear
    double logsnr_min = 0.0;
    double logsnr_max = 0.0;
};

struct LossWeightSpec {
    double bias = 0.0;  // logSNR units
};

/// t is clamped to [kVpClampEps, 1 - kVpClampEps] before evaluating the
/// shifted cosine schedule, keeping tan away from its poles.
inline constexpr double kVpClampEps = 1e-5;

/// sigma_t = exp((t/T) log sigma_final + ((T-t)/T) log sigma_init), t = 0..T.
/// Endpoints are emitted exactly; the sequence is strictly decreasing.
std::vector<double> ve_log_linear(const ScheduleSpec& spec);

/// Shifted cosine schedule: logSNR(t) = -2 log tan(pi t / 2) + 2 log s.
NoiseLevel vp_shifted_cosine(double t, double s);

/// VP: log(alpha^2 / sigma^2); VE: -2 log sigma.
double logsnr(const NoiseLevel& level);

/// T+1 VP levels in reverse-time order (high noise -> low noise); their
/// logSNR values form an arithmetic sequence from logsnr_min to logsnr_max.
std::vector<NoiseLevel> logsnr_linear_schedule(const ScheduleSpec& spec);

/// sigmoid(bias - lambda); monotone decreasing in lambda, bounded in (0,1).
double sigmoid_weight(double lambda, const LossWeightSpec& spec);

/// v = alpha * eps - sigma * x (VP levels only).
double velocity_from(double x, double eps, const NoiseLevel& level);
/// x = alpha * z - sigma * v.
double x_from_velocity(double z, double v, const NoiseLevel& level);
/// eps = sigma * z + alpha * v.
double eps_from_velocity(double z, double v, const NoiseLevel& level);

/// Monte Carlo denoising score matching loss of a score candidate against
/// the target mixture at one noise level: draws x ~ target, eps ~ N(0,1),
/// forms z per the level's kind and averages |s(z) + eps/sigma|^2. The
/// conditional score of the noising kernel is evaluated in its eps form.
/// When a LossWeightSpec is supplied the average is scaled by
/// sigmoid_weight(logsnr(level)).
double dsm_loss(const std::function<double(double)>& score_candidate, const Gmm1D& target,
                const NoiseLevel& level, int n_mc, RandomStream& rng,
                const std::optional<LossWeightSpec>& weight = std::nullopt);

}  // namespace scorecompose

#endif

/**
 * Distribution-comparison metrics between empirical samples and analytic
 * Gaussian references.
 */

#ifndef SCORECOMPOSE_METRICS_HPP
#define SCORECOMPOSE_METRICS_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "scorecompose/gmm.hpp"

namespace scorecompose {

struct HistogramSpec {
    int bin_count = 200;
    /// Explicit [lo, hi); when absent the range is the reference mean +/- 8
    /// reference stds, unioned with the sample min/max.
    std::optional<std::pair<double, double>> range;
    double epsilon = 1e-12;  // smoothing mass added per bin before the KL sum
};

struct Histogram {
    std::vector<double> edges;           // bin_count + 1
    std::vector<double> empirical_mass;  // sample fraction per bin, sums to 1
    std::vector<double> reference_mass;  // exact Gaussian mass per bin (unsmoothed)
};

/// Standard normal CDF, evaluated through erfc for usable tail accuracy.
double gaussian_cdf(double z);

/// (arithmetic mean, standard deviation with 1/(N-1) normalization).
/// Requires at least two samples.
std::pair<double, double> moments(std::span<const double> samples);

/// Bins the samples against the reference; out-of-range samples clamp into
/// the edge bins. Reference mass comes from CDF differences, not midpoint
/// densities.
Histogram build_histogram(std::span<const double> samples, const GaussianComponent& reference,
                          const HistogramSpec& spec = {});

/// KL(empirical || reference) in nats over the histogram bins, with both
/// mass vectors epsilon-smoothed and renormalized. Requires >= 100 samples.
double binned_kl(std::span<const double> samples, const GaussianComponent& reference,
                 const HistogramSpec& spec = {});

/// Fits N(mean, std^2) by moments and returns the closed-form
/// KL(fit || reference). Requires >= 2 samples and nonzero sample std.
double gaussian_fit_kl(std::span<const double> samples, const GaussianComponent& reference);

}  // namespace scorecompose

#endif

#include "scorecompose/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scorecompose {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

void check_reference(const GaussianComponent& ref) {
    if (!(ref.std_dev > 0.0) || !std::isfinite(ref.std_dev) || !std::isfinite(ref.mean)) {
        throw std::invalid_argument("metrics: reference must have finite mean and std > 0");
    }
}

}  // namespace

double gaussian_cdf(double z) {
    return 0.5 * std::erfc(-z / kSqrt2);
}

std::pair<double, double> moments(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("moments: need at least 2 samples");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

Histogram build_histogram(std::span<const double> samples, const GaussianComponent& reference,
                          const HistogramSpec& spec) {
    check_reference(reference);
    if (spec.bin_count < 2) throw std::invalid_argument("histogram: bin_count must be >= 2");
    if (samples.empty()) throw std::invalid_argument("histogram: no samples");

    double lo, hi;
    if (spec.range) {
        lo = spec.range->first;
        hi = spec.range->second;
    } else {
        const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
        lo = std::min(reference.mean - 8.0 * reference.std_dev, *mn);
        hi = std::max(reference.mean + 8.0 * reference.std_dev, *mx);
    }
    if (!(lo < hi)) throw std::invalid_argument("histogram: degenerate range");

    const int b = spec.bin_count;
    Histogram h;
    h.edges.resize(static_cast<std::size_t>(b) + 1);
    for (int i = 0; i <= b; ++i) {
        h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / b;
    }
    h.edges.front() = lo;
    h.edges.back() = hi;

    h.empirical_mass.assign(static_cast<std::size_t>(b), 0.0);
    const double width = (hi - lo) / b;
    for (double x : samples) {
        if (!std::isfinite(x)) throw std::invalid_argument("histogram: non-finite sample");
        int idx = static_cast<int>(std::floor((x - lo) / width));
        idx = std::clamp(idx, 0, b - 1);  // out-of-range samples land in edge bins
        h.empirical_mass[static_cast<std::size_t>(idx)] += 1.0;
    }
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (double& m : h.empirical_mass) m *= inv_n;

    h.reference_mass.resize(static_cast<std::size_t>(b));
    for (int i = 0; i < b; ++i) {
        const double zlo = (h.edges[static_cast<std::size_t>(i)] - reference.mean) / reference.std_dev;
        const double zhi = (h.edges[static_cast<std::size_t>(i) + 1] - reference.mean) / reference.std_dev;
        double mass;
        if (zlo >= 0.0) {
            // both edges in the upper tail: difference of upper-tail masses
            mass = 0.5 * (std::erfc(zlo / kSqrt2) - std::erfc(zhi / kSqrt2));
        } else if (zhi <= 0.0) {
            mass = 0.5 * (std::erfc(-zhi / kSqrt2) - std::erfc(-zlo / kSqrt2));
        } else {
            mass = gaussian_cdf(zhi) - gaussian_cdf(zlo);
        }
        h.reference_mass[static_cast<std::size_t>(i)] = std::max(mass, 0.0);
    }
    return h;
}

double binned_kl(std::span<const double> samples, const GaussianComponent& reference,
                 const HistogramSpec& spec) {
    if (samples.size() < 100) throw std::invalid_argument("binned_kl: need at least 100 samples");
    if (!(spec.epsilon > 0.0)) throw std::invalid_argument("binned_kl: epsilon must be > 0");
    const Histogram h = build_histogram(samples, reference, spec);
    const std::size_t b = h.empirical_mass.size();

    double p_total = 0.0, q_total = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        p_total += h.empirical_mass[i] + spec.epsilon;
        q_total += h.reference_mass[i] + spec.epsilon;
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const double p = (h.empirical_mass[i] + spec.epsilon) / p_total;
        const double q = (h.reference_mass[i] + spec.epsilon) / q_total;
        kl += p * std::log(p / q);
    }
    return kl;
}

double gaussian_fit_kl(std::span<const double> samples, const GaussianComponent& reference) {
    check_reference(reference);
    const auto [mean, sd] = moments(samples);
    if (!(sd > 0.0)) throw std::invalid_argument("gaussian_fit_kl: sample std is zero");
    const double vr = reference.std_dev * reference.std_dev;
    const double dm = mean - reference.mean;
    return std::log(reference.std_dev / sd) + (sd * sd + dm * dm) / (2.0 * vr) - 0.5;
}

}  // namespace scorecompose

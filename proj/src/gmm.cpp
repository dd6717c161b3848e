#include "scorecompose/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace scorecompose {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)
constexpr double kWeightSumTol = 1e-12;

void check_finite_x(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("gmm: x must be finite");
    }
}

void check_sigma_t(double sigma_t) {
    if (!(sigma_t >= 0.0) || !std::isfinite(sigma_t)) {
        throw std::invalid_argument("gmm: sigma_t must be finite and >= 0");
    }
}

// log w_k + log N(x; mu_k, var_k) for every component, with variances
// inflated by sigma_t^2; returns the log-sum-exp alongside.
struct LogTerms {
    std::vector<double> log_wp;  // per component
    double log_sum;
};

LogTerms log_weighted_densities(const Gmm1D& gmm, double x, double sigma_t) {
    LogTerms out;
    out.log_wp.reserve(gmm.size());
    double max_term = -std::numeric_limits<double>::infinity();
    for (const auto& c : gmm.components()) {
        const double var = c.std_dev * c.std_dev + sigma_t * sigma_t;
        const double d = x - c.mean;
        const double term = std::log(c.weight) - 0.5 * (d * d / var + std::log(var) + kLogTwoPi);
        out.log_wp.push_back(term);
        max_term = std::max(max_term, term);
    }
    double acc = 0.0;
    for (double t : out.log_wp) acc += std::exp(t - max_term);
    out.log_sum = max_term + std::log(acc);
    return out;
}

double score_at(const Gmm1D& gmm, double x, double sigma_t) {
    const LogTerms lt = log_weighted_densities(gmm, x, sigma_t);
    double s = 0.0;
    for (std::size_t k = 0; k < gmm.size(); ++k) {
        const auto& c = gmm.component(k);
        const double var = c.std_dev * c.std_dev + sigma_t * sigma_t;
        const double r = std::exp(lt.log_wp[k] - lt.log_sum);
        s += r * (-(x - c.mean) / var);
    }
    return s;
}

}  // namespace

Gmm1D::Gmm1D(std::vector<GaussianComponent> components) : components_(std::move(components)) {
    if (components_.empty()) {
        throw std::invalid_argument("Gmm1D: at least one component required");
    }
    double wsum = 0.0;
    for (const auto& c : components_) {
        if (!std::isfinite(c.mean) || !std::isfinite(c.std_dev) || !std::isfinite(c.weight)) {
            throw std::invalid_argument("Gmm1D: component parameters must be finite");
        }
        if (c.std_dev <= 0.0) throw std::invalid_argument("Gmm1D: component std must be > 0");
        if (c.weight <= 0.0) throw std::invalid_argument("Gmm1D: component weight must be > 0");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > kWeightSumTol) {
        throw std::invalid_argument("Gmm1D: component weights must sum to 1, got " +
                                    std::to_string(wsum));
    }
}

Gmm1D Gmm1D::single(double mean, double std_dev) {
    return Gmm1D({GaussianComponent{mean, std_dev, 1.0}});
}

const GaussianComponent& Gmm1D::component(std::size_t k) const {
    if (k >= components_.size()) {
        throw std::out_of_range("Gmm1D: component index " + std::to_string(k) +
                                " out of range (size " + std::to_string(components_.size()) + ")");
    }
    return components_[k];
}

double log_density(const Gmm1D& gmm, double x) {
    check_finite_x(x);
    return log_weighted_densities(gmm, x, 0.0).log_sum;
}

double score(const Gmm1D& gmm, double x) {
    check_finite_x(x);
    return score_at(gmm, x, 0.0);
}

Gmm1D diffuse_ve(const Gmm1D& gmm, double sigma_t) {
    if (!(sigma_t > 0.0) || !std::isfinite(sigma_t)) {
        throw std::invalid_argument("diffuse_ve: sigma_t must be finite and > 0");
    }
    std::vector<GaussianComponent> out = gmm.components();
    for (auto& c : out) {
        c.std_dev = std::sqrt(c.std_dev * c.std_dev + sigma_t * sigma_t);
    }
    return Gmm1D(std::move(out));
}

Gmm1D diffuse_vp(const Gmm1D& gmm, double alpha_t, double sigma_t) {
    if (!(alpha_t > 0.0 && alpha_t <= 1.0)) {
        throw std::invalid_argument("diffuse_vp: alpha_t must be in (0, 1]");
    }
    if (std::abs(alpha_t * alpha_t + sigma_t * sigma_t - 1.0) > 1e-9) {
        throw std::invalid_argument("diffuse_vp: alpha^2 + sigma^2 must equal 1");
    }
    std::vector<GaussianComponent> out = gmm.components();
    for (auto& c : out) {
        c.mean *= alpha_t;
        c.std_dev = std::sqrt(alpha_t * alpha_t * c.std_dev * c.std_dev + sigma_t * sigma_t);
    }
    return Gmm1D(std::move(out));
}

ComponentPosterior component_posterior(const Gmm1D& gmm, double x, double sigma_t) {
    check_finite_x(x);
    check_sigma_t(sigma_t);
    const LogTerms lt = log_weighted_densities(gmm, x, sigma_t);
    ComponentPosterior post;
    post.probabilities.reserve(gmm.size());
    for (double t : lt.log_wp) post.probabilities.push_back(std::exp(t - lt.log_sum));
    return post;
}

double conditional_score(const Gmm1D& gmm, double x, double sigma_t, std::size_t k) {
    check_finite_x(x);
    check_sigma_t(sigma_t);
    const auto& c = gmm.component(k);
    const double var = c.std_dev * c.std_dev + sigma_t * sigma_t;
    return -(x - c.mean) / var;
}

double posterior_guidance_score(const Gmm1D& gmm, double x, double sigma_t, std::size_t k) {
    const ComponentPosterior post = component_posterior(gmm, x, sigma_t);
    double marginal = 0.0;
    for (std::size_t j = 0; j < gmm.size(); ++j) {
        marginal += post.probabilities[j] * conditional_score(gmm, x, sigma_t, j);
    }
    return conditional_score(gmm, x, sigma_t, k) - marginal;
}

double sample_gmm(const Gmm1D& gmm, RandomStream& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    std::size_t pick = gmm.size() - 1;  // guard against rounding at u ~ 1
    for (std::size_t k = 0; k < gmm.size(); ++k) {
        cum += gmm.components()[k].weight;
        if (u < cum) {
            pick = k;
            break;
        }
    }
    const auto& c = gmm.components()[pick];
    return c.mean + c.std_dev * rng.next_normal();
}

}  // namespace scorecompose

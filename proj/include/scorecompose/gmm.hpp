/**
 * Closed-form 1D Gaussian mixture machinery: densities, scores, diffused
 * marginals and component posteriors. All density/posterior arithmetic runs
 * in log space so far-mode responsibilities survive noise levels down to
 * sigma = 0.005 without underflow.
 *
 * Every function here is a pure function of its arguments; sample_gmm takes
 * an explicit RandomStream.
 */

#ifndef SCORECOMPOSE_GMM_HPP
#define SCORECOMPOSE_GMM_HPP

#include <cstddef>
#include <vector>

#include "scorecompose/rng.hpp"

namespace scorecompose {

struct GaussianComponent {
    double mean = 0.0;
    double std_dev = 1.0;  // > 0
    double weight = 1.0;   // > 0
};

/// Ordered Gaussian mixture; component index k is the identity of "word" k.
/// Weights must sum to 1 within 1e-12.
class Gmm1D {
public:
    explicit Gmm1D(std::vector<GaussianComponent> components);

    static Gmm1D single(double mean, double std_dev);

    const std::vector<GaussianComponent>& components() const noexcept { return components_; }
    const GaussianComponent& component(std::size_t k) const;
    std::size_t size() const noexcept { return components_.size(); }

private:
    std::vector<GaussianComponent> components_;
};

struct ComponentPosterior {
    std::vector<double> probabilities;  // in [0,1], sum to 1 within 1e-12
};

/// log sum_k w_k N(x; mu_k, sigma_k^2), evaluated with log-sum-exp.
double log_density(const Gmm1D& gmm, double x);

/// d/dx log_density(x): responsibility-weighted sum of component scores.
double score(const Gmm1D& gmm, double x);

/// Marginal of x + sigma_t * eps: variances inflated by sigma_t^2.
Gmm1D diffuse_ve(const Gmm1D& gmm, double sigma_t);

/// Marginal of alpha_t * x + sigma_t * eps under alpha^2 + sigma^2 = 1.
Gmm1D diffuse_vp(const Gmm1D& gmm, double alpha_t, double sigma_t);

/// p(component = k | x) under diffuse_ve(gmm, sigma_t); sigma_t = 0 is the
/// undiffused posterior.
ComponentPosterior component_posterior(const Gmm1D& gmm, double x, double sigma_t);

/// Score of the diffused k-th component: -(x - mu_k) / (sigma_k^2 + sigma_t^2).
double conditional_score(const Gmm1D& gmm, double x, double sigma_t, std::size_t k);

/// d/dx log p(k | x) at noise sigma_t; equals conditional score minus the
/// diffused marginal score.
double posterior_guidance_score(const Gmm1D& gmm, double x, double sigma_t, std::size_t k);

/// Ancestral draw: component by weight, then a Gaussian variate.
double sample_gmm(const Gmm1D& gmm, RandomStream& rng);

}  // namespace scorecompose

#endif

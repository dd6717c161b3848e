#include "scorecompose/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

#include "scorecompose/scenario.hpp"

namespace scorecompose {

namespace {

unsigned env_thread_cap() {
    const char* raw = std::getenv("SCORECOMPOSE_THREADS");
    if (raw == nullptr || *raw == '\0') return 0;
    char* end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    if (end == raw || v < 1) return 0;  // malformed values fall back to the default
    return static_cast<unsigned>(v);
}

unsigned worker_count(unsigned requested, std::size_t n_items) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned count = requested == 0 ? hw : std::min(requested, hw);
    if (const unsigned cap = env_thread_cap(); cap != 0) count = std::min(count, cap);
    return static_cast<unsigned>(std::min<std::size_t>(count, std::max<std::size_t>(n_items, 1)));
}

// Static partition over [0, n); chunk layout never influences results because
// every item owns its slot and its RNG substream.
void parallel_for(std::size_t n, unsigned requested_threads,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    const unsigned workers = worker_count(requested_threads, n);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(n, static_cast<std::size_t>(w) * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

SampleBatch ve_reverse_sample(const ScoreFn& total_score, const SamplerConfig& config) {
    if (config.n_samples < 1) {
        throw std::invalid_argument("ve_reverse_sample: n_samples must be >= 1");
    }
    if (!total_score) throw std::invalid_argument("ve_reverse_sample: null score function");
    const std::vector<double> sigmas = ve_log_linear(config.schedule);
    const int T = config.schedule.steps;
    const std::size_t n = static_cast<std::size_t>(config.n_samples);

    SampleBatch batch;
    batch.values.resize(n);
    if (config.record_trajectories) {
        batch.trajectories.assign(n, std::vector<double>());
    }

    // First non-finite score per sample, reported deterministically below.
    struct Abort {
        bool hit = false;
        int step = 0;
        double x = 0.0;
    };
    std::vector<Abort> aborts(n);

    parallel_for(n, config.max_threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            RandomStream rng = RandomStream::substream(config.master_seed, i);
            double x = sigmas[0] * rng.next_normal();
            std::vector<double>* traj = nullptr;
            if (config.record_trajectories) {
                traj = &batch.trajectories[i];
                traj->reserve(static_cast<std::size_t>(T) + 1);
                traj->push_back(x);
            }
            for (int t = 0; t < T; ++t) {
                const double st = sigmas[static_cast<std::size_t>(t)];
                const double sn = sigmas[static_cast<std::size_t>(t) + 1];
                const double d = st * st - sn * sn;
                const double s = total_score(x, st);
                if (!std::isfinite(s)) {
                    aborts[i] = Abort{true, t, x};
                    break;
                }
                x += d * s;
                if (t + 1 < T || config.terminal_noise) {
                    x += std::sqrt(d) * rng.next_normal();
                }
                if (!std::isfinite(x)) {
                    aborts[i] = Abort{true, t, x};
                    break;
                }
                if (traj) traj->push_back(x);
            }
            batch.values[i] = x;
        }
    });

    for (std::size_t i = 0; i < n; ++i) {
        if (aborts[i].hit) {
            throw std::domain_error("ve_reverse_sample: non-finite total score at step " +
                                    std::to_string(aborts[i].step) + ", sample " +
                                    std::to_string(i) + ", x = " + std::to_string(aborts[i].x));
        }
    }
    return batch;
}

ScoreFn make_total_score(const ScenarioSpec& scenario, const GuidanceStrategy& strategy) {
    if (scenario.target_component >= scenario.tts_prior.size()) {
        throw std::invalid_argument("make_total_score: target component out of range");
    }
    const GaussianComponent enh = derive_enhancement_model(scenario);
    const Gmm1D enh_model = Gmm1D::single(enh.mean, enh.std_dev);
    const Gmm1D tts = scenario.tts_prior;
    const std::size_t y = scenario.target_component;

    switch (strategy.kind) {
        case GuidanceStrategy::Kind::NoGuidance:
            return [enh_model](double x, double sigma_t) {
                return conditional_score(enh_model, x, sigma_t, 0);
            };
        case GuidanceStrategy::Kind::ScoreAverage: {
            const double alpha = strategy.alpha;
            return [enh_model, tts, y, alpha](double x, double sigma_t) {
                const double s_enh = conditional_score(enh_model, x, sigma_t, 0);
                const double s_cond = conditional_score(tts, x, sigma_t, y);
                return score_average(s_enh, s_cond, alpha);
            };
        }
        case GuidanceStrategy::Kind::TcCfg: {
            const GuidanceStrategy strat = strategy;
            return [enh_model, tts, y, strat](double x, double sigma_t) {
                const double s_enh = conditional_score(enh_model, x, sigma_t, 0);
                const double s_cond = conditional_score(tts, x, sigma_t, y);
                const double s_uncond = score(diffuse_ve(tts, sigma_t), x);
                const double composed = tc_cfg(s_enh, s_cond, s_uncond, strat.guidance_scale);
                return apply_gate(strat, NoiseLevel::ve(sigma_t), composed, s_enh);
            };
        }
        case GuidanceStrategy::Kind::AnalyticPosterior: {
            const GuidanceStrategy strat = strategy;
            return [enh_model, tts, y, strat](double x, double sigma_t) {
                const double s_enh = conditional_score(enh_model, x, sigma_t, 0);
                const double grad = posterior_guidance_score(tts, x, sigma_t, y);
                const double composed = analytic_posterior_guided(s_enh, grad, strat.guidance_scale);
                return apply_gate(strat, NoiseLevel::ve(sigma_t), composed, s_enh);
            };
        }
    }
    throw std::invalid_argument("make_total_score: unknown strategy kind");
}

}  // namespace scorecompose

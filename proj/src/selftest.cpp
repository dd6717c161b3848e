#include "scorecompose/selftest.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "scorecompose/guidance.hpp"
#include "scorecompose/scenario.hpp"
#include "scorecompose/schedules.hpp"

namespace scorecompose {

namespace {

struct Check {
    std::string name;
    std::function<bool(std::string&)> body;
};

bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol;
}

std::vector<Check> build_checks(const SelfTestOptions& options) {
    std::vector<Check> checks;
    const Gmm1D prior = build_appendix_scenario().tts_prior;
    const std::vector<double> xs = {-6.0, -4.0, -1.6, 0.0, 0.7, 3.0, 4.0, 6.0};
    const std::vector<double> sigmas = {0.005, 0.1, 0.6325, 2.0, 80.0};

    checks.push_back({"mixture_score_identity", [=](std::string& detail) {
        for (double s : sigmas) {
            const Gmm1D diffused = diffuse_ve(prior, s);
            for (double x : xs) {
                const auto post = component_posterior(prior, x, s);
                double mix = 0.0;
                for (std::size_t k = 0; k < prior.size(); ++k) {
                    mix += post.probabilities[k] * conditional_score(prior, x, s, k);
                }
                if (!close(score(diffused, x), mix, 1e-10)) {
                    detail = "x=" + std::to_string(x) + " sigma=" + std::to_string(s);
                    return false;
                }
            }
        }
        return true;
    }});

    const double bayes_offset = options.bayes_identity_offset;
    checks.push_back({"bayes_identity", [=](std::string& detail) {
        for (double s : sigmas) {
            const Gmm1D diffused = diffuse_ve(prior, s);
            for (double x : xs) {
                for (std::size_t k = 0; k < prior.size(); ++k) {
                    const double lhs = posterior_guidance_score(prior, x, s, k) + bayes_offset;
                    const double rhs = conditional_score(prior, x, s, k) - score(diffused, x);
                    if (!close(lhs, rhs, 1e-12)) {
                        detail = "x=" + std::to_string(x) + " sigma=" + std::to_string(s) +
                                 " k=" + std::to_string(k);
                        return false;
                    }
                }
            }
        }
        return true;
    }});

    checks.push_back({"posterior_normalization", [=](std::string& detail) {
        for (double s : {0.0, 1e-6, 80.0}) {
            for (double x : {-50.0, -4.0, 0.0, 4.0, 50.0}) {
                const auto post = component_posterior(prior, x, s);
                double total = 0.0;
                for (double p : post.probabilities) total += p;
                if (!close(total, 1.0, 1e-12)) {
                    detail = "sum=" + std::to_string(total);
                    return false;
                }
            }
        }
        return true;
    }});

    checks.push_back({"velocity_round_trip", [](std::string& detail) {
        RandomStream rng(17);
        for (int i = 0; i < 1000; ++i) {
            const NoiseLevel level = vp_shifted_cosine(rng.next_double(), 0.5);
            const double x = 4.0 * rng.next_normal();
            const double eps = rng.next_normal();
            const double z = level.alpha * x + level.sigma * eps;
            const double v = velocity_from(x, eps, level);
            if (!close(x_from_velocity(z, v, level), x, 1e-12) ||
                !close(eps_from_velocity(z, v, level), eps, 1e-12)) {
                detail = "trial " + std::to_string(i);
                return false;
            }
        }
        return true;
    }});

    checks.push_back({"ve_schedule_endpoints", [](std::string& detail) {
        ScheduleSpec spec;
        spec.kind = ScheduleKind::VeLogLinear;
        spec.steps = 200;
        spec.sigma_init = 80.0;
        spec.sigma_final = 0.005;
        const auto sig = ve_log_linear(spec);
        if (sig.size() != 201 || sig.front() != 80.0 || sig.back() != 0.005) {
            detail = "endpoints";
            return false;
        }
        for (std::size_t i = 1; i < sig.size(); ++i) {
            if (!(sig[i] < sig[i - 1])) {
                detail = "not strictly decreasing at " + std::to_string(i);
                return false;
            }
        }
        return true;
    }});

    checks.push_back({"vp_cosine_boundaries", [](std::string& detail) {
        const NoiseLevel lo = vp_shifted_cosine(0.0, 0.5);
        const NoiseLevel hi = vp_shifted_cosine(1.0, 0.5);
        if (!close(lo.alpha, 1.0, 1e-3) || !close(hi.alpha, 0.0, 1e-3)) {
            detail = "alpha(0)=" + std::to_string(lo.alpha) + " alpha(1)=" + std::to_string(hi.alpha);
            return false;
        }
        double prev = logsnr(vp_shifted_cosine(0.0, 0.5));
        for (int i = 1; i <= 20; ++i) {
            const double cur = logsnr(vp_shifted_cosine(i / 20.0, 0.5));
            if (!(cur < prev)) {
                detail = "logsnr not decreasing at t=" + std::to_string(i / 20.0);
                return false;
            }
            prev = cur;
        }
        return true;
    }});

    checks.push_back({"logsnr_linear_spacing", [](std::string& detail) {
        ScheduleSpec spec;
        spec.kind = ScheduleKind::LogSnrLinear;
        spec.steps = 64;
        spec.logsnr_min = -8.0;
        spec.logsnr_max = 10.0;
        const auto levels = logsnr_linear_schedule(spec);
        const double delta = (spec.logsnr_max - spec.logsnr_min) / spec.steps;
        for (std::size_t i = 1; i < levels.size(); ++i) {
            if (!close(logsnr(levels[i]) - logsnr(levels[i - 1]), delta, 1e-9)) {
                detail = "delta at " + std::to_string(i);
                return false;
            }
        }
        return true;
    }});

    checks.push_back({"combinator_endpoints", [](std::string& detail) {
        const double a = -1.375, b = 2.5, c = 0.875;
        if (score_average(a, b, 0.0) != a || score_average(a, b, 1.0) != b ||
            tc_cfg(a, b, c, 0.0) != a || cfg(b, c, 1.0) != b || cfg(b, c, 0.0) != c) {
            detail = "endpoint not exact";
            return false;
        }
        return true;
    }});

    checks.push_back({"gate_switching", [](std::string& detail) {
        const GuidanceStrategy gated = GuidanceStrategy::make_tc_cfg(2.0, LogSnrGate{-1.0, true});
        const double composed = 1.25, base = -0.5;
        if (apply_gate(gated, NoiseLevel::ve(80.0), composed, base) != base ||
            apply_gate(gated, NoiseLevel::ve(0.005), composed, base) != composed ||
            apply_gate(GuidanceStrategy::make_tc_cfg(2.0), NoiseLevel::ve(80.0), composed, base) !=
                composed) {
            detail = "gate selection";
            return false;
        }
        return true;
    }});

    return checks;
}

}  // namespace

bool run_selftest(std::ostream& out, const SelfTestOptions& options) {
    bool all_ok = true;
    for (const auto& check : build_checks(options)) {
        std::string detail;
        bool ok = false;
        try {
            ok = check.body(detail);
        } catch (const std::exception& e) {
            detail = e.what();
        }
        if (ok) {
            out << "ok " << check.name << "\n";
        } else {
            out << "FAIL " << check.name << (detail.empty() ? "" : ": " + detail) << "\n";
            all_ok = false;
        }
    }
    return all_ok;
}

}  // namespace scorecompose

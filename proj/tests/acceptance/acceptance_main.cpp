// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line each. Exits non-zero if any criterion fails.
//
// argv[1] must be the path to the scorecompose CLI binary (used by the
// determinism criterion).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "scorecompose/config.hpp"
#include "scorecompose/metrics.hpp"
#include "scorecompose/sampler.hpp"
#include "scorecompose/scenario.hpp"
#include "scorecompose/schedules.hpp"

using namespace scorecompose;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    std::string name;
    double time_limit_s;
    std::function<bool(std::string&)> body;
};

std::string g_cli_path;

bool within(double value, double target, double tol) {
    return std::abs(value - target) <= tol;
}

// ---- shared three-seed appendix runs (criteria 3 and 4) ----

struct SeedRun {
    StrategyResult no_guidance, tc_cfg, score_average;
};

std::vector<SeedRun>& appendix_runs() {
    static std::vector<SeedRun> runs = [] {
        std::vector<SeedRun> out;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            ScenarioSpec spec = build_appendix_scenario();
            spec.sampler.master_seed = seed;
            SimulationResult rows = run(spec);
            out.push_back(SeedRun{rows[0], rows[1], rows[2]});
        }
        return out;
    }();
    return runs;
}

// ---- criteria ----

bool criterion_appendix_table(std::string& detail) {
    const ScenarioSpec spec = build_appendix_scenario();
    const bool ok = spec.tts_prior.size() == 2 && spec.tts_prior.component(0).mean == -4.0 &&
                    spec.tts_prior.component(1).mean == 4.0 &&
                    spec.tts_prior.component(0).std_dev == 0.9 &&
                    spec.tts_prior.component(1).std_dev == 0.9 &&
                    spec.tts_prior.component(0).weight == 0.5 &&
                    spec.tts_prior.component(1).weight == 0.5 && spec.target_component == 0 &&
                    spec.delta_mu == 2.0 && spec.var_reduction == 4.0 && spec.model_bias == 0.4 &&
                    spec.var_inflation == 1.8 && spec.sampler.n_samples == 5000 &&
                    spec.sampler.schedule.steps == 200 &&
                    spec.sampler.schedule.sigma_init == 80.0 &&
                    spec.sampler.schedule.sigma_final == 0.005 && spec.strategies.size() == 3 &&
                    spec.strategies[0].kind == GuidanceStrategy::Kind::NoGuidance &&
                    spec.strategies[1].kind == GuidanceStrategy::Kind::TcCfg &&
                    spec.strategies[1].guidance_scale == 1e4 &&
                    spec.strategies[2].kind == GuidanceStrategy::Kind::ScoreAverage &&
                    spec.strategies[2].alpha == 0.5;
    if (!ok) detail = "a field deviates from the reference table";
    return ok;
}

bool criterion_derived_parameters(std::string& detail) {
    const ScenarioSpec spec = build_appendix_scenario();
    const GaussianComponent truth = derive_true_enhanced(spec);
    const GaussianComponent model = derive_enhancement_model(spec);

    if (truth.mean != -2.0 || truth.std_dev != 0.225) {
        detail = "true enhanced != N(-2.0, 0.225^2) exactly";
        return false;
    }
    // formula equality, bit for bit
    if (model.mean != spec.tts_prior.component(0).mean + spec.delta_mu + spec.model_bias ||
        model.std_dev !=
            spec.var_inflation * spec.tts_prior.component(0).std_dev / spec.var_reduction) {
        detail = "enhancement model deviates from its defining formula";
        return false;
    }
    if (!within(model.mean, -1.6, 1e-12) || !within(model.std_dev, 0.405, 1e-12)) {
        detail = "enhancement model != N(-1.6, 0.405^2)";
        return false;
    }
    // the table's rounded presentation
    if (std::round(model.mean * 10.0) / 10.0 != -1.6 ||
        std::round(model.std_dev * 100.0) / 100.0 != 0.41) {
        detail = "rounded values do not match the printed table";
        return false;
    }
    return true;
}

bool criterion_no_guidance_moments(std::string& detail) {
    double mean = 0.0, sd = 0.0;
    for (const SeedRun& run : appendix_runs()) {
        mean += run.no_guidance.mean / 3.0;
        sd += run.no_guidance.std_dev / 3.0;
    }
    std::ostringstream msg;
    msg << "seed-averaged mean " << mean << " (target -1.6 +- 0.05), std " << sd
        << " (target 0.405 +- 0.03)";
    detail = msg.str();
    return within(mean, -1.6, 0.05) && within(sd, 0.405, 0.03);
}

bool criterion_kl_ordering(std::string& detail) {
    // Windows frozen from the dense-step reference (T=4000, seeds 1-3):
    // no_guidance KL 1.99-2.11, tc_cfg 0.35-0.41, score_average 2.90-3.01,
    // with T=200 discretization shifting each up by < 0.15.
    int seed = 0;
    for (const SeedRun& run : appendix_runs()) {
        ++seed;
        const double ng = run.no_guidance.kl_binned;
        const double tc = run.tc_cfg.kl_binned;
        const double sa = run.score_average.kl_binned;
        std::ostringstream msg;
        msg << "seed " << seed << ": kl no_guidance=" << ng << " tc_cfg=" << tc
            << " score_average=" << sa;
        detail = msg.str();
        if (!(tc < ng && tc < sa)) return false;
        if (!(run.score_average.std_dev > run.no_guidance.std_dev)) {
            detail += " (score_average std not larger)";
            return false;
        }
        if (!(tc > 0.25 && tc < 0.65 && ng > 1.8 && ng < 2.6 && sa > 2.6 && sa < 3.5)) {
            detail += " (outside the dense-reference regression windows)";
            return false;
        }
    }
    detail.clear();
    return true;
}

bool criterion_exact_score_sampler(std::string& detail) {
    // Seed-averaging protocol: metrics averaged over seeds {1,2,3}, errors
    // taken on the averages. Note the mean estimate carries no step-size
    // bias (the linear-score Euler recursion telescopes exactly), so the
    // strict mean-error reduction below compares Monte Carlo noise; it is
    // kept as specified.
    const auto errors = [](int steps) {
        double mean = 0.0, sd = 0.0;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            SamplerConfig cfg;
            cfg.schedule.kind = ScheduleKind::VeLogLinear;
            cfg.schedule.steps = steps;
            cfg.schedule.sigma_init = 80.0;
            cfg.schedule.sigma_final = 0.005;
            cfg.n_samples = 5000;
            cfg.master_seed = seed;
            const SampleBatch batch = ve_reverse_sample(
                [](double x, double sigma) {
                    return -(x + 2.0) / (0.225 * 0.225 + sigma * sigma);
                },
                cfg);
            const auto [m, s] = moments(batch.values);
            mean += m / 3.0;
            sd += s / 3.0;
        }
        return std::pair{std::abs(mean - (-2.0)), std::abs(sd - 0.225)};
    };
    const auto [mean200, sd200] = errors(200);
    const auto [mean400, sd400] = errors(400);
    std::ostringstream msg;
    msg << "seed-averaged errors at T=200: mean " << mean200 << ", std " << sd200
        << "; at T=400: mean " << mean400 << ", std " << sd400;
    detail = msg.str();
    if (!(mean200 <= 0.05 && sd200 <= 0.02)) return false;
    return mean400 < mean200 && sd400 < sd200;
}

bool criterion_guidance_identity(std::string& detail) {
    const ScenarioSpec spec = build_appendix_scenario();
    const ScoreFn via_cfg = make_total_score(spec, GuidanceStrategy::make_tc_cfg(1e4));
    const ScoreFn via_posterior =
        make_total_score(spec, GuidanceStrategy::make_analytic_posterior(1e4));
    const double log_lo = std::log(0.005), log_hi = std::log(80.0);
    for (int ix = 0; ix < 40; ++ix) {
        const double x = -10.0 + 20.0 * ix / 39.0;
        for (int is = 0; is < 25; ++is) {
            const double sigma = std::exp(log_lo + (log_hi - log_lo) * is / 24.0);
            const double a = via_cfg(x, sigma);
            const double b = via_posterior(x, sigma);
            if (std::abs(a - b) > 1e-10) {
                std::ostringstream msg;
                msg << "mismatch " << std::abs(a - b) << " at x=" << x << " sigma=" << sigma;
                detail = msg.str();
                return false;
            }
        }
    }
    return true;
}

bool criterion_mixture_suites(std::string& detail) {
    const Gmm1D prior = build_appendix_scenario().tts_prior;

    // mixture score identity to 1e-10
    for (double sigma : {0.005, 0.1, 0.6325, 2.0, 80.0}) {
        const Gmm1D diffused = diffuse_ve(prior, sigma);
        for (double x = -10.0; x <= 10.0; x += 0.5) {
            const auto post = component_posterior(prior, x, sigma);
            double mix = 0.0;
            for (std::size_t k = 0; k < prior.size(); ++k) {
                mix += post.probabilities[k] * conditional_score(prior, x, sigma, k);
            }
            if (std::abs(score(diffused, x) - mix) > 1e-10) {
                detail = "mixture score identity violated";
                return false;
            }
        }
    }

    // finite differences of the log density wherever it is representable
    for (double sigma : {0.1, 0.5, 2.0}) {
        const Gmm1D diffused = diffuse_ve(prior, sigma);
        for (double x = -8.0; x <= 8.0; x += 0.25) {
            if (std::abs(log_density(diffused, x)) >= 50.0) continue;
            const double h = 1e-5;
            const double fd = (log_density(diffused, x + h) - log_density(diffused, x - h)) /
                              (2.0 * h);
            const double s = score(diffused, x);
            if (std::abs(s - fd) > 1e-6 * std::max({std::abs(s), std::abs(fd), 1e-3})) {
                std::ostringstream msg;
                msg << "finite-difference mismatch at x=" << x << " sigma=" << sigma;
                detail = msg.str();
                return false;
            }
        }
    }

    // trapezoid convolution oracle on [-12, 12]
    const double sigma = 0.6325;
    const Gmm1D diffused = diffuse_ve(prior, sigma);
    for (double x = -12.0; x <= 12.0; x += 2.0) {
        const int n = 300001;
        const double lo = -30.0, hi = 30.0;
        const double step = (hi - lo) / (n - 1);
        double quad = 0.0;
        for (int i = 0; i < n; ++i) {
            const double y = lo + i * step;
            double base = 0.0;
            for (const auto& c : prior.components()) {
                const double d = y - c.mean;
                base += c.weight *
                        std::exp(-0.5 * d * d / (c.std_dev * c.std_dev)) /
                        (c.std_dev * std::sqrt(2.0 * 3.14159265358979323846));
            }
            const double dz = x - y;
            const double kernel = std::exp(-0.5 * dz * dz / (sigma * sigma)) /
                                  (sigma * std::sqrt(2.0 * 3.14159265358979323846));
            const double f = base * kernel;
            quad += (i == 0 || i == n - 1) ? 0.5 * f : f;
        }
        quad *= step;
        if (std::abs(std::exp(log_density(diffused, x)) - quad) > 1e-6) {
            std::ostringstream msg;
            msg << "convolution mismatch at x=" << x;
            detail = msg.str();
            return false;
        }
    }
    return true;
}

bool criterion_velocity_schedules(std::string& detail) {
    RandomStream rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const NoiseLevel level = vp_shifted_cosine(rng.next_double(), 0.5);
        const double x = 5.0 * rng.next_normal();
        const double eps = rng.next_normal();
        const double z = level.alpha * x + level.sigma * eps;
        const double v = velocity_from(x, eps, level);
        if (std::abs(x_from_velocity(z, v, level) - x) > 1e-12 ||
            std::abs(eps_from_velocity(z, v, level) - eps) > 1e-12) {
            detail = "velocity round-trip exceeded 1e-12";
            return false;
        }
    }

    ScheduleSpec ve;
    ve.kind = ScheduleKind::VeLogLinear;
    ve.steps = 200;
    ve.sigma_init = 80.0;
    ve.sigma_final = 0.005;
    const auto sigmas = ve_log_linear(ve);
    if (sigmas.front() != 80.0 || sigmas.back() != 0.005) {
        detail = "VE endpoints not exact";
        return false;
    }

    if (!within(vp_shifted_cosine(kVpClampEps, 0.5).alpha, 1.0, 1e-3) ||
        !within(vp_shifted_cosine(1.0 - kVpClampEps, 0.5).alpha, 0.0, 1e-3)) {
        detail = "VP shifted-cosine boundaries off";
        return false;
    }

    ScheduleSpec lin;
    lin.kind = ScheduleKind::LogSnrLinear;
    lin.steps = 256;
    lin.logsnr_min = -8.0;
    lin.logsnr_max = 10.0;
    const auto levels = logsnr_linear_schedule(lin);
    const double delta = 18.0 / 256.0;
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (std::abs(logsnr(levels[i]) - logsnr(levels[i - 1]) - delta) > 1e-12) {
            detail = "logSNR deltas not constant to 1e-12";
            return false;
        }
    }
    return true;
}

bool criterion_dsm_minimality(std::string& detail) {
    const Gmm1D bimodal = build_appendix_scenario().tts_prior;
    const Gmm1D single = Gmm1D::single(-2.0, 0.225);
    const Gmm1D skew =
        Gmm1D({GaussianComponent{-1.0, 0.3, 0.2}, GaussianComponent{0.5, 1.2, 0.8}});
    for (const Gmm1D* target : {&bimodal, &single, &skew}) {
        for (double sigma : {0.1, 1.0, 10.0}) {
            const Gmm1D diffused = diffuse_ve(*target, sigma);
            const auto exact = [&](double z) { return score(diffused, z); };
            const NoiseLevel level = NoiseLevel::ve(sigma);
            RandomStream r0(77), r5(77), r10(77);
            const double l0 = dsm_loss(exact, *target, level, 100000, r0);
            const double l5 =
                dsm_loss([&](double z) { return exact(z) + 0.5; }, *target, level, 100000, r5);
            const double l10 =
                dsm_loss([&](double z) { return exact(z) + 1.0; }, *target, level, 100000, r10);
            if (!(l0 < l5 && l0 < l10)) {
                std::ostringstream msg;
                msg << "exact score not minimal at sigma=" << sigma;
                detail = msg.str();
                return false;
            }
        }
    }
    return true;
}

int run_command(const std::string& cmd) {
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

// Summary files modulo the wall-clock field, which is the one legitimately
// run-dependent output.
std::string strip_wall_time(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("wall_time_ms") == std::string::npos) out << line << "\n";
    }
    return out.str();
}

bool criterion_cli_determinism(std::string& detail) {
    if (g_cli_path.empty()) {
        detail = "no CLI path supplied (argv[1])";
        return false;
    }
    const fs::path base = fs::temp_directory_path() / "scorecompose_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);

    const std::string common = " simulate --appendix-defaults --seed 1 -o ";
    struct Variant {
        std::string env;
        std::string dir;
    };
    const std::vector<Variant> variants = {
        {"", (base / "run_a").string()},
        {"", (base / "run_b").string()},
        {"SCORECOMPOSE_THREADS=1 ", (base / "thr_1").string()},
        {"SCORECOMPOSE_THREADS=4 ", (base / "thr_4").string()},
    };
    for (const auto& v : variants) {
        const std::string cmd = v.env + g_cli_path + common + v.dir + " > /dev/null 2>&1";
        if (run_command(cmd) != 0) {
            detail = "CLI run failed: " + cmd;
            return false;
        }
    }
    for (const std::string name : {"no_guidance", "tc_cfg", "score_average"}) {
        const std::string samples = slurp(fs::path(variants[0].dir) / (name + "_samples.csv"));
        const std::string histogram =
            slurp(fs::path(variants[0].dir) / (name + "_histogram.csv"));
        const std::string summary =
            strip_wall_time(slurp(fs::path(variants[0].dir) / (name + "_summary.json")));
        if (samples.empty()) {
            detail = "missing samples CSV for " + name;
            return false;
        }
        for (std::size_t i = 1; i < variants.size(); ++i) {
            const fs::path dir = variants[i].dir;
            if (slurp(dir / (name + "_samples.csv")) != samples ||
                slurp(dir / (name + "_histogram.csv")) != histogram ||
                strip_wall_time(slurp(dir / (name + "_summary.json"))) != summary) {
                detail = "outputs differ for " + name + " in " + variants[i].dir;
                return false;
            }
        }
    }
    fs::remove_all(base);
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    const std::vector<Criterion> criteria = {
        {"appendix-table reproduction", 1.0, criterion_appendix_table},
        {"derived-parameter checks", 1.0, criterion_derived_parameters},
        {"no-guidance moment reproduction", 10.0, criterion_no_guidance_moments},
        {"guidance KL ordering and smearing", 30.0, criterion_kl_ordering},
        {"exact-score sampler sanity", 20.0, criterion_exact_score_sampler},
        {"composed-score route identity", 1.0, criterion_guidance_identity},
        {"mixture-score / finite-difference / convolution suites", 5.0, criterion_mixture_suites},
        {"velocity and schedule suites", 2.0, criterion_velocity_schedules},
        {"DSM minimality", 10.0, criterion_dsm_minimality},
        {"CLI determinism across runs and worker counts", 20.0, criterion_cli_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > criteria[i].time_limit_s) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("exceeded time limit");
        }
        std::printf("%s %2zu. %s [%.2fs]\n", ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].name.c_str(), elapsed);
        if (!ok) {
            ++failures;
            if (!detail.empty()) std::printf("      %s\n", detail.c_str());
        }
    }
    if (failures > 0) {
        std::printf("%d of %zu acceptance criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
    return 0;
}

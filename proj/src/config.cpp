#include "scorecompose/config.hpp"

#include <algorithm>
#include <initializer_list>

#include <json.hpp>

namespace scorecompose {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const char* context,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) {
            return item.key() == k;
        });
        if (!known) {
            throw ConfigError(std::string("unknown key '") + item.key() + "' in " + context);
        }
    }
}

const json& require(const json& obj, const char* key, const char* context) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError(std::string("missing key '") + key + "' in " + context);
    }
    return *it;
}

double as_number(const json& v, const char* key) {
    if (!v.is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
    return v.get<double>();
}

std::vector<double> as_number_array(const json& v, const char* key) {
    if (!v.is_array()) throw ConfigError(std::string("key '") + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(as_number(e, key));
    return out;
}

Gmm1D parse_prior(const json& v) {
    if (!v.is_object()) throw ConfigError("key 'tts_prior' must be an object");
    reject_unknown_keys(v, "tts_prior", {"means", "stds", "weights"});
    const auto means = as_number_array(require(v, "means", "tts_prior"), "means");
    const auto stds = as_number_array(require(v, "stds", "tts_prior"), "stds");
    const auto weights = as_number_array(require(v, "weights", "tts_prior"), "weights");
    if (means.size() != stds.size() || means.size() != weights.size() || means.empty()) {
        throw ConfigError("tts_prior arrays 'means', 'stds', 'weights' must match and be non-empty");
    }
    std::vector<GaussianComponent> comps;
    comps.reserve(means.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        comps.push_back(GaussianComponent{means[i], stds[i], weights[i]});
    }
    try {
        return Gmm1D(std::move(comps));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid tts_prior: ") + e.what());
    }
}

GuidanceStrategy parse_strategy(const json& v, std::size_t index) {
    const std::string context = "strategies[" + std::to_string(index) + "]";
    if (!v.is_object()) throw ConfigError(context + " must be an object");
    const json& kind_v = require(v, "kind", context.c_str());
    if (!kind_v.is_string()) throw ConfigError("key 'kind' must be a string");
    const std::string kind = kind_v.get<std::string>();

    try {
        if (kind == "no_guidance") {
            reject_unknown_keys(v, context.c_str(), {"kind"});
            return GuidanceStrategy::none();
        }
        if (kind == "score_average") {
            reject_unknown_keys(v, context.c_str(), {"kind", "alpha"});
            return GuidanceStrategy::make_score_average(
                as_number(require(v, "alpha", context.c_str()), "alpha"));
        }
        if (kind == "tc_cfg" || kind == "analytic_posterior") {
            reject_unknown_keys(v, context.c_str(),
                                {"kind", "guidance_scale", "gate_logsnr_threshold"});
            std::optional<LogSnrGate> gate;
            if (auto it = v.find("gate_logsnr_threshold"); it != v.end()) {
                gate = LogSnrGate{as_number(*it, "gate_logsnr_threshold"), true};
            }
            const double scale =
                as_number(require(v, "guidance_scale", context.c_str()), "guidance_scale");
            return kind == "tc_cfg" ? GuidanceStrategy::make_tc_cfg(scale, gate)
                                    : GuidanceStrategy::make_analytic_posterior(scale, gate);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(context + ": " + e.what());
    }
    throw ConfigError(context + ": unknown strategy kind '" + kind + "'");
}

SamplerConfig parse_sampler(const json& v) {
    if (!v.is_object()) throw ConfigError("key 'sampler' must be an object");
    reject_unknown_keys(v, "sampler",
                        {"n_samples", "steps", "sigma_init", "sigma_final", "master_seed",
                         "record_trajectories", "terminal_noise"});
    SamplerConfig cfg;
    cfg.schedule.kind = ScheduleKind::VeLogLinear;
    const double n = as_number(require(v, "n_samples", "sampler"), "n_samples");
    if (n < 1 || n != std::floor(n)) throw ConfigError("key 'n_samples' must be a positive integer");
    cfg.n_samples = static_cast<int>(n);
    const double steps = as_number(require(v, "steps", "sampler"), "steps");
    if (steps < 2 || steps != std::floor(steps)) {
        throw ConfigError("key 'steps' must be an integer >= 2");
    }
    cfg.schedule.steps = static_cast<int>(steps);
    cfg.schedule.sigma_init = as_number(require(v, "sigma_init", "sampler"), "sigma_init");
    cfg.schedule.sigma_final = as_number(require(v, "sigma_final", "sampler"), "sigma_final");
    if (!(cfg.schedule.sigma_init > cfg.schedule.sigma_final) || !(cfg.schedule.sigma_final > 0)) {
        throw ConfigError("sampler requires sigma_init > sigma_final > 0");
    }
    if (auto it = v.find("master_seed"); it != v.end()) {
        if (!it->is_number_unsigned()) {
            throw ConfigError("key 'master_seed' must be a non-negative integer");
        }
        cfg.master_seed = it->get<std::uint64_t>();
    }
    if (auto it = v.find("record_trajectories"); it != v.end()) {
        if (!it->is_boolean()) throw ConfigError("key 'record_trajectories' must be a boolean");
        cfg.record_trajectories = it->get<bool>();
    }
    if (auto it = v.find("terminal_noise"); it != v.end()) {
        if (!it->is_boolean()) throw ConfigError("key 'terminal_noise' must be a boolean");
        cfg.terminal_noise = it->get<bool>();
    }
    return cfg;
}

OutputFormat parse_format(const std::string& name) {
    if (name == "summary-json") return OutputFormat::SummaryJson;
    if (name == "samples-csv") return OutputFormat::SamplesCsv;
    if (name == "histogram-csv") return OutputFormat::HistogramCsv;
    if (name == "trajectories-csv") return OutputFormat::TrajectoriesCsv;
    throw ConfigError("unknown output format '" + name + "'");
}

json strategy_to_json(const GuidanceStrategy& s) {
    json v;
    v["kind"] = std::string(s.name());
    switch (s.kind) {
        case GuidanceStrategy::Kind::ScoreAverage:
            v["alpha"] = s.alpha;
            break;
        case GuidanceStrategy::Kind::TcCfg:
        case GuidanceStrategy::Kind::AnalyticPosterior:
            v["guidance_scale"] = s.guidance_scale;
            if (s.gate) v["gate_logsnr_threshold"] = s.gate->threshold;
            break;
        case GuidanceStrategy::Kind::NoGuidance:
            break;
    }
    return v;
}

}  // namespace

std::string_view format_name(OutputFormat format) noexcept {
    switch (format) {
        case OutputFormat::SummaryJson: return "summary-json";
        case OutputFormat::SamplesCsv: return "samples-csv";
        case OutputFormat::HistogramCsv: return "histogram-csv";
        case OutputFormat::TrajectoriesCsv: return "trajectories-csv";
    }
    return "unknown";
}

RunConfig appendix_run_config() {
    RunConfig config;
    config.scenario = build_appendix_scenario();
    return config;
}

RunConfig parse_run_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(doc, "config",
                        {"tts_prior", "target_component", "delta_mu", "var_reduction",
                         "model_bias", "var_inflation", "sampler", "strategies", "output_dir",
                         "formats"});

    RunConfig config;
    ScenarioSpec& spec = config.scenario;
    spec.tts_prior = parse_prior(require(doc, "tts_prior", "config"));

    const double target = as_number(require(doc, "target_component", "config"), "target_component");
    if (target < 0 || target != std::floor(target) ||
        target >= static_cast<double>(spec.tts_prior.size())) {
        throw ConfigError("key 'target_component' must be a valid component index");
    }
    spec.target_component = static_cast<std::size_t>(target);
    spec.delta_mu = as_number(require(doc, "delta_mu", "config"), "delta_mu");
    spec.var_reduction = as_number(require(doc, "var_reduction", "config"), "var_reduction");
    spec.model_bias = as_number(require(doc, "model_bias", "config"), "model_bias");
    spec.var_inflation = as_number(require(doc, "var_inflation", "config"), "var_inflation");
    if (!(spec.var_reduction >= 1.0)) throw ConfigError("key 'var_reduction' must be >= 1");
    if (!(spec.var_inflation > 0.0)) throw ConfigError("key 'var_inflation' must be > 0");
    spec.sampler = parse_sampler(require(doc, "sampler", "config"));

    const json& strategies = require(doc, "strategies", "config");
    if (!strategies.is_array() || strategies.empty()) {
        throw ConfigError("key 'strategies' must be a non-empty array");
    }
    spec.strategies.clear();
    for (std::size_t i = 0; i < strategies.size(); ++i) {
        spec.strategies.push_back(parse_strategy(strategies[i], i));
    }

    if (auto it = doc.find("output_dir"); it != doc.end()) {
        if (!it->is_string()) throw ConfigError("key 'output_dir' must be a string");
        config.output_dir = it->get<std::string>();
    }
    if (auto it = doc.find("formats"); it != doc.end()) {
        if (!it->is_array()) throw ConfigError("key 'formats' must be an array of strings");
        config.formats.clear();
        for (const auto& f : *it) {
            if (!f.is_string()) throw ConfigError("key 'formats' must be an array of strings");
            config.formats.push_back(parse_format(f.get<std::string>()));
        }
    }
    return config;
}

std::string serialize_run_config(const RunConfig& config) {
    const ScenarioSpec& spec = config.scenario;
    json doc;
    json prior;
    for (const auto& c : spec.tts_prior.components()) {
        prior["means"].push_back(c.mean);
        prior["stds"].push_back(c.std_dev);
        prior["weights"].push_back(c.weight);
    }
    doc["tts_prior"] = prior;
    doc["target_component"] = spec.target_component;
    doc["delta_mu"] = spec.delta_mu;
    doc["var_reduction"] = spec.var_reduction;
    doc["model_bias"] = spec.model_bias;
    doc["var_inflation"] = spec.var_inflation;
    doc["sampler"] = {{"n_samples", spec.sampler.n_samples},
                      {"steps", spec.sampler.schedule.steps},
                      {"sigma_init", spec.sampler.schedule.sigma_init},
                      {"sigma_final", spec.sampler.schedule.sigma_final},
                      {"master_seed", spec.sampler.master_seed},
                      {"record_trajectories", spec.sampler.record_trajectories},
                      {"terminal_noise", spec.sampler.terminal_noise}};
    doc["strategies"] = json::array();
    for (const auto& s : spec.strategies) doc["strategies"].push_back(strategy_to_json(s));
    doc["output_dir"] = config.output_dir;
    doc["formats"] = json::array();
    for (OutputFormat f : config.formats) doc["formats"].push_back(std::string(format_name(f)));
    return doc.dump(2) + "\n";
}

}  // namespace scorecompose

#include "geoadapt/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>

#include "geoadapt/errors.hpp"

namespace geoadapt::config {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
        --e;
    return std::string(s.substr(b, e - b));
}

double parse_double(std::string_view key, std::string_view value) {
    const std::string v = trim(value);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ParseError("config key '" + std::string(key) +
                         "' expects a number, got '" + v + "'");
    }
}

long long parse_int(std::string_view key, std::string_view value) {
    const std::string v = trim(value);
    try {
        std::size_t used = 0;
        const long long n = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return n;
    } catch (const std::exception&) {
        throw ParseError("config key '" + std::string(key) +
                         "' expects an integer, got '" + v + "'");
    }
}

bool parse_bool(std::string_view key, std::string_view value) {
    const std::string v = trim(value);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError("config key '" + std::string(key) +
                     "' expects true/false, got '" + v + "'");
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct Field {
    std::function<void(RunConfig&, std::string_view, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Field, std::less<>>& field_table() {
    static const auto* table = [] {
        auto* m = new std::map<std::string, Field, std::less<>>();
        auto add_double = [m](const char* key, double RunConfig::* member) {
            (*m)[key] = {[member](RunConfig& c, std::string_view k,
                                  std::string_view v) {
                             c.*member = parse_double(k, v);
                         },
                         [member](const RunConfig& c) {
                             return format_double(c.*member);
                         }};
        };
        auto add_int = [m](const char* key, int RunConfig::* member) {
            (*m)[key] = {[member](RunConfig& c, std::string_view k,
                                  std::string_view v) {
                             c.*member = static_cast<int>(parse_int(k, v));
                         },
                         [member](const RunConfig& c) {
                             return std::to_string(c.*member);
                         }};
        };
        auto add_bool = [m](const char* key, bool RunConfig::* member) {
            (*m)[key] = {[member](RunConfig& c, std::string_view k,
                                  std::string_view v) {
                             c.*member = parse_bool(k, v);
                         },
                         [member](const RunConfig& c) {
                             return c.*member ? "true" : "false";
                         }};
        };
        auto add_string = [m](const char* key,
                              std::string RunConfig::* member) {
            (*m)[key] = {[member](RunConfig& c, std::string_view,
                                  std::string_view v) { c.*member = trim(v); },
                         [member](const RunConfig& c) { return c.*member; }};
        };

        add_double("gamma1", &RunConfig::gamma1);
        add_double("gamma2", &RunConfig::gamma2);
        add_double("alpha", &RunConfig::alpha);
        add_double("tau_margin", &RunConfig::tau_margin);
        add_double("w1", &RunConfig::w1);
        add_double("w2", &RunConfig::w2);
        add_double("lambda1", &RunConfig::lambda1);
        add_double("lambda2", &RunConfig::lambda2);
        add_double("sigma", &RunConfig::sigma);
        add_double("step_threshold", &RunConfig::step_threshold);
        add_int("min_support", &RunConfig::min_support);
        add_int("group_size", &RunConfig::group_size);
        add_double("clip_ratio", &RunConfig::clip_ratio);
        add_double("kl_coeff_stage1", &RunConfig::kl_coeff_stage1);
        add_double("kl_coeff_stage2", &RunConfig::kl_coeff_stage2);
        add_double("learning_rate", &RunConfig::learning_rate);
        add_double("advantage_eps", &RunConfig::advantage_eps);
        add_bool("normalize_std", &RunConfig::normalize_std);
        add_int("stage1_epochs", &RunConfig::stage1_epochs);
        add_int("stage2_epochs", &RunConfig::stage2_epochs);
        (*m)["seed"] = {[](RunConfig& c, std::string_view k,
                           std::string_view v) {
                            c.seed = static_cast<std::uint64_t>(parse_int(k, v));
                        },
                        [](const RunConfig& c) { return std::to_string(c.seed); }};
        add_int("world_images", &RunConfig::world_images);
        add_int("world_countries", &RunConfig::world_countries);
        add_int("world_cities_per_country",
                &RunConfig::world_cities_per_country);
        add_double("world_feature_scale", &RunConfig::world_feature_scale);
        add_double("world_noise", &RunConfig::world_noise);
        add_double("world_holdout_fraction", &RunConfig::world_holdout_fraction);
        add_double("world_deep_fraction", &RunConfig::world_deep_fraction);
        add_string("dataset_in", &RunConfig::dataset_in);
        add_string("dataset_out", &RunConfig::dataset_out);
        add_string("standard_out", &RunConfig::standard_out);
        add_string("rag_superior_out", &RunConfig::rag_superior_out);
        add_string("summary_out", &RunConfig::summary_out);
        add_string("predictions_in", &RunConfig::predictions_in);
        add_string("rewards_out", &RunConfig::rewards_out);
        add_string("grounding_table", &RunConfig::grounding_table);
        add_string("alias_table", &RunConfig::alias_table);
        add_string("trace_out", &RunConfig::trace_out);
        add_string("policy_out", &RunConfig::policy_out);
        add_string("report_in", &RunConfig::report_in);
        add_string("report_out", &RunConfig::report_out);
        add_string("plot_out", &RunConfig::plot_out);
        add_string("report_format", &RunConfig::report_format);
        add_bool("lenient", &RunConfig::lenient);
        add_bool("plot", &RunConfig::plot);
        return m;
    }();
    return *table;
}

}  // namespace

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 'key = value'");
        }
        try {
            set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
        } catch (const Error& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " +
                             e.what());
        }
    }
}

void RunConfig::set(std::string_view key, std::string_view value) {
    const auto& table = field_table();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw ParseError("unknown config key '" + std::string(key) + "'");
    }
    it->second.set(*this, key, value);
}

std::string RunConfig::get(std::string_view key) const {
    const auto& table = field_table();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw ParseError("unknown config key '" + std::string(key) + "'");
    }
    return it->second.get(*this);
}

std::vector<std::string> RunConfig::keys() {
    std::vector<std::string> out;
    for (const auto& [k, f] : field_table()) out.push_back(k);
    return out;
}

void RunConfig::check() const {
    locatability::validate(locatability_params());
    rewards::validate(reward_params());
    grpo::validate(curriculum_config().grpo);
    if (!(step_threshold >= 0.0 && step_threshold <= 1.0)) {
        throw ValidationError("step_threshold must lie in [0, 1]");
    }
    if (min_support < 1) {
        throw ValidationError("min_support must be at least 1");
    }
    if (stage1_epochs < 0 || stage2_epochs < 0) {
        throw ValidationError("epoch counts must be non-negative");
    }
    if (!(kl_coeff_stage2 >= 0.0)) {
        throw ValidationError("kl_coeff_stage2 must be non-negative");
    }
}

locatability::LocatabilityParams RunConfig::locatability_params() const {
    return {gamma1, gamma2, alpha, tau_margin};
}

rewards::RewardParams RunConfig::reward_params() const {
    return {w1, w2, lambda1, lambda2, sigma};
}

grpo::CurriculumConfig RunConfig::curriculum_config() const {
    grpo::CurriculumConfig cfg;
    cfg.grpo.group_size = group_size;
    cfg.grpo.clip_ratio = clip_ratio;
    cfg.grpo.kl_coeff = kl_coeff_stage1;
    cfg.grpo.learning_rate = learning_rate;
    cfg.grpo.advantage_eps = advantage_eps;
    cfg.grpo.normalize_std = normalize_std;
    cfg.kl_coeff_stage2 = kl_coeff_stage2;
    cfg.stage1_epochs = stage1_epochs;
    cfg.stage2_epochs = stage2_epochs;
    cfg.seed = seed;
    return cfg;
}

world::WorldParams RunConfig::world_params() const {
    world::WorldParams p;
    p.num_images = world_images;
    p.countries = world_countries;
    p.cities_per_country = world_cities_per_country;
    p.feature_scale = world_feature_scale;
    p.noise = world_noise;
    p.holdout_fraction = world_holdout_fraction;
    p.deep_fraction = world_deep_fraction;
    p.seed = seed;
    return p;
}

}  // namespace geoadapt::config

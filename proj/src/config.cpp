#include "gridtwin/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "gridtwin/error.hpp"

namespace gridtwin {

namespace {

using nlohmann::json;

/// Reads the listed keys of an object, rejecting anything else.
class Section {
public:
    Section(const json& doc, std::string name) : doc_(doc), name_(std::move(name)) {
        if (!doc_.is_object()) throw ConfigError(fmt::format("config: '{}' must be an object", name_));
    }

    /// Call after the last get(): rejects keys nobody asked for.
    void done() const {
        for (const auto& [key, _] : doc_.items()) {
            if (!seen_.count(key)) throw ConfigError(fmt::format("config: unknown key '{}' in {}", key, name_));
        }
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        const auto it = doc_.find(key);
        if (it == doc_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(fmt::format("config: {}.{} has the wrong type", name_, key));
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        const auto it = doc_.find(key);
        return it == doc_.end() ? nullptr : &*it;
    }

private:
    const json& doc_;
    std::string name_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
}

}  // namespace

HarnessOptions RunConfig::harness_options() const {
    HarnessOptions h;
    h.redispatch = redispatch;
    h.jobs = jobs;
    h.cae_stride = cae_stride;
    h.activation_threshold_mw = activation_threshold_mw;
    return h;
}

RunConfig default_config() {
    RunConfig c;
    c.scenarios = {{"base", 1.0, true, true, true}, {"minus20", 0.8, true, false, true}, {"plus20", 1.2, true, false, true}};
    return c;
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    RunConfig c = default_config();
    Section top(doc, "config");

    const auto path = [&](const char* key, std::filesystem::path& out) {
        std::string text;
        top.get(key, text);
        if (text.empty()) return;
        out = std::filesystem::path(text);
        if (out.is_relative() && !base_dir.empty()) out = base_dir / out;
    };
    path("network", c.network);
    path("measurements", c.measurements);
    path("output", c.output);

    if (const json* j = top.child("limits")) {
        Section s(*j, "limits");
        s.get("v_min_pu", c.redispatch.limits.v_min_pu);
        s.get("v_max_pu", c.redispatch.limits.v_max_pu);
        s.get("loading_max_percent", c.redispatch.limits.loading_max_percent);
        s.done();
    }
    if (const json* j = top.child("weights")) {
        Section s(*j, "weights");
        s.get("w_p", c.redispatch.weights.w_p);
        s.get("w_q", c.redispatch.weights.w_q);
        s.done();
    }
    if (const json* j = top.child("power_factors")) {
        Section s(*j, "power_factors");
        s.get("load", c.power_factors.load);
        s.get("generation", c.power_factors.generation);
        s.done();
    }
    if (const json* j = top.child("power_flow")) {
        Section s(*j, "power_flow");
        s.get("tol_pu", c.redispatch.power_flow.tol_pu);
        s.get("max_iter", c.redispatch.power_flow.max_iter);
        s.done();
    }
    if (const json* j = top.child("optimizer")) {
        Section s(*j, "optimizer");
        s.get("tol", c.redispatch.optimizer.tol);
        s.get("constr_viol_tol", c.redispatch.optimizer.constr_viol_tol);
        s.get("max_iter", c.redispatch.optimizer.max_iter);
        s.get("mu_init", c.redispatch.optimizer.mu_init);
        s.get("feasibility_restoration", c.redispatch.optimizer.feasibility_restoration);
        s.done();
    }
    if (const json* j = top.child("redispatch")) {
        Section s(*j, "redispatch");
        s.get("p_bound_fraction", c.redispatch.p_bound_fraction);
        s.get("min_power_factor", c.redispatch.min_power_factor);
        s.get("branch_current_fraction", c.redispatch.branch_current_fraction);
        s.get("limit_margin_pu", c.redispatch.limit_margin_pu);
        s.get("verify_slack_tol_pu", c.redispatch.verify_slack_tol_pu);
        s.done();
    }
    std::string policy;
    top.get("gap_policy", policy);
    if (!policy.empty()) c.gap_policy = parse_gap_policy(policy);
    top.get("jobs", c.jobs);
    top.get("contingency_stride", c.cae_stride);
    top.get("activation_threshold_mw", c.activation_threshold_mw);

    if (const json* j = top.child("scenarios")) {
        require(j->is_array(), "scenarios must be an array");
        c.scenarios.clear();
        for (const auto& item : *j) {
            Section s(item, "scenario");
            Scenario sc;
            s.get("name", sc.name);
            s.get("load_scale", sc.load_scale);
            s.get("rsae", sc.rsae);
            s.get("cae", sc.cae);
            s.get("smfae", sc.smfae);
            s.done();
            c.scenarios.push_back(sc);
        }
    }
    top.done();
    validate_config(c, false);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config {} is not valid JSON: {}", path.string(), e.what()));
    }
    return parse_config(doc, path.parent_path());
}

void validate_config(const RunConfig& c, bool require_inputs) {
    c.redispatch.limits.validate();
    const auto& r = c.redispatch;
    require(r.weights.w_p > 0 && r.weights.w_q > 0, "weights must be positive");
    require(c.power_factors.load > 0 && c.power_factors.load <= 1, "power_factors.load must lie in (0, 1]");
    require(c.power_factors.generation > 0 && c.power_factors.generation <= 1,
            "power_factors.generation must lie in (0, 1]");
    require(r.power_flow.tol_pu > 0 && r.power_flow.tol_pu < 1e-2, "power_flow.tol_pu must lie in (0, 1e-2)");
    require(r.power_flow.max_iter >= 1 && r.power_flow.max_iter <= 1000, "power_flow.max_iter must lie in [1, 1000]");
    require(r.optimizer.tol > 0 && r.optimizer.constr_viol_tol > 0, "optimizer tolerances must be positive");
    require(r.optimizer.max_iter >= 1, "optimizer.max_iter must be at least 1");
    require(r.optimizer.mu_init > 0, "optimizer.mu_init must be positive");
    require(r.p_bound_fraction > 0 && r.p_bound_fraction <= 1, "redispatch.p_bound_fraction must lie in (0, 1]");
    require(r.min_power_factor > 0 && r.min_power_factor <= 1, "redispatch.min_power_factor must lie in (0, 1]");
    require(r.branch_current_fraction > 0 && r.branch_current_fraction <= 1,
            "redispatch.branch_current_fraction must lie in (0, 1]");
    require(r.limit_margin_pu >= 0 && r.limit_margin_pu < 1e-2, "redispatch.limit_margin_pu must lie in [0, 1e-2)");
    require(r.verify_slack_tol_pu > 0, "redispatch.verify_slack_tol_pu must be positive");
    require(c.jobs >= 1 && c.jobs <= 256, "jobs must lie in [1, 256]");
    require(c.cae_stride >= 1, "contingency_stride must be at least 1");
    require(c.activation_threshold_mw >= 0, "activation_threshold_mw must be non-negative");

    std::set<std::string> names;
    for (const auto& s : c.scenarios) {
        require(!s.name.empty(), "scenario without a name");
        for (char ch : s.name) {
            require(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_',
                    fmt::format("scenario name '{}' may only use letters, digits, '-' and '_'", s.name));
        }
        require(names.insert(s.name).second, fmt::format("duplicate scenario '{}'", s.name));
        require(s.load_scale > 0 && std::isfinite(s.load_scale), fmt::format("scenario {}: load_scale must be positive", s.name));
    }

    if (require_inputs) {
        require(!c.network.empty(), "no network path given");
        require(!c.measurements.empty(), "no measurements path given");
        require(std::filesystem::exists(c.network), fmt::format("network file {} does not exist", c.network.string()));
        require(std::filesystem::exists(c.measurements),
                fmt::format("measurements file {} does not exist", c.measurements.string()));
    }
}

nlohmann::json to_json(const RunConfig& c) {
    const auto& r = c.redispatch;
    json scenarios = json::array();
    for (const auto& s : c.scenarios) {
        scenarios.push_back(
            {{"name", s.name}, {"load_scale", s.load_scale}, {"rsae", s.rsae}, {"cae", s.cae}, {"smfae", s.smfae}});
    }
    return {
        {"network", c.network.string()},
        {"measurements", c.measurements.string()},
        {"output", c.output.string()},
        {"limits",
         {{"v_min_pu", r.limits.v_min_pu}, {"v_max_pu", r.limits.v_max_pu},
          {"loading_max_percent", r.limits.loading_max_percent}}},
        {"weights", {{"w_p", r.weights.w_p}, {"w_q", r.weights.w_q}}},
        {"power_factors", {{"load", c.power_factors.load}, {"generation", c.power_factors.generation}}},
        {"power_flow", {{"tol_pu", r.power_flow.tol_pu}, {"max_iter", r.power_flow.max_iter}}},
        {"optimizer",
         {{"tol", r.optimizer.tol}, {"constr_viol_tol", r.optimizer.constr_viol_tol},
          {"max_iter", r.optimizer.max_iter}, {"mu_init", r.optimizer.mu_init},
          {"feasibility_restoration", r.optimizer.feasibility_restoration}}},
        {"redispatch",
         {{"p_bound_fraction", r.p_bound_fraction}, {"min_power_factor", r.min_power_factor},
          {"branch_current_fraction", r.branch_current_fraction}, {"limit_margin_pu", r.limit_margin_pu},
          {"verify_slack_tol_pu", r.verify_slack_tol_pu}}},
        {"gap_policy", std::string(to_string(c.gap_policy))},
        {"jobs", c.jobs},
        {"contingency_stride", c.cae_stride},
        {"activation_threshold_mw", c.activation_threshold_mw},
        {"scenarios", scenarios},
    };
}

}  // namespace gridtwin

/*
 * Copyright (C) 2026 The opdyn authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "opdyn/config.hpp"
#include "opdyn/errors.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace opdyn
{

namespace
{

using json = nlohmann::json;

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        throw ConfigError((where.empty() ? "config" : where) + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k))
            throw ConfigError((where.empty() ? "" : where + ".") + k + ": unknown field");
}

std::string qualified(const std::string& where, const char* key)
{
    return where.empty() ? key : where + "." + key;
}

std::optional<long long> get_int(const json& obj, const std::string& where, const char* key)
{
    if (!obj.contains(key) || obj.at(key).is_null())
        return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(qualified(where, key) + ": expected an integer");
    return v.get<long long>();
}

int get_int(const json& obj, const std::string& where, const char* key, int def)
{
    const auto v = get_int(obj, where, key);
    if (!v)
        return def;
    if (*v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max())
        throw ConfigError(qualified(where, key) + ": out of range");
    return static_cast<int>(*v);
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool def)
{
    if (!obj.contains(key))
        return def;
    if (!obj.at(key).is_boolean())
        throw ConfigError(qualified(where, key) + ": expected true or false");
    return obj.at(key).get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key, std::string def)
{
    if (!obj.contains(key))
        return def;
    if (!obj.at(key).is_string())
        throw ConfigError(qualified(where, key) + ": expected a string");
    return obj.at(key).get<std::string>();
}

double get_double(const json& obj, const std::string& where, const char* key, double def)
{
    if (!obj.contains(key))
        return def;
    if (!obj.at(key).is_number())
        throw ConfigError(qualified(where, key) + ": expected a number");
    return obj.at(key).get<double>();
}

template <class Fn>
auto wrap(const std::string& field, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(field + ": " + e.what());
    }
}

Fraction fraction_of(const json& v, const std::string& field)
{
    if (v.is_string())
        return wrap(field, [&] { return Fraction::parse(v.get<std::string>()); });
    if (v.is_number())
        return wrap(field, [&] { return Fraction::parse(v.dump()); });
    throw ConfigError(field + ": expected a fraction such as \"1/3\" or 0.25");
}

InitialDistribution distribution_of(const json& v, const std::string& field)
{
    if (v.is_string())
        return wrap(field, [&] { return InitialDistribution::from_name(v.get<std::string>()); });
    check_keys(v, field, {"full", "partial", "no"});
    for (const char* k : {"full", "partial", "no"})
        if (!v.contains(k))
            throw ConfigError(field + "." + k + ": missing");
    auto d = InitialDistribution::custom(fraction_of(v.at("full"), field + ".full"),
                                         fraction_of(v.at("partial"), field + ".partial"),
                                         fraction_of(v.at("no"), field + ".no"));
    wrap(field, [&] { d.validate(); });
    return d;
}

json distribution_to_json(const InitialDistribution& d)
{
    if (d.name != DistributionName::Custom)
        return d.display_name();
    return {{"full", d.proportions[0].str()}, {"partial", d.proportions[1].str()}, {"no", d.proportions[2].str()}};
}

constexpr std::pair<const char*, SubjectRole> kRoles[] = {
    {"item_a", SubjectRole::ItemA},
    {"item_b", SubjectRole::ItemB},
    {"reason_a", SubjectRole::ReasonA},
    {"reason_b", SubjectRole::ReasonB},
};
constexpr std::pair<const char*, Connotation> kConnotations[] = {
    {"positive", Connotation::Positive},
    {"neutral", Connotation::Neutral},
    {"negative", Connotation::Negative},
};

Connotation connotation_field(const json& obj, const std::string& where, const char* key)
{
    return wrap(qualified(where, key), [&] { return connotation_from_code(get_int(obj, where, key, 0)); });
}

} // namespace

std::string_view to_string(BackendKind k)
{
    switch (k) {
    case BackendKind::Http:
        return "http";
    case BackendKind::Scripted:
        return "scripted";
    case BackendKind::Midpoint:
        return "midpoint";
    case BackendKind::Stubborn:
        return "stubborn";
    }
    return "http";
}

BackendKind backend_kind_from_string(std::string_view s)
{
    for (auto k : {BackendKind::Http, BackendKind::Scripted, BackendKind::Midpoint, BackendKind::Stubborn})
        if (s == to_string(k))
            return k;
    throw ConfigError("backend.kind: expected http, scripted, midpoint or stubborn, got '" + std::string(s) + "'");
}

ConnotationSetting parse_setting_label(const std::string& label)
{
    int v[4];
    char tail = 0;
    if (std::sscanf(label.c_str(), "[%d,%d][%d,%d]%c", &v[0], &v[1], &v[2], &v[3], &tail) != 4)
        throw ConfigError("connotation setting must look like [0,0][0,1], got '" + label + "'");
    ConnotationSetting s;
    s.item_a   = connotation_from_code(v[0]);
    s.item_b   = connotation_from_code(v[1]);
    s.reason_a = connotation_from_code(v[2]);
    s.reason_b = connotation_from_code(v[3]);
    return s;
}

void RunConfig::refresh_subject()
{
    sim.subject = make_subject(setting, text_values, strict_single_nonneutral);
}

void RunConfig::validate() const
{
    sim.validate();
    if (backend.retries < 0)
        throw ConfigError("backend.retries must be >= 0");
    if (backend.backoff_base_ms < 0)
        throw ConfigError("backend.backoff_base_ms must be >= 0");
    if (backend.timeout_s <= 0)
        throw ConfigError("backend.timeout_s must be positive");
    if (backend.fail_after && *backend.fail_after < 0)
        throw ConfigError("backend.fail_after must be >= 0");
    if (grid.distributions.empty() || grid.settings.empty())
        throw ConfigError("grid: distributions and settings must not be empty");
    for (const auto& s : grid.settings)
        make_subject(s, text_values, strict_single_nonneutral);
}

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "",
               {"mode", "with_memory", "n_agents", "n_rounds", "n_simulations", "distribution", "subject", "backend",
                "model_family", "seed", "strict_classification", "sequential_updates", "parallelism",
                "retry_trigger", "retry_case_sensitive", "max_option_reasks", "checkpoint_interval", "lexicon",
                "grid"});
    if (!j.contains("mode"))
        throw ConfigError("mode: missing (freeform or closedform)");
    if (!j.contains("backend"))
        throw ConfigError("backend: missing");

    RunConfig c;
    auto& s = c.sim;
    s.mode  = wrap("mode", [&] { return mode_from_string(get_string(j, "", "mode", "")); });
    s.with_memory   = get_bool(j, "", "with_memory", s.with_memory);
    s.n_agents      = get_int(j, "", "n_agents", s.n_agents);
    s.n_rounds      = get_int(j, "", "n_rounds", s.n_rounds);
    s.n_simulations = get_int(j, "", "n_simulations", s.n_simulations);
    if (j.contains("distribution"))
        s.distribution = distribution_of(j.at("distribution"), "distribution");
    s.model_family = wrap("model_family",
                          [&] { return model_family_from_string(get_string(j, "", "model_family", "generic")); });
    if (j.contains("seed")) {
        const auto& v = j.at("seed");
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
            throw ConfigError("seed: expected a non-negative integer");
        s.master_seed = v.get<std::uint64_t>();
    }
    s.strict_classification        = get_bool(j, "", "strict_classification", s.strict_classification);
    s.sequential_updates           = get_bool(j, "", "sequential_updates", s.sequential_updates);
    s.parallelism                  = get_int(j, "", "parallelism", s.parallelism);
    s.retry_rule.trigger           = get_string(j, "", "retry_trigger", s.retry_rule.trigger);
    s.retry_rule.case_sensitive    = get_bool(j, "", "retry_case_sensitive", s.retry_rule.case_sensitive);
    s.max_option_reasks            = get_int(j, "", "max_option_reasks", s.max_option_reasks);
    s.checkpoint_interval          = get_int(j, "", "checkpoint_interval", s.checkpoint_interval);

    if (j.contains("subject")) {
        const auto& sj = j.at("subject");
        check_keys(sj, "subject", {"item_a", "item_b", "reason_a", "reason_b", "strict_single_nonneutral", "text_values"});
        c.setting.item_a           = connotation_field(sj, "subject", "item_a");
        c.setting.item_b           = connotation_field(sj, "subject", "item_b");
        c.setting.reason_a         = connotation_field(sj, "subject", "reason_a");
        c.setting.reason_b         = connotation_field(sj, "subject", "reason_b");
        c.strict_single_nonneutral = get_bool(sj, "subject", "strict_single_nonneutral", true);
        if (sj.contains("text_values")) {
            const auto& tv = sj.at("text_values");
            check_keys(tv, "subject.text_values", {"item_a", "item_b", "reason_a", "reason_b"});
            for (const auto& [rname, role] : kRoles) {
                if (!tv.contains(rname))
                    continue;
                const auto where = std::string("subject.text_values.") + rname;
                check_keys(tv.at(rname), where, {"positive", "neutral", "negative"});
                for (const auto& [cname, conn] : kConnotations)
                    if (tv.at(rname).contains(cname))
                        wrap(where + "." + cname, [&, conn = conn, role = role, cname = cname] {
                            c.text_values.set(role, conn, get_string(tv.at(rname), where, cname, ""));
                        });
            }
        }
    }

    const auto& bj = j.at("backend");
    check_keys(bj, "backend",
               {"kind", "model", "temperature", "max_tokens", "base_url", "retries", "backoff_base_ms", "timeout_s",
                "cache_dir", "responses", "fail_after"});
    if (!bj.contains("kind"))
        throw ConfigError("backend.kind: missing");
    c.backend.kind = backend_kind_from_string(get_string(bj, "backend", "kind", ""));
    s.model_id     = get_string(bj, "backend", "model", "");
    s.temperature  = get_double(bj, "backend", "temperature", 0.0);
    if (auto v = get_int(bj, "backend", "max_tokens"))
        s.max_tokens = static_cast<int>(*v);
    c.backend.base_url        = get_string(bj, "backend", "base_url", "");
    c.backend.retries         = get_int(bj, "backend", "retries", c.backend.retries);
    c.backend.backoff_base_ms = get_int(bj, "backend", "backoff_base_ms", c.backend.backoff_base_ms);
    c.backend.timeout_s       = get_int(bj, "backend", "timeout_s", c.backend.timeout_s);
    c.backend.cache_dir       = get_string(bj, "backend", "cache_dir", "");
    if (!c.backend.cache_dir.empty() && std::filesystem::path(c.backend.cache_dir).is_relative())
        c.backend.cache_dir = (base_dir / c.backend.cache_dir).lexically_normal().string();
    if (bj.contains("responses")) {
        if (!bj.at("responses").is_array())
            throw ConfigError("backend.responses: expected a list of strings");
        for (const auto& r : bj.at("responses")) {
            if (!r.is_string())
                throw ConfigError("backend.responses: expected a list of strings");
            c.backend.responses.push_back(r.get<std::string>());
        }
    }
    if (auto v = get_int(bj, "backend", "fail_after"))
        c.backend.fail_after = static_cast<int>(*v);

    c.lexicon_path = get_string(j, "", "lexicon", "");
    if (!c.lexicon_path.empty() && std::filesystem::path(c.lexicon_path).is_relative())
        c.lexicon_path = (base_dir / c.lexicon_path).lexically_normal().string();

    if (j.contains("grid")) {
        const auto& gj = j.at("grid");
        check_keys(gj, "grid", {"distributions", "settings"});
        if (gj.contains("distributions")) {
            if (!gj.at("distributions").is_array())
                throw ConfigError("grid.distributions: expected a list");
            c.grid.distributions.clear();
            for (const auto& d : gj.at("distributions"))
                c.grid.distributions.push_back(distribution_of(d, "grid.distributions"));
        }
        if (gj.contains("settings")) {
            if (!gj.at("settings").is_array())
                throw ConfigError("grid.settings: expected a list");
            c.grid.settings.clear();
            for (const auto& v : gj.at("settings")) {
                if (!v.is_string())
                    throw ConfigError("grid.settings: expected labels such as \"[0,0][0,1]\"");
                c.grid.settings.push_back(wrap("grid.settings", [&] { return parse_setting_label(v.get<std::string>()); }));
            }
        }
    }

    wrap("subject", [&] { c.refresh_subject(); });
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::current_path());
}

std::string config_to_json(const RunConfig& c)
{
    const auto& s = c.sim;
    json tv;
    for (const auto& [rname, role] : kRoles)
        for (const auto& [cname, conn] : kConnotations)
            tv[rname][cname] = c.text_values.get(role, conn);

    json grid_d = json::array();
    for (const auto& d : c.grid.distributions)
        grid_d.push_back(distribution_to_json(d));
    json grid_s = json::array();
    for (const auto& st : c.grid.settings)
        grid_s.push_back(st.label());

    json j;
    j["mode"]          = std::string(to_string(s.mode));
    j["with_memory"]   = s.with_memory;
    j["n_agents"]      = s.n_agents;
    j["n_rounds"]      = s.n_rounds;
    j["n_simulations"] = s.n_simulations;
    j["distribution"]  = distribution_to_json(s.distribution);
    j["subject"]       = {{"item_a", code(c.setting.item_a)},
                          {"item_b", code(c.setting.item_b)},
                          {"reason_a", code(c.setting.reason_a)},
                          {"reason_b", code(c.setting.reason_b)},
                          {"strict_single_nonneutral", c.strict_single_nonneutral},
                          {"text_values", tv}};
    j["backend"]       = {{"kind", std::string(to_string(c.backend.kind))},
                          {"model", s.model_id},
                          {"temperature", s.temperature},
                          {"max_tokens", s.max_tokens ? json(*s.max_tokens) : json(nullptr)},
                          {"base_url", c.backend.base_url},
                          {"retries", c.backend.retries},
                          {"backoff_base_ms", c.backend.backoff_base_ms},
                          {"timeout_s", c.backend.timeout_s},
                          {"cache_dir", c.backend.cache_dir},
                          {"responses", c.backend.responses},
                          {"fail_after", c.backend.fail_after ? json(*c.backend.fail_after) : json(nullptr)}};
    j["model_family"]          = std::string(to_string(s.model_family));
    j["seed"]                  = s.master_seed;
    j["strict_classification"] = s.strict_classification;
    j["sequential_updates"]    = s.sequential_updates;
    j["parallelism"]           = s.parallelism;
    j["retry_trigger"]         = s.retry_rule.trigger;
    j["retry_case_sensitive"]  = s.retry_rule.case_sensitive;
    j["max_option_reasks"]     = s.max_option_reasks;
    j["checkpoint_interval"]   = s.checkpoint_interval;
    j["lexicon"]               = c.lexicon_path;
    j["grid"]                  = {{"distributions", grid_d}, {"settings", grid_s}};
    return j.dump(2);
}

std::shared_ptr<Backend> make_backend(const BackendSpec& spec)
{
    std::shared_ptr<Backend> b;
    switch (spec.kind) {
    case BackendKind::Http: {
        HttpEndpointConfig http;
        http.base_url     = spec.base_url;
        http.retries      = spec.retries;
        http.backoff_base = std::chrono::milliseconds(spec.backoff_base_ms);
        http.timeout      = std::chrono::seconds(spec.timeout_s);
        b                 = std::make_shared<HttpChatBackend>(http);
        break;
    }
    case BackendKind::Scripted:
        b = std::make_shared<ScriptedBackend>(spec.responses);
        break;
    case BackendKind::Midpoint:
        b = std::make_shared<MidpointOracle>();
        break;
    case BackendKind::Stubborn:
        b = std::make_shared<StubbornOracle>();
        break;
    }
    std::string cache_dir = spec.cache_dir;
    if (spec.kind == BackendKind::Http)
        if (const char* env = std::getenv("OPDYN_CACHE_DIR"); env && *env)
            cache_dir = env;
    if (!cache_dir.empty())
        b = std::make_shared<CachingBackend>(b, cache_dir);
    if (spec.fail_after)
        b = std::make_shared<FaultInjectingBackend>(b, *spec.fail_after);
    return b;
}

LexiconConfig lexicon_of(const RunConfig& config)
{
    if (config.lexicon_path.empty())
        return LexiconConfig::defaults();
    return LexiconConfig::load(config.lexicon_path);
}

} // namespace opdyn

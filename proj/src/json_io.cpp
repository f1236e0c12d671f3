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
#include "json_io.hpp"

namespace opdyn::jsonio
{

namespace
{

template <class T>
json opt(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<T>();
}

} // namespace

json to_json(const ClassifiedOpinion& c)
{
    json j;
    // no usable stance until an implicit or unclassified opinion is resolved
    const bool open = (c.implicit || c.unclassified) && !c.resolved_from_time;
    j["stance"]     = open ? json(nullptr) : json(std::string(to_string(c.stance)));
    j["no_kind"]    = c.no_kind ? json(std::string(to_string(*c.no_kind))) : json(nullptr);
    j["allocation"] = opt(c.allocation);
    j["range"]      = c.allocation_range ? json::array({c.allocation_range->lo, c.allocation_range->hi}) : json(nullptr);
    j["implicit"]   = c.implicit;
    j["unclassified"]       = c.unclassified;
    j["resolved_from_time"] = opt(c.resolved_from_time);
    j["anomalies"]          = c.anomalies;
    return j;
}

ClassifiedOpinion classified_from_json(const json& j)
{
    ClassifiedOpinion c;
    if (!j.at("stance").is_null())
        c.stance = stance_from_string(j.at("stance").get<std::string>());
    if (auto k = opt_from<std::string>(j, "no_kind"))
        c.no_kind = no_kind_from_string(*k);
    c.allocation = opt_from<double>(j, "allocation");
    if (j.contains("range") && !j.at("range").is_null())
        c.allocation_range = AllocationRange{j.at("range").at(0).get<double>(), j.at("range").at(1).get<double>()};
    c.implicit           = j.value("implicit", false);
    c.unclassified       = j.value("unclassified", false);
    c.resolved_from_time = opt_from<int>(j, "resolved_from_time");
    c.anomalies          = j.value("anomalies", std::vector<std::string>{});
    return c;
}

json to_json(const OpinionRecord& r)
{
    return {{"time", r.time}, {"text", r.text}, {"classified", to_json(r.classified)}};
}

OpinionRecord record_from_json(const json& j)
{
    return {j.at("time").get<int>(), j.at("text").get<std::string>(), classified_from_json(j.at("classified"))};
}

json to_json(const AgentState& a)
{
    json mem = json::array();
    for (const auto& m : a.memory)
        mem.push_back(to_json(m));
    return {{"agent_id", a.agent_id},
            {"current", to_json(a.current)},
            {"memory", mem},
            {"interaction_count", a.interaction_count}};
}

AgentState agent_from_json(const json& j)
{
    AgentState a;
    a.agent_id = j.at("agent_id").get<int>();
    a.current  = record_from_json(j.at("current"));
    for (const auto& m : j.at("memory"))
        a.memory.push_back(record_from_json(m));
    a.interaction_count = j.at("interaction_count").get<int>();
    return a;
}

json to_json(const PromptPair& p)
{
    return {{"system", p.system},
            {"user", p.user},
            {"mode", std::string(to_string(p.mode))},
            {"memory_variant", p.memory_variant},
            {"retried", p.retried}};
}

PromptPair prompt_from_json(const json& j)
{
    PromptPair p;
    p.system         = j.at("system").get<std::string>();
    p.user           = j.at("user").get<std::string>();
    p.mode           = mode_from_string(j.at("mode").get<std::string>());
    p.memory_variant = j.at("memory_variant").get<bool>();
    p.retried        = j.at("retried").get<bool>();
    return p;
}

json to_json(const InteractionEvent& e)
{
    json meta = json::array();
    for (const auto& m : e.meta)
        meta.push_back({{"backend", m.backend_name}, {"from_cache", m.from_cache}, {"attempt_count", m.attempt_count}});
    json j;
    j["type"]          = "event";
    j["simulation"]    = e.simulation_index;
    j["t"]             = e.t;
    j["agent_id"]      = e.agent_id;
    j["partner_id"]    = e.partner_id;
    j["prompt"]        = to_json(e.prompt);
    j["retry_prompt"]  = e.retry_prompt ? to_json(*e.retry_prompt) : json(nullptr);
    j["responses"]     = e.responses;
    j["raw_response"]  = e.raw_response;
    j["retried"]       = e.retried;
    j["option_reasks"] = e.option_reasks;
    j["text"]          = e.new_text;
    j["classified"]    = to_json(e.classified);
    j["backend_meta"]  = meta;
    return j;
}

InteractionEvent event_from_json(const json& j)
{
    InteractionEvent e;
    e.simulation_index = j.at("simulation").get<int>();
    e.t                = j.at("t").get<int>();
    e.agent_id         = j.at("agent_id").get<int>();
    e.partner_id       = j.at("partner_id").get<int>();
    e.prompt           = prompt_from_json(j.at("prompt"));
    if (!j.at("retry_prompt").is_null())
        e.retry_prompt = prompt_from_json(j.at("retry_prompt"));
    e.responses     = j.at("responses").get<std::vector<std::string>>();
    e.raw_response  = j.at("raw_response").get<std::string>();
    e.retried       = j.at("retried").get<bool>();
    e.option_reasks = j.at("option_reasks").get<int>();
    e.new_text      = j.at("text").get<std::string>();
    e.classified    = classified_from_json(j.at("classified"));
    for (const auto& m : j.at("backend_meta"))
        e.meta.push_back({m.at("backend").get<std::string>(), m.at("from_cache").get<bool>(),
                          m.at("attempt_count").get<int>(), std::chrono::milliseconds(0)});
    return e;
}

} // namespace opdyn::jsonio

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
// JSON mapping of the library types. Internal to the library.
#ifndef OPDYN_JSON_IO_HPP
#define OPDYN_JSON_IO_HPP

#include "opdyn/engine.hpp"
#include "opdyn/opinion.hpp"
#include "opdyn/population.hpp"
#include "opdyn/protocol.hpp"

#include "json.hpp"

namespace opdyn::jsonio
{

using json = nlohmann::json;

json to_json(const ClassifiedOpinion& c);
ClassifiedOpinion classified_from_json(const json& j);

json to_json(const OpinionRecord& r);
OpinionRecord record_from_json(const json& j);

json to_json(const AgentState& a);
AgentState agent_from_json(const json& j);

json to_json(const PromptPair& p);
PromptPair prompt_from_json(const json& j);

/// Latency is left out so equal runs give equal bytes.
json to_json(const InteractionEvent& e);
InteractionEvent event_from_json(const json& j);

} // namespace opdyn::jsonio

#endif

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
#include "opdyn/protocol.hpp"
#include "opdyn/errors.hpp"

#include <algorithm>
#include <cctype>

namespace opdyn
{

namespace
{

std::string quoted(const std::string& s)
{
    return "\"" + s + "\"";
}

// "This is your current opinion: ..." up to and including the memory block.
std::string opening(const AgentState& agent, bool with_memory)
{
    std::string s = "This is your current opinion: " + quoted(agent.current.text) + ". ";
    if (with_memory && !agent.memory.empty()) {
        s += "These are your previously held opinions sorted from the most recent to the oldest:";
        const auto shown = std::min(agent.memory.size(), kMemoryDepth);
        for (std::size_t k = 0; k < shown; ++k)
            s += " Opinion " + std::to_string(k + 1) + ": " + quoted(agent.memory[k].text);
        s += " ";
    }
    return s;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

std::string_view to_string(ModelFamily f)
{
    return f == ModelFamily::Mistral ? "mistral" : "generic";
}

ModelFamily model_family_from_string(std::string_view s)
{
    const auto l = lower(s);
    if (l == "generic" || l == "llama")
        return ModelFamily::Generic;
    if (l == "mistral")
        return ModelFamily::Mistral;
    throw ConfigError("model_family: expected 'generic' or 'mistral', got '" + std::string(s) + "'");
}

std::array<ClosedOption, 3> closed_options(const DiscussionSubject& subject)
{
    return {ClosedOption{OptionLabel::A, render_initial_opinion(Stance::Full, subject)},
            ClosedOption{OptionLabel::B, render_initial_opinion(Stance::Partial, subject)},
            ClosedOption{OptionLabel::C, render_initial_opinion(Stance::No, subject)}};
}

PromptPair build_freeform_prompt(const AgentState& agent, const OpinionRecord& partner_opinion,
                                 const DiscussionSubject& subject, bool with_memory)
{
    PromptPair p;
    p.mode           = Mode::FreeForm;
    p.memory_variant = with_memory;
    p.user = opening(agent, with_memory) + "Now, you interact with someone having this opinion: " +
             quoted(partner_opinion.text) + ". State how much funding should be given to " + subject.item_a_text +
             " after this interaction and explain why. Be concise with your answer.";
    return p;
}

PromptPair build_closedform_prompt(const AgentState& agent, const OpinionRecord& partner_opinion,
                                   const DiscussionSubject& subject, bool with_memory, ModelFamily family)
{
    const auto options = closed_options(subject);
    PromptPair p;
    p.mode           = Mode::ClosedForm;
    p.memory_variant = with_memory;
    p.user = opening(agent, with_memory) + "Now, you interact with someone having this opinion: " +
             quoted(partner_opinion.text) + ". State which option (a), (b), or (c) is your new opinion regarding " +
             subject.item_a_text + " after this interaction. Option (a) is " + quoted(options[0].option_text) +
             ". Option (b) is " + quoted(options[1].option_text) + ". Option (c) is " +
             quoted(options[2].option_text) + ".";
    if (family == ModelFamily::Mistral)
        p.user += " " + std::string(kOptionFormatSentence);
    return p;
}

bool RetryRule::triggers(std::string_view response) const
{
    if (trigger.empty())
        return false;
    if (case_sensitive)
        return response.find(trigger) != std::string_view::npos;
    return lower(response).find(lower(trigger)) != std::string::npos;
}

std::optional<PromptPair> apply_same_retry(const PromptPair& original, std::string_view response,
                                           const RetryRule& rule)
{
    if (original.retried || !rule.triggers(response))
        return std::nullopt;
    // The last sentence-final period followed by whitespace closes the
    // second-to-last sentence; periods inside quoted opinions are followed by
    // a closing quote instead.
    const auto& u   = original.user;
    std::size_t pos = std::string::npos;
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        if (u[i] == '.' && std::isspace(static_cast<unsigned char>(u[i + 1])))
            pos = i;
    if (pos == std::string::npos)
        throw ProtocolError("retry rule: prompt has a single sentence");
    PromptPair p = original;
    p.user.replace(pos, 1, kRetrySuffix);
    p.retried = true;
    return p;
}

PromptPair closedform_reask_prompt(const PromptPair& original)
{
    PromptPair p = original;
    if (p.user.find(kOptionFormatSentence) == std::string::npos)
        p.user += " " + std::string(kOptionFormatSentence);
    return p;
}

OptionOutcome enforce_single_option(std::string_view first_response, const std::function<std::string()>& reask,
                                    const DiscussionSubject& subject, int max_reasks)
{
    const auto options = closed_options(subject);
    OptionOutcome out;
    out.responses.emplace_back(first_response);
    while (true) {
        const auto parsed = parse_option(out.responses.back());
        if (parsed.label) {
            out.option = options[static_cast<std::size_t>(*parsed.label)];
            return out;
        }
        if (out.reasks >= max_reasks)
            return out;
        ++out.reasks;
        out.responses.push_back(reask());
    }
}

} // namespace opdyn

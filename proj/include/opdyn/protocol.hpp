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
#ifndef OPDYN_PROTOCOL_HPP
#define OPDYN_PROTOCOL_HPP

#include "opdyn/classifier.hpp"
#include "opdyn/opinion.hpp"
#include "opdyn/population.hpp"
#include "opdyn/subjects.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace opdyn
{

inline constexpr std::string_view kSystemPrompt = "You are in a discussion with other participants";
inline constexpr std::string_view kRetrySuffix  = ", even if the funding remains the same.";
inline constexpr std::string_view kOptionFormatSentence =
    "Your response must always be in the following format: \"Option: [write here (a), (b) or (c)].\"";

enum class ModelFamily
{
    Generic,
    Mistral,
};

std::string_view to_string(ModelFamily f);
ModelFamily model_family_from_string(std::string_view s);

struct PromptPair
{
    std::string system{kSystemPrompt};
    std::string user;
    Mode mode = Mode::FreeForm;
    bool memory_variant = false;
    bool retried = false;

    bool operator==(const PromptPair&) const = default;
};

struct ClosedOption
{
    OptionLabel label = OptionLabel::A;
    std::string option_text;
};

std::array<ClosedOption, 3> closed_options(const DiscussionSubject& subject);

PromptPair build_freeform_prompt(const AgentState& agent, const OpinionRecord& partner_opinion,
                                 const DiscussionSubject& subject, bool with_memory);

PromptPair build_closedform_prompt(const AgentState& agent, const OpinionRecord& partner_opinion,
                                   const DiscussionSubject& subject, bool with_memory,
                                   ModelFamily family = ModelFamily::Generic);

struct RetryRule
{
    std::string trigger = "the same";
    bool case_sensitive = false;

    bool triggers(std::string_view response) const;
};

/// Retry prompt when `response` contains the trigger, else nothing. A prompt
/// that is already a retry never produces another one.
std::optional<PromptPair> apply_same_retry(const PromptPair& original, std::string_view response,
                                           const RetryRule& rule = {});

/// Prompt used to re-ask after an ambiguous ClosedForm reply: the original
/// with the format sentence appended when it is not already there.
PromptPair closedform_reask_prompt(const PromptPair& original);

struct OptionOutcome
{
    std::optional<ClosedOption> option;
    /// Every reply seen, the first one included.
    std::vector<std::string> responses;
    int reasks = 0;
};

/// Parses `first_response`; while no single option is found, calls `reask`
/// (up to `max_reasks` times) for another reply.
OptionOutcome enforce_single_option(std::string_view first_response, const std::function<std::string()>& reask,
                                    const DiscussionSubject& subject, int max_reasks = 3);

} // namespace opdyn

#endif

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
#ifndef OPDYN_ENGINE_HPP
#define OPDYN_ENGINE_HPP

#include "opdyn/backends.hpp"
#include "opdyn/classifier.hpp"
#include "opdyn/population.hpp"
#include "opdyn/protocol.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace opdyn
{

struct SimulationConfig
{
    Mode mode = Mode::FreeForm;
    bool with_memory = false;
    int n_agents = 18;
    int n_rounds = 90;
    int n_simulations = 20;
    InitialDistribution distribution = InitialDistribution::named(DistributionName::Equivalent);
    DiscussionSubject subject;
    ModelFamily model_family = ModelFamily::Generic;
    std::uint64_t master_seed = 0;
    bool strict_classification = false;
    /// Second agent of a pair sees the first one's round-t reply.
    bool sequential_updates = false;
    /// Simulations in flight at once.
    int parallelism = 1;
    RetryRule retry_rule;
    std::string model_id;
    double temperature = 0.0;
    std::optional<int> max_tokens;
    int max_option_reasks = 3;
    int checkpoint_interval = 10;

    void validate() const;
};

/// splitmix64 finalizer applied to the master seed offset by the index, so a
/// simulation's seed never depends on how many others there are.
std::uint64_t child_seed(std::uint64_t master_seed, int simulation_index);

/// Uniform integer in [0, n) by rejection; identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

/// Unordered pair of distinct agents, uniform over all n(n-1)/2 pairs. The
/// first element is the one drawn first.
std::pair<int, int> select_pair(std::mt19937_64& rng, int n_agents);

struct BackendMeta
{
    std::string backend_name;
    bool from_cache = false;
    int attempt_count = 1;
    std::chrono::milliseconds latency{0};
};

struct InteractionEvent
{
    int simulation_index = 0;
    int t = 0;
    int agent_id = 0;
    int partner_id = 0;
    PromptPair prompt;
    std::optional<PromptPair> retry_prompt;
    /// Reply to `prompt`; for ClosedForm also every re-ask reply, in order.
    std::vector<std::string> responses;
    /// Reply the new opinion was taken from.
    std::string raw_response;
    bool retried = false;
    int option_reasks = 0;
    /// Opinion text pushed for the agent at time t.
    std::string new_text;
    ClassifiedOpinion classified;
    std::vector<BackendMeta> meta;
};

struct SimulationState
{
    int simulation_index = 0;
    std::uint64_t seed = 0;
    /// Last completed round.
    int t = 0;
    std::vector<AgentState> agents;
    /// Every opinion each agent has held, oldest first.
    std::vector<std::vector<OpinionRecord>> histories;
    std::mt19937_64 rng;
};

SimulationState init_simulation(const SimulationConfig& config, int simulation_index);

/// Receives every completed round; used for transcripts and checkpoints.
class RoundObserver
{
public:
    virtual ~RoundObserver() = default;
    virtual void round_done(const SimulationState& state, const std::array<InteractionEvent, 2>& events) = 0;
};

class Engine
{
public:
    Engine(SimulationConfig config, Backend& backend);
    Engine(SimulationConfig config, Backend& backend, Classifier classifier);

    const SimulationConfig& config() const
    {
        return m_config;
    }
    const Classifier& classifier() const
    {
        return m_classifier;
    }

    /// Plays round state.t + 1. On failure the state, rng included, is left
    /// exactly as it was.
    std::array<InteractionEvent, 2> run_interaction(SimulationState& state);

    /// Plays rounds until n_rounds is reached.
    void advance(SimulationState& state, RoundObserver* observer = nullptr);

private:
    struct Outcome
    {
        InteractionEvent event;
        OpinionRecord record;
    };
    Outcome interact(const SimulationState& state, int t, int self, int partner,
                     const OpinionRecord& partner_opinion);
    CompletionResult ask(const PromptPair& prompt, const std::string& tag);

    SimulationConfig m_config;
    Backend& m_backend;
    Classifier m_classifier;
};

/// Classifier that knows the subject's item texts besides the defaults.
Classifier classifier_for(const DiscussionSubject& subject, LexiconConfig lexicon = LexiconConfig::defaults());

struct SimulationResult
{
    int simulation_index = 0;
    std::uint64_t seed = 0;
    std::vector<AgentState> initial;
    std::vector<AgentState> final_agents;
    std::vector<std::vector<OpinionRecord>> histories;
    std::vector<InteractionEvent> events;
};

SimulationResult run_simulation(Engine& engine, int simulation_index);

} // namespace opdyn

#endif

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
#include "opdyn/engine.hpp"
#include "opdyn/errors.hpp"

#include <algorithm>
#include <future>

namespace opdyn
{

void SimulationConfig::validate() const
{
    if (n_agents < 2)
        throw ConfigError("n_agents must be >= 2");
    if (n_rounds < 0)
        throw ConfigError("n_rounds must be >= 0");
    if (n_simulations < 1)
        throw ConfigError("n_simulations must be >= 1");
    if (parallelism < 1)
        throw ConfigError("parallelism must be >= 1");
    if (!(temperature >= 0.0))
        throw ConfigError("temperature must be >= 0");
    if (max_tokens && *max_tokens <= 0)
        throw ConfigError("max_tokens must be positive");
    if (max_option_reasks < 0)
        throw ConfigError("max_option_reasks must be >= 0");
    if (checkpoint_interval < 1)
        throw ConfigError("checkpoint_interval must be >= 1");
    distribution.validate();
    subject.validate();
}

std::uint64_t child_seed(std::uint64_t master_seed, int simulation_index)
{
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(simulation_index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n)
{
    if (n == 0)
        throw InternalError("uniform_below(0)");
    // Smallest value that keeps every residue equally likely.
    const std::uint64_t floor = (0 - n) % n;
    std::uint64_t x           = rng();
    while (x < floor)
        x = rng();
    return x % n;
}

std::pair<int, int> select_pair(std::mt19937_64& rng, int n_agents)
{
    if (n_agents < 2)
        throw InternalError("select_pair needs at least two agents");
    const auto n = static_cast<std::uint64_t>(n_agents);
    const auto i = static_cast<int>(uniform_below(rng, n));
    auto j       = static_cast<int>(uniform_below(rng, n - 1));
    if (j >= i)
        ++j;
    return {i, j};
}

SimulationState init_simulation(const SimulationConfig& config, int simulation_index)
{
    SimulationState s;
    s.simulation_index = simulation_index;
    s.seed             = child_seed(config.master_seed, simulation_index);
    s.rng.seed(s.seed);
    s.agents = build_initial_population(config.distribution, config.n_agents, config.subject);
    for (const auto& a : s.agents)
        s.histories.push_back({a.current});
    return s;
}

Classifier classifier_for(const DiscussionSubject& subject, LexiconConfig lexicon)
{
    auto names = ItemNames::defaults();
    auto add   = [](std::vector<std::string>& list, const std::string& name) {
        ItemNames n = ItemNames::of(name, name);
        if (std::find(list.begin(), list.end(), n.item_a.front()) == list.end())
            list.push_back(n.item_a.front());
    };
    add(names.item_a, subject.item_a_text);
    add(names.item_b, subject.item_b_text);
    return Classifier(std::move(lexicon), std::move(names));
}

Engine::Engine(SimulationConfig config, Backend& backend)
    : Engine(config, backend, classifier_for(config.subject))
{
}

Engine::Engine(SimulationConfig config, Backend& backend, Classifier classifier)
    : m_config(std::move(config))
    , m_backend(backend)
    , m_classifier(std::move(classifier))
{
    m_config.validate();
}

CompletionResult Engine::ask(const PromptPair& prompt, const std::string& tag)
{
    CompletionRequest req;
    req.system_prompt = prompt.system;
    req.user_prompt   = prompt.user;
    req.model_id      = m_config.model_id;
    req.temperature   = m_config.temperature;
    req.max_tokens    = m_config.max_tokens;
    req.request_tag   = tag;
    auto r            = m_backend.complete(req);
    if (r.text.empty())
        throw ProtocolError("backend '" + r.backend_name + "' returned an empty reply");
    return r;
}

Engine::Outcome Engine::interact(const SimulationState& state, int t, int self, int partner,
                                 const OpinionRecord& partner_opinion)
{
    const auto& agent = state.agents[static_cast<std::size_t>(self)];
    const auto tag    = "sim" + std::to_string(state.simulation_index) + "/t" + std::to_string(t) + "/agent" +
                     std::to_string(self);
    Outcome out;
    auto& ev            = out.event;
    ev.simulation_index = state.simulation_index;
    ev.t                = t;
    ev.agent_id         = self;
    ev.partner_id       = partner;
    auto note           = [&](const CompletionResult& r) {
        ev.meta.push_back({r.backend_name, r.from_cache, r.attempt_count, r.latency});
        ev.responses.push_back(r.text);
    };

    if (m_config.mode == Mode::FreeForm) {
        ev.prompt = build_freeform_prompt(agent, partner_opinion, m_config.subject, m_config.with_memory);
        auto first = ask(ev.prompt, tag);
        note(first);
        ev.raw_response = first.text;
        if (auto retry = apply_same_retry(ev.prompt, first.text, m_config.retry_rule)) {
            auto second = ask(*retry, tag + "/retry");
            note(second);
            ev.retry_prompt = std::move(retry);
            ev.retried      = true;
            ev.raw_response = second.text;
        }
        ev.new_text = ev.raw_response;
        auto c      = m_classifier.classify(ev.new_text, Mode::FreeForm, m_config.strict_classification);
        if (c.implicit || c.unclassified) {
            auto history = state.histories[static_cast<std::size_t>(self)];
            history.push_back({t, ev.new_text, c});
            c = resolve_implicit(history);
        }
        ev.classified = std::move(c);
    } else {
        ev.prompt = build_closedform_prompt(agent, partner_opinion, m_config.subject, m_config.with_memory,
                                            m_config.model_family);
        auto first = ask(ev.prompt, tag);
        ev.meta.push_back({first.backend_name, first.from_cache, first.attempt_count, first.latency});
        const auto reask_prompt = closedform_reask_prompt(ev.prompt);
        int n                   = 0;
        auto outcome            = enforce_single_option(
            first.text,
            [&] {
                auto r = ask(reask_prompt, tag + "/reask" + std::to_string(++n));
                ev.meta.push_back({r.backend_name, r.from_cache, r.attempt_count, r.latency});
                return r.text;
            },
            m_config.subject, m_config.max_option_reasks);
        ev.responses     = std::move(outcome.responses);
        ev.option_reasks = outcome.reasks;
        ev.raw_response  = ev.responses.back();
        if (outcome.option) {
            ev.new_text         = outcome.option->option_text;
            const Stance stance = stance_of(outcome.option->label);
            ev.classified = make_classified(stance, stance == Stance::No ? std::optional(NoKind::ExplicitZero)
                                                                         : std::nullopt);
        } else {
            ev.new_text   = agent.current.text;
            ev.classified = agent.current.classified;
            ev.classified.anomalies.push_back("option_ambiguous");
        }
    }
    out.record = {t, ev.new_text, ev.classified};
    return out;
}

std::array<InteractionEvent, 2> Engine::run_interaction(SimulationState& state)
{
    const int t      = state.t + 1;
    const auto saved = state.rng;
    try {
        const auto [i, j] = select_pair(state.rng, m_config.n_agents);
        const auto& ai    = state.agents[static_cast<std::size_t>(i)];
        const auto& aj    = state.agents[static_cast<std::size_t>(j)];

        Outcome oi, oj;
        if (m_config.sequential_updates) {
            oi = interact(state, t, i, j, aj.current);
            oj = interact(state, t, j, i, oi.record);
        } else if (m_backend.concurrent_safe()) {
            auto fj = std::async(std::launch::async, [&] { return interact(state, t, j, i, ai.current); });
            oi      = interact(state, t, i, j, aj.current);
            oj      = fj.get();
        } else {
            oi = interact(state, t, i, j, aj.current);
            oj = interact(state, t, j, i, ai.current);
        }

        push_opinion(state.agents[static_cast<std::size_t>(i)], oi.record);
        push_opinion(state.agents[static_cast<std::size_t>(j)], oj.record);
        state.histories[static_cast<std::size_t>(i)].push_back(oi.record);
        state.histories[static_cast<std::size_t>(j)].push_back(oj.record);
        state.t = t;
        return {std::move(oi.event), std::move(oj.event)};
    } catch (...) {
        state.rng = saved;
        throw;
    }
}

void Engine::advance(SimulationState& state, RoundObserver* observer)
{
    while (state.t < m_config.n_rounds) {
        auto events = run_interaction(state);
        if (observer)
            observer->round_done(state, events);
    }
}

SimulationResult run_simulation(Engine& engine, int simulation_index)
{
    struct Collector : RoundObserver
    {
        std::vector<InteractionEvent> events;
        void round_done(const SimulationState&, const std::array<InteractionEvent, 2>& round) override
        {
            events.insert(events.end(), round.begin(), round.end());
        }
    } collector;

    auto state = init_simulation(engine.config(), simulation_index);
    SimulationResult r;
    r.simulation_index = simulation_index;
    r.seed             = state.seed;
    r.initial          = state.agents;
    engine.advance(state, &collector);
    r.final_agents = std::move(state.agents);
    r.histories    = std::move(state.histories);
    r.events       = std::move(collector.events);
    return r;
}

} // namespace opdyn

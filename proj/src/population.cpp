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
#include "opdyn/population.hpp"
#include "opdyn/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace opdyn
{

namespace
{

constexpr std::array<const char*, 10> kNames = {
    "Equivalent",  "Polarization-F", "Polarization-P", "Polarization-N", "Majority-F",
    "Majority-P",  "Majority-N",     "Consensus-F",    "Consensus-P",    "Consensus-N",
};

std::string squash(const std::string& s)
{
    std::string out;
    for (unsigned char c : s)
        if (std::isalnum(c))
            out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

Fraction reduced(std::int64_t num, std::int64_t den)
{
    const auto g = std::gcd(num, den);
    return g == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
}

} // namespace

Fraction Fraction::parse(const std::string& text)
{
    auto fail = [&] { return ConfigError("cannot parse proportion '" + text + "'"); };
    try {
        const auto slash = text.find('/');
        if (slash != std::string::npos) {
            std::size_t used = 0;
            const auto num = std::stoll(text.substr(0, slash), &used);
            const auto den = std::stoll(text.substr(slash + 1));
            if (num < 0 || den <= 0)
                throw fail();
            return reduced(num, den);
        }
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || v < 0 || !std::isfinite(v))
            throw fail();
        constexpr std::int64_t scale = 1'000'000'000;
        return reduced(static_cast<std::int64_t>(std::llround(v * scale)), scale);
    } catch (const std::logic_error&) {
        throw fail();
    }
}

std::string Fraction::str() const
{
    return std::to_string(num) + "/" + std::to_string(den);
}

InitialDistribution InitialDistribution::named(DistributionName n)
{
    const Fraction zero{0, 1}, one{1, 1}, third{1, 3}, half{1, 2}, most{16, 18}, few{1, 18};
    InitialDistribution d;
    d.name = n;
    switch (n) {
    case DistributionName::Equivalent:
        d.proportions = {third, third, third};
        break;
    case DistributionName::PolarizationF:
        d.proportions = {zero, half, half};
        break;
    case DistributionName::PolarizationP:
        d.proportions = {half, zero, half};
        break;
    case DistributionName::PolarizationN:
        d.proportions = {half, half, zero};
        break;
    case DistributionName::MajorityF:
        d.proportions = {most, few, few};
        break;
    case DistributionName::MajorityP:
        d.proportions = {few, most, few};
        break;
    case DistributionName::MajorityN:
        d.proportions = {few, few, most};
        break;
    case DistributionName::ConsensusF:
        d.proportions = {one, zero, zero};
        break;
    case DistributionName::ConsensusP:
        d.proportions = {zero, one, zero};
        break;
    case DistributionName::ConsensusN:
        d.proportions = {zero, zero, one};
        break;
    case DistributionName::Custom:
        throw ConfigError("a custom distribution needs explicit proportions");
    }
    return d;
}

InitialDistribution InitialDistribution::from_name(const std::string& name)
{
    const auto key = squash(name);
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (squash(kNames[i]) == key)
            return named(static_cast<DistributionName>(i));
    throw ConfigError("unknown initial distribution '" + name + "'");
}

InitialDistribution InitialDistribution::custom(Fraction full, Fraction partial, Fraction no)
{
    InitialDistribution d;
    d.name        = DistributionName::Custom;
    d.proportions = {full, partial, no};
    d.validate();
    return d;
}

std::vector<InitialDistribution> InitialDistribution::all_named()
{
    std::vector<InitialDistribution> out;
    for (std::size_t i = 0; i < kNames.size(); ++i)
        out.push_back(named(static_cast<DistributionName>(i)));
    return out;
}

std::string InitialDistribution::display_name() const
{
    if (name == DistributionName::Custom)
        return "Custom(" + proportions[0].str() + "," + proportions[1].str() + "," + proportions[2].str() + ")";
    return kNames[static_cast<std::size_t>(name)];
}

std::optional<Stance> InitialDistribution::consensus_stance() const
{
    constexpr std::array<Stance, 3> stances = {Stance::Full, Stance::Partial, Stance::No};
    for (std::size_t i = 0; i < 3; ++i)
        if (proportions[i] == Fraction{1, 1})
            return stances[i];
    return std::nullopt;
}

void InitialDistribution::validate() const
{
    // Sum p_i/q_i == 1  <=>  sum p_i * (L/q_i) == L for L = lcm(q_i).
    std::int64_t lcm = 1;
    for (const auto& p : proportions) {
        if (p.num < 0 || p.den <= 0)
            throw ConfigError("distribution proportions must be non-negative");
        lcm = std::lcm(lcm, p.den);
    }
    std::int64_t total = 0;
    for (const auto& p : proportions)
        total += p.num * (lcm / p.den);
    if (total != lcm)
        throw ConfigError("distribution proportions must sum to 1 (" + display_name() + ")");
}

std::array<int, 3> stance_counts(const InitialDistribution& dist, int n_agents)
{
    if (n_agents < 2)
        throw ConfigError("a population needs at least 2 agents, got " + std::to_string(n_agents));
    dist.validate();
    std::array<int, 3> counts{};
    std::array<std::int64_t, 3> rem_num{};
    int assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& p = dist.proportions[i];
        const std::int64_t scaled = p.num * n_agents;
        counts[i]  = static_cast<int>(scaled / p.den);
        // Remainder as a fraction with denominator p.den; compare by cross-multiplying.
        rem_num[i] = scaled % p.den;
        assigned += counts[i];
    }
    std::array<std::size_t, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rem_num[a] * dist.proportions[b].den > rem_num[b] * dist.proportions[a].den;
    });
    for (std::size_t k = 0; assigned < n_agents; ++k, ++assigned)
        ++counts[order[k % 3]];
    return counts;
}

std::vector<AgentState> build_initial_population(const InitialDistribution& dist, int n_agents,
                                                 const DiscussionSubject& subject)
{
    const auto counts = stance_counts(dist, n_agents);
    constexpr std::array<Stance, 3> stances = {Stance::Full, Stance::Partial, Stance::No};

    std::vector<AgentState> agents;
    agents.reserve(static_cast<std::size_t>(n_agents));
    for (std::size_t s = 0; s < 3; ++s) {
        const auto text = render_initial_opinion(stances[s], subject);
        for (int k = 0; k < counts[s]; ++k) {
            AgentState a;
            a.agent_id   = static_cast<int>(agents.size());
            a.current    = {0, text, make_classified(stances[s], NoKind::ExplicitZero)};
            agents.push_back(std::move(a));
        }
    }
    return agents;
}

void push_opinion(AgentState& agent, OpinionRecord opinion)
{
    if (opinion.time <= agent.current.time)
        throw InternalError("agent " + std::to_string(agent.agent_id) + ": opinion at t=" +
                            std::to_string(opinion.time) + " does not follow t=" +
                            std::to_string(agent.current.time));
    agent.memory.insert(agent.memory.begin(), std::move(agent.current));
    if (agent.memory.size() > kMemoryDepth)
        agent.memory.resize(kMemoryDepth);
    agent.current = std::move(opinion);
    ++agent.interaction_count;
}

} // namespace opdyn

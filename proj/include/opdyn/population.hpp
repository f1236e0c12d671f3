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
#ifndef OPDYN_POPULATION_HPP
#define OPDYN_POPULATION_HPP

#include "opdyn/opinion.hpp"
#include "opdyn/subjects.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace opdyn
{

/// Non-negative rational p/q.
struct Fraction
{
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const
    {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    bool operator==(const Fraction& o) const
    {
        return num * o.den == o.num * den;
    }
    /// Accepts "a/b", integers and plain decimals ("0.25").
    static Fraction parse(const std::string& text);
    std::string str() const;
};

enum class DistributionName
{
    Equivalent,
    PolarizationF,
    PolarizationP,
    PolarizationN,
    MajorityF,
    MajorityP,
    MajorityN,
    ConsensusF,
    ConsensusP,
    ConsensusN,
    Custom,
};

/// Initial proportions of Full / Partial / No opinions.
struct InitialDistribution
{
    DistributionName name = DistributionName::Equivalent;
    std::array<Fraction, 3> proportions{};

    static InitialDistribution named(DistributionName n);
    /// Accepts "Majority-F", "MajorityF", "majority_f", ...
    static InitialDistribution from_name(const std::string& name);
    static InitialDistribution custom(Fraction full, Fraction partial, Fraction no);

    /// All ten named distributions in table column order.
    static std::vector<InitialDistribution> all_named();

    std::string display_name() const;
    /// Stance held by every agent, if this is a consensus start.
    std::optional<Stance> consensus_stance() const;
    void validate() const;
};

/// Stance counts for `n_agents`, by largest remainder (ties go to Full, then
/// Partial, then No).
std::array<int, 3> stance_counts(const InitialDistribution& dist, int n_agents);

struct AgentState
{
    int agent_id = 0;
    OpinionRecord current;
    /// At most two earlier opinions, most recent first.
    std::vector<OpinionRecord> memory;
    int interaction_count = 1;

    bool operator==(const AgentState&) const = default;
};

inline constexpr std::size_t kMemoryDepth = 2;

/// Agents are laid out in contiguous blocks: Full first, then Partial, then No.
/// Each opinion at t = 0 is the matching rendered template.
std::vector<AgentState> build_initial_population(const InitialDistribution& dist, int n_agents,
                                                 const DiscussionSubject& subject);

/// Makes `opinion` current and shifts the previous one into memory.
void push_opinion(AgentState& agent, OpinionRecord opinion);

} // namespace opdyn

#endif

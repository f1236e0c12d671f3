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
#ifndef OPDYN_METRICS_HPP
#define OPDYN_METRICS_HPP

#include "opdyn/opinion.hpp"
#include "opdyn/population.hpp"
#include "opdyn/subjects.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace opdyn
{

/// Percentage of agents per stance, indexed Full, Partial, No.
struct FinalDistribution
{
    double full_pct = 0.0;
    double partial_pct = 0.0;
    double no_pct = 0.0;

    double pct(Stance s) const;
};

FinalDistribution final_distribution(std::span<const Stance> final_stances);
FinalDistribution final_distribution(std::span<const AgentState> agents);

struct MeanStd
{
    double mean = 0.0;
    /// Population standard deviation (divisor n).
    double std = 0.0;
};

MeanStd mean_std(std::span<const double> values);

struct AggregateDistribution
{
    std::array<MeanStd, 3> per_stance{};
    std::size_t n_simulations = 0;

    const MeanStd& of(Stance s) const
    {
        return per_stance[static_cast<std::size_t>(s)];
    }
};

AggregateDistribution aggregate_distribution(std::span<const FinalDistribution> sims);

struct AllocationHistogram
{
    static constexpr std::size_t kBins = 10;

    std::array<double, kBins + 1> bin_edges{};
    std::array<std::size_t, kBins> counts{};
    /// Counts divided by n_explicit; all zero when n_explicit is 0.
    std::array<double, kBins> frequencies{};
    std::size_t n_explicit = 0;
    std::size_t n_total = 0;
};

/// Bin of a value in [0, 100]; 100 goes to the last bin.
std::size_t histogram_bin(double value);

/// `values` are explicit allocations, `n_total` is the number of final
/// opinions they were drawn from.
AllocationHistogram allocation_histogram(std::span<const double> values, std::size_t n_total);

/// Explicit allocations of the given final opinions; resolved implicit
/// opinions and opinions without a percentage are skipped.
std::vector<double> explicit_allocations(std::span<const OpinionRecord> final_opinions);

struct CombinationResult
{
    InitialDistribution distribution;
    ConnotationSetting setting;
    /// Final stance of every agent, one entry per simulation.
    std::vector<std::vector<Stance>> finals;
    bool complete = true;
};

struct ConsensusSummary
{
    int noncons_combos_total = 0;
    int noncons_counted = 0;
    int cons_combos_total = 0;
    int cons_counted = 0;
    double pct_noncons_all_partial = 0.0;
    double pct_cons_kept = 0.0;
    std::vector<std::string> warnings;
};

/// A non-consensus start counts when every simulation ends with every agent
/// Partial; a consensus start counts when every simulation keeps the starting
/// stance. Incomplete combinations, or ones with fewer than
/// `expected_simulations` runs, are left out and reported in `warnings`.
ConsensusSummary consensus_summary(std::span<const CombinationResult> results, std::size_t expected_simulations);

/// Codes (Full 1, Partial 0, No -1) of one agent for t = 0..n_rounds, carrying
/// the last opinion forward through rounds the agent sat out.
std::vector<int> evolution_trace(std::span<const OpinionRecord> history, int n_rounds);

} // namespace opdyn

#endif

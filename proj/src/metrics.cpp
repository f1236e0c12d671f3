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
#include "opdyn/metrics.hpp"
#include "opdyn/errors.hpp"

#include <algorithm>
#include <cmath>

namespace opdyn
{

double FinalDistribution::pct(Stance s) const
{
    switch (s) {
    case Stance::Full:
        return full_pct;
    case Stance::Partial:
        return partial_pct;
    case Stance::No:
        return no_pct;
    }
    return 0.0;
}

FinalDistribution final_distribution(std::span<const Stance> final_stances)
{
    if (final_stances.empty())
        throw InternalError("final_distribution of an empty population");
    std::array<std::size_t, 3> counts{};
    for (auto s : final_stances)
        ++counts[static_cast<std::size_t>(s)];
    const double n = static_cast<double>(final_stances.size());
    FinalDistribution d;
    d.full_pct    = 100.0 * static_cast<double>(counts[0]) / n;
    d.partial_pct = 100.0 * static_cast<double>(counts[1]) / n;
    d.no_pct      = 100.0 * static_cast<double>(counts[2]) / n;
    return d;
}

FinalDistribution final_distribution(std::span<const AgentState> agents)
{
    std::vector<Stance> stances;
    for (const auto& a : agents)
        stances.push_back(a.current.classified.stance);
    return final_distribution(stances);
}

MeanStd mean_std(std::span<const double> values)
{
    MeanStd r;
    if (values.empty())
        return r;
    const auto n     = static_cast<long double>(values.size());
    long double sum  = 0.0L;
    for (double v : values)
        sum += v;
    const long double mean = sum / n;
    long double acc        = 0.0L;
    for (double v : values)
        acc += (v - mean) * (v - mean);
    r.mean = static_cast<double>(mean);
    r.std  = static_cast<double>(std::sqrt(acc / n));
    return r;
}

AggregateDistribution aggregate_distribution(std::span<const FinalDistribution> sims)
{
    if (sims.empty())
        throw InternalError("aggregate_distribution needs at least one simulation");
    AggregateDistribution agg;
    agg.n_simulations = sims.size();
    for (auto s : {Stance::Full, Stance::Partial, Stance::No}) {
        std::vector<double> v;
        for (const auto& d : sims)
            v.push_back(d.pct(s));
        agg.per_stance[static_cast<std::size_t>(s)] = mean_std(v);
    }
    return agg;
}

std::size_t histogram_bin(double value)
{
    if (!(value >= 0.0 && value <= 100.0))
        throw InternalError("allocation outside [0, 100]");
    const auto bin = static_cast<std::size_t>(std::floor(value / 10.0));
    return std::min(bin, AllocationHistogram::kBins - 1);
}

AllocationHistogram allocation_histogram(std::span<const double> values, std::size_t n_total)
{
    AllocationHistogram h;
    for (std::size_t k = 0; k <= AllocationHistogram::kBins; ++k)
        h.bin_edges[k] = 10.0 * static_cast<double>(k);
    for (double v : values)
        ++h.counts[histogram_bin(v)];
    h.n_explicit = values.size();
    h.n_total    = std::max(n_total, values.size());
    if (h.n_explicit > 0)
        for (std::size_t k = 0; k < AllocationHistogram::kBins; ++k)
            h.frequencies[k] = static_cast<double>(h.counts[k]) / static_cast<double>(h.n_explicit);
    return h;
}

std::vector<double> explicit_allocations(std::span<const OpinionRecord> final_opinions)
{
    std::vector<double> out;
    for (const auto& o : final_opinions)
        if (o.classified.explicit_allocation())
            out.push_back(*o.classified.allocation);
    return out;
}

ConsensusSummary consensus_summary(std::span<const CombinationResult> results, std::size_t expected_simulations)
{
    ConsensusSummary s;
    for (const auto& r : results) {
        const auto label = r.distribution.display_name() + " " + r.setting.label();
        if (!r.complete || r.finals.size() < expected_simulations) {
            s.warnings.push_back(label + ": incomplete (" + std::to_string(r.finals.size()) + " of " +
                                 std::to_string(expected_simulations) + " simulations), excluded");
            continue;
        }
        const auto consensus = r.distribution.consensus_stance();
        const Stance target  = consensus.value_or(Stance::Partial);
        const bool holds     = std::all_of(r.finals.begin(), r.finals.end(), [&](const std::vector<Stance>& sim) {
            return !sim.empty() && std::all_of(sim.begin(), sim.end(), [&](Stance x) { return x == target; });
        });
        if (consensus) {
            ++s.cons_combos_total;
            s.cons_counted += holds ? 1 : 0;
        } else {
            ++s.noncons_combos_total;
            s.noncons_counted += holds ? 1 : 0;
        }
    }
    auto pct = [](int num, int den) { return den == 0 ? 0.0 : 100.0 * num / den; };
    s.pct_noncons_all_partial = pct(s.noncons_counted, s.noncons_combos_total);
    s.pct_cons_kept           = pct(s.cons_counted, s.cons_combos_total);
    return s;
}

std::vector<int> evolution_trace(std::span<const OpinionRecord> history, int n_rounds)
{
    if (history.empty() || history.front().time != 0)
        throw InternalError("evolution_trace needs a history starting at t = 0");
    std::vector<int> trace;
    trace.reserve(static_cast<std::size_t>(n_rounds) + 1);
    std::size_t k = 0;
    for (int t = 0; t <= n_rounds; ++t) {
        while (k + 1 < history.size() && history[k + 1].time <= t)
            ++k;
        trace.push_back(stance_code(history[k].classified.stance));
    }
    return trace;
}

} // namespace opdyn

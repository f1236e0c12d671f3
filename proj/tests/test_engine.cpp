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

#include "doctest.h"
#include "opdyn/engine.hpp"
#include "opdyn/errors.hpp"
#include "stats.hpp"

#include <map>
#include <set>

using namespace opdyn;

namespace
{
SimulationConfig small(int agents = 4, int rounds = 3)
{
    SimulationConfig c;
    c.n_agents      = agents;
    c.n_rounds      = rounds;
    c.n_simulations = 1;
    c.distribution  = InitialDistribution::named(DistributionName::Equivalent);
    c.subject       = make_subject({});
    c.master_seed   = 7;
    return c;
}

std::string partner_quote(const std::string& user)
{
    const std::string open = "interact with someone having this opinion: \"";
    const auto b           = user.find(open) + open.size();
    return user.substr(b, user.find("\".", b) - b);
}
} // namespace

TEST_SUITE("engine")
{
    TEST_CASE("child seeds are fixed and distinct")
    {
        CHECK(child_seed(0, 0) == child_seed(0, 0));
        std::set<std::uint64_t> seen;
        for (int i = 0; i < 1000; ++i)
            seen.insert(child_seed(42, i));
        CHECK(seen.size() == 1000);
        CHECK(child_seed(1, 0) != child_seed(2, 0));
    }

    TEST_CASE("pairs are two distinct agents")
    {
        std::mt19937_64 rng(3);
        for (int k = 0; k < 1000; ++k) {
            auto [i, j] = select_pair(rng, 5);
            CHECK(i != j);
            CHECK(i >= 0);
            CHECK(j < 5);
        }
        CHECK_THROWS_AS(select_pair(rng, 1), InternalError);
    }

    TEST_CASE("unordered pairs are uniform (chi-square)")
    {
        std::mt19937_64 rng(child_seed(2024, 0));
        const int n = 18, draws = 50000;
        std::map<std::pair<int, int>, int> counts;
        for (int k = 0; k < draws; ++k) {
            auto [i, j] = select_pair(rng, n);
            ++counts[{std::min(i, j), std::max(i, j)}];
        }
        const int cells = n * (n - 1) / 2;
        CHECK(static_cast<int>(counts.size()) == cells);
        const double expected = static_cast<double>(draws) / cells;
        double chi2           = 0;
        for (const auto& [k, c] : counts)
            chi2 += (c - expected) * (c - expected) / expected;
        CHECK(teststats::chi2_sf(chi2, cells - 1) > 0.001);
    }

    TEST_CASE("chi-square helper sanity")
    {
        // chi2(2) survival is exp(-x/2)
        CHECK(teststats::chi2_sf(3.0, 2) == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
        CHECK(teststats::chi2_sf(152.0, 152) == doctest::Approx(0.4847).epsilon(0.01));
    }

    TEST_CASE("config validation")
    {
        auto c     = small();
        c.n_agents = 1;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c             = small();
        c.parallelism = 0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }

    TEST_CASE("simultaneous update reads t-1 opinions")
    {
        auto cfg = small();
        ScriptedBackend b({"Thing A should receive 40% of the funding.", "Thing A should receive 60% of the funding."});
        Engine e(cfg, b);
        auto st       = init_simulation(cfg, 0);
        const auto before = st.agents;
        auto ev       = e.run_interaction(st);
        REQUIRE(b.requests().size() == 2);
        const int i = ev[0].agent_id, j = ev[1].agent_id;
        CHECK(ev[0].partner_id == j);
        CHECK(partner_quote(b.requests()[0].user_prompt) == before[j].current.text);
        CHECK(partner_quote(b.requests()[1].user_prompt) == before[i].current.text);
        CHECK(st.t == 1);
        CHECK(st.agents[i].current.classified.allocation == 40.0);
        CHECK(st.agents[j].current.classified.allocation == 60.0);
        CHECK(st.agents[i].memory.front().text == before[i].current.text);
        CHECK(st.histories[i].size() == 2);
        CHECK(b.requests()[0].temperature == 0.0);
    }

    TEST_CASE("sequential update shows the fresh reply")
    {
        auto cfg               = small();
        cfg.sequential_updates = true;
        ScriptedBackend b({"Thing A should receive 40% of the funding.", "Thing A should receive 60% of the funding."});
        Engine e(cfg, b);
        auto st = init_simulation(cfg, 0);
        e.run_interaction(st);
        CHECK(partner_quote(b.requests()[1].user_prompt) == "Thing A should receive 40% of the funding.");
    }

    TEST_CASE("the-same reply triggers one re-query")
    {
        auto cfg = small();
        ScriptedBackend b({"It stays the same.", "Thing A should receive 40% of the funding.",
                           "Thing A should receive 60% of the funding."});
        Engine e(cfg, b);
        auto st = init_simulation(cfg, 0);
        auto ev = e.run_interaction(st);
        CHECK(ev[0].retried);
        REQUIRE(ev[0].retry_prompt.has_value());
        CHECK(ev[0].retry_prompt->user.find("explain why, even if the funding remains the same. Be concise") !=
              std::string::npos);
        CHECK(ev[0].raw_response == "Thing A should receive 40% of the funding.");
        CHECK_FALSE(ev[1].retried);
        CHECK(b.requests().size() == 3);
    }

    TEST_CASE("second the-same reply is kept")
    {
        auto cfg = small();
        ScriptedBackend b({"the same", "still the same, unchanged", "Thing A should receive 60% of the funding."});
        Engine e(cfg, b);
        auto st = init_simulation(cfg, 0);
        auto ev = e.run_interaction(st);
        CHECK(b.requests().size() == 3);
        CHECK(ev[0].new_text == "still the same, unchanged");
        // implicit, resolved from the seeded opinion
        CHECK(ev[0].classified.resolved_from_time == 0);
    }

    TEST_CASE("closed form adopts the option template")
    {
        auto cfg = small();
        cfg.mode = Mode::ClosedForm;
        ScriptedBackend b({"Option: (b)", "Option: (c)"});
        Engine e(cfg, b);
        auto st = init_simulation(cfg, 0);
        auto ev = e.run_interaction(st);
        CHECK(ev[0].new_text == render_initial_opinion(Stance::Partial, cfg.subject));
        CHECK(ev[1].new_text == render_initial_opinion(Stance::No, cfg.subject));
        CHECK(st.agents[ev[0].agent_id].current.classified.stance == Stance::Partial);
    }

    TEST_CASE("closed form ambiguity keeps the old opinion")
    {
        auto cfg              = small();
        cfg.mode              = Mode::ClosedForm;
        cfg.max_option_reasks = 2;
        ScriptedBackend b({"(a) or (c)", "dunno", "(b)(c)", "Option: (a)"});
        Engine e(cfg, b);
        auto st           = init_simulation(cfg, 0);
        const auto before = st.agents;
        auto ev           = e.run_interaction(st);
        const int i       = ev[0].agent_id;
        CHECK(ev[0].option_reasks == 2);
        CHECK(ev[0].responses.size() == 3);
        CHECK(st.agents[i].current.text == before[i].current.text);
        CHECK(st.agents[i].current.time == 1);
        const auto& an = ev[0].classified.anomalies;
        CHECK(std::find(an.begin(), an.end(), "option_ambiguous") != an.end());
    }

    TEST_CASE("failed round leaves state untouched")
    {
        auto cfg = small();
        ScriptedBackend b({"Thing A should receive 40% of the funding."});
        Engine e(cfg, b);
        auto st       = init_simulation(cfg, 0);
        auto rng_copy = st.rng;
        const auto agents = st.agents;
        CHECK_THROWS_AS(e.run_interaction(st), BackendError);
        CHECK(st.t == 0);
        CHECK(st.agents == agents);
        CHECK(st.rng == rng_copy);
    }

    TEST_CASE("strict mode raises on unclassifiable replies")
    {
        auto cfg                  = small();
        cfg.strict_classification = true;
        ScriptedBackend b({"Can I help you with something else?", "x"});
        Engine e(cfg, b);
        auto st = init_simulation(cfg, 0);
        CHECK_THROWS_AS(e.run_interaction(st), ClassificationError);
    }

    TEST_CASE("oracle runs are reproducible and parallel-safe")
    {
        auto cfg          = small(8, 20);
        cfg.n_simulations = 3;
        MidpointOracle m;
        Engine e(cfg, m);
        const auto a = run_simulation(e, 1);
        const auto b = run_simulation(e, 1);
        CHECK(a.final_agents == b.final_agents);
        CHECK(a.events.size() == 40);
        CHECK(a.seed == child_seed(7, 1));
        const auto c = run_simulation(e, 2);
        CHECK(c.seed != a.seed);
    }

    TEST_CASE("classifier_for knows the subject items")
    {
        DiscussionSubject s;
        s.item_a_text = "solar panels";
        s.item_b_text = "wind farms";
        auto cl       = classifier_for(s);
        auto c = cl.classify("Wind farms get 70% and solar panels 30%.", Mode::FreeForm);
        CHECK(c.allocation == doctest::Approx(30.0));
    }
}

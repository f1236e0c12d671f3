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
#include "opdyn/commands.hpp"
#include "opdyn/config.hpp"
#include "opdyn/errors.hpp"
#include "opdyn/persistence.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace opdyn;
namespace fs = std::filesystem;

namespace
{
fs::path scratch(const std::string& tag)
{
    auto d = fs::temp_directory_path() / ("opdyn_runs_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    return d;
}

RunConfig oracle_config(const std::string& kind, int sims = 2)
{
    auto c = parse_config(R"({"mode":"freeform","backend":{"kind":")" + kind +
                          R"("},"n_agents":6,"n_rounds":12,"distribution":"Polarization-P","seed":11,
                          "checkpoint_interval":4})");
    c.sim.n_simulations = sims;
    return c;
}

std::string bytes(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
} // namespace

TEST_SUITE("runs")
{
    TEST_CASE("atomic write and read back")
    {
        const auto d = scratch("io");
        fs::create_directories(d);
        write_file_atomic(d / "a.txt", "hello\n");
        CHECK(read_file(d / "a.txt") == "hello\n");
        write_file_atomic(d / "a.txt", "bye\n");
        CHECK(read_file(d / "a.txt") == "bye\n");
        CHECK_THROWS_AS(read_file(d / "missing"), IoError);
        fs::remove_all(d);
    }

    TEST_CASE("fixed formatting")
    {
        CHECK(fixed(88.888888, 2) == "88.89");
        CHECK(fixed(-0.0001, 2) == "0.00");
        CHECK(fixed(82.5396825, 2) == "82.54");
    }

    TEST_CASE("manifest status only moves forward")
    {
        RunManifest m;
        m.simulations.resize(1);
        m.advance(RunStatus::Running);
        m.advance(0, RunStatus::Running);
        m.advance(0, RunStatus::Done);
        CHECK_THROWS_AS(m.advance(0, RunStatus::Running), InternalError);
        m.advance(RunStatus::Done);
        m.reopen();
        CHECK(m.status == RunStatus::Running);
        CHECK(m.resumes == 1);

        const auto d = scratch("manifest");
        fs::create_directories(d);
        m.save(d / "m.json");
        const auto back = RunManifest::load(d / "m.json");
        CHECK(back.resumes == 1);
        CHECK(back.simulations[0].status == RunStatus::Done);
        fs::remove_all(d);
    }

    TEST_CASE("checkpoint round trip keeps the rng")
    {
        auto cfg = oracle_config("midpoint").sim;
        auto st  = init_simulation(cfg, 0);
        st.rng.discard(17);
        const auto d = scratch("ckpt");
        fs::create_directories(d);
        save_checkpoint(d / "c.json", st, 1234);
        const auto c = load_checkpoint(d / "c.json");
        CHECK(c.transcript_offset == 1234);
        CHECK(c.state.rng == st.rng);
        CHECK(c.state.agents == st.agents);
        CHECK(c.state.seed == st.seed);
        fs::remove_all(d);
    }

    TEST_CASE("run writes transcripts, csvs and a done manifest")
    {
        const auto d = scratch("run");
        std::ostringstream log;
        REQUIRE(cmd_run(oracle_config("stubborn"), d, log) == 0);
        for (auto f : {"config.json", "manifest.json", "sim_000.jsonl", "sim_001.jsonl", "distribution.csv",
                       "histogram.csv", "traces_sim_000.csv"})
            CHECK(fs::exists(d / f));
        const auto m = RunManifest::load(d / "manifest.json");
        CHECK(m.status == RunStatus::Done);
        const auto t = read_transcript(d / "sim_000.jsonl");
        CHECK(t.complete());
        CHECK(t.events.size() == 24);
        CHECK(t.initial.size() == 6);
        CHECK(t.item_a == "Thing A");
        CHECK(bytes(d / "sim_000.jsonl").find("latency") == std::string::npos);

        const auto r = analyze_run(d);
        REQUIRE(r.aggregate.has_value());
        CHECK(r.aggregate->of(Stance::Full).mean == doctest::Approx(50));
        CHECK(r.aggregate->of(Stance::No).std == 0.0);
        const auto csv = bytes(d / "distribution.csv");
        CHECK(csv.rfind("combination,stance,mean,std,mean_full,std_full,n_simulations,std_convention\n", 0) == 0);

        // an existing run directory is refused
        CHECK_THROWS(cmd_run(oracle_config("stubborn"), d, log));
        CHECK(cmd_report(d, log) == 0);
        fs::remove_all(d);
    }

    TEST_CASE("same seed, same bytes")
    {
        const auto a = scratch("det_a"), b = scratch("det_b");
        std::ostringstream log;
        REQUIRE(cmd_run(oracle_config("midpoint"), a, log) == 0);
        REQUIRE(cmd_run(oracle_config("midpoint"), b, log) == 0);
        CHECK(bytes(a / "sim_000.jsonl") == bytes(b / "sim_000.jsonl"));
        CHECK(bytes(a / "sim_001.jsonl") == bytes(b / "sim_001.jsonl"));
        CHECK(bytes(a / "sim_000.jsonl") != bytes(a / "sim_001.jsonl"));
        fs::remove_all(a);
        fs::remove_all(b);
    }

    TEST_CASE("interrupted run resumes to the same transcript")
    {
        const auto full = scratch("res_full"), cut = scratch("res_cut");
        std::ostringstream log;
        REQUIRE(cmd_run(oracle_config("midpoint"), full, log) == 0);

        auto broken               = oracle_config("midpoint");
        broken.backend.fail_after = 30;
        CHECK(cmd_run(broken, cut, log) == 1);
        auto m = RunManifest::load(cut / "manifest.json");
        CHECK(m.status == RunStatus::Failed);
        CHECK(m.simulations[1].status != RunStatus::Done);

        CHECK(cmd_resume(cut, std::nullopt, log) == 0);
        m = RunManifest::load(cut / "manifest.json");
        CHECK(m.status == RunStatus::Done);
        CHECK(m.resumes == 1);
        CHECK(bytes(full / "sim_000.jsonl") == bytes(cut / "sim_000.jsonl"));
        CHECK(bytes(full / "sim_001.jsonl") == bytes(cut / "sim_001.jsonl"));
        fs::remove_all(full);
        fs::remove_all(cut);
    }

    TEST_CASE("a backend failure stops the batch")
    {
        const auto d              = scratch("halt");
        auto cfg                  = oracle_config("midpoint", 3);
        cfg.backend.fail_after    = 10;
        std::ostringstream log;
        CHECK(cmd_run(cfg, d, log) == 1);
        const auto m = RunManifest::load(d / "manifest.json");
        CHECK(m.simulations[0].status == RunStatus::Failed);
        CHECK(m.simulations[1].status == RunStatus::Pending);
        CHECK(m.simulations[2].status == RunStatus::Pending);
        CHECK(log.str().find("not started") != std::string::npos);
        CHECK(cmd_resume(d, std::nullopt, log) == 0);
        CHECK(RunManifest::load(d / "manifest.json").simulations[2].status == RunStatus::Done);
        fs::remove_all(d);
    }

    TEST_CASE("grid over two cells")
    {
        auto c                = oracle_config("stubborn", 1);
        c.grid.distributions  = {InitialDistribution::named(DistributionName::ConsensusP),
                                 InitialDistribution::named(DistributionName::MajorityP)};
        c.grid.settings       = {ConnotationSetting{}};
        const auto d          = scratch("grid");
        std::ostringstream log;
        REQUIRE(cmd_grid(c, d, log) == 0);
        CHECK(fs::exists(d / "consensus.csv"));
        CHECK(fs::is_directory(d / combination_name(c.grid.distributions[0], c.grid.settings[0])));
        const auto cons = bytes(d / "consensus.csv");
        CHECK(cons.find("consensus_kept,1,1,100.00") != std::string::npos);
        CHECK(cons.find("nonconsensus_all_partial,0,1,0.00") != std::string::npos);
        fs::remove_all(d);
    }

    TEST_CASE("reclassifying a transcript matches what was stored")
    {
        const auto d = scratch("recls");
        std::ostringstream log;
        REQUIRE(cmd_run(oracle_config("midpoint", 1), d, log) == 0);
        std::ostringstream out;
        CHECK(cmd_classify(d / "sim_000.jsonl", {}, out) == 0);
        CHECK(out.str().find("\"matches_stored\":false") == std::string::npos);
        fs::remove_all(d);
    }

    TEST_CASE("combination names are filesystem safe")
    {
        CHECK(combination_name(InitialDistribution::named(DistributionName::MajorityF), ConnotationSetting{}) ==
              "Majority-F__ia0_ib0_ra0_rb0");
    }
}

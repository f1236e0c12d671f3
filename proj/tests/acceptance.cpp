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

// Acceptance checks, one per criterion: `acceptance --criterion N`.
// Exit 0 on pass, 1 on fail, 77 when skipped.

#include "opdyn/backends.hpp"
#include "opdyn/classifier.hpp"
#include "opdyn/commands.hpp"
#include "opdyn/config.hpp"
#include "opdyn/engine.hpp"
#include "opdyn/metrics.hpp"
#include "opdyn/persistence.hpp"
#include "stats.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

using namespace opdyn;
namespace fs = std::filesystem;

namespace
{
enum class Verdict
{
    Pass,
    Fail,
    Skip,
};

struct Outcome
{
    Verdict verdict = Verdict::Fail;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, int digits = 6)
{
    std::ostringstream s;
    s.precision(digits);
    s << std::fixed << v;
    return s.str();
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& tag)
{
    auto d = fs::temp_directory_path() / ("opdyn_accept_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    return d;
}

SimulationConfig base_sim(DistributionName d, int sims)
{
    SimulationConfig c;
    c.n_agents      = 18;
    c.n_rounds      = 90;
    c.n_simulations = sims;
    c.distribution  = InitialDistribution::named(d);
    c.subject       = make_subject({});
    c.master_seed   = 20240601;
    return c;
}

// 1. classify(render_initial_opinion) returns the seeded stance for 9 settings x 3 stances.
Outcome template_round_trip()
{
    const auto t0 = Clock::now();
    int ok = 0, total = 0;
    std::string miss;
    for (const auto& setting : enumerate_connotation_settings()) {
        const auto subject = make_subject(setting);
        const auto cl      = classifier_for(subject);
        for (auto s : {Stance::Full, Stance::Partial, Stance::No}) {
            ++total;
            const auto c = cl.classify(render_initial_opinion(s, subject), Mode::FreeForm);
            if (!c.unclassified && !c.implicit && c.stance == s)
                ++ok;
            else
                miss += " " + setting.label() + "/" + std::string(to_string(s));
        }
    }
    const double secs = seconds_since(t0);
    const bool pass   = ok == 27 && total == 27 && secs < 1.0;
    return {pass ? Verdict::Pass : Verdict::Fail,
            std::to_string(ok) + "/" + std::to_string(total) + " in " + num(secs, 3) + " s" + miss};
}

// 2. Verbatim paper snippets with hand labels classify at 100%.
Outcome classifier_corpus()
{
    const auto corpus = load_corpus(fs::path(OPDYN_DATA_DIR) / "corpus.jsonl");
    const auto paper  = slurp(fs::path(OPDYN_SOURCE_DIR) / "paper.md");
    // every snippet must appear in the paper as written (the paper escapes '$' as '\$')
    std::size_t verbatim = 0;
    for (const auto& e : corpus)
        verbatim += paper.find(e.text) != std::string::npos;

    const Classifier cl;
    const auto report = evaluate_corpus(cl, corpus);

    struct Named
    {
        std::string needle;
        Stance stance;
        std::optional<NoKind> kind;
        std::optional<double> allocation;
    };
    const Named named[] = {
        {"47.418359375%", Stance::Partial, std::nullopt, 47.418359375},
        {"$0 funding is justified", Stance::No, NoKind::ExplicitZero, std::nullopt},
        {"no definitive funding figure", Stance::No, NoKind::Unspecified, std::nullopt},
        {"100% of the funding", Stance::Full, std::nullopt, 100.0},
    };
    int named_ok = 0;
    std::string named_miss;
    for (const auto& n : named) {
        bool found = false;
        for (const auto& e : corpus) {
            std::string plain = e.text;
            for (std::size_t p; (p = plain.find("\\$")) != std::string::npos;)
                plain.erase(p, 1);
            if (plain.find(n.needle) == std::string::npos || e.stance != n.stance)
                continue;
            const auto got = cl.classify(e.text, e.mode);
            const bool alloc_ok =
                n.allocation ? (got.allocation && std::fabs(*got.allocation - *n.allocation) < 1e-9) : true;
            if (got.stance == n.stance && got.no_kind == n.kind && alloc_ok) {
                found = true;
                break;
            }
        }
        named_ok += found;
        if (!found)
            named_miss += " [" + n.needle + "]";
    }
    std::string fails;
    for (const auto& f : report.failures)
        fails += " " + f.expected.source;
    const bool pass = corpus.size() >= 30 && verbatim == corpus.size() && report.correct == report.total &&
                      named_ok == 4;
    return {pass ? Verdict::Pass : Verdict::Fail,
            std::to_string(report.correct) + "/" + std::to_string(report.total) + " correct, " +
                std::to_string(verbatim) + " verbatim, named cases " + std::to_string(named_ok) + "/4" + named_miss +
                fails};
}

// 3. Stubborn oracle keeps every named distribution, std 0.
Outcome stubborn_preservation()
{
    // proportions at N=18, written out by hand
    const std::map<DistributionName, std::array<double, 3>> expect = {
        {DistributionName::Equivalent, {6, 6, 6}},     {DistributionName::PolarizationF, {0, 9, 9}},
        {DistributionName::PolarizationP, {9, 0, 9}},  {DistributionName::PolarizationN, {9, 9, 0}},
        {DistributionName::MajorityF, {16, 1, 1}},     {DistributionName::MajorityP, {1, 16, 1}},
        {DistributionName::MajorityN, {1, 1, 16}},     {DistributionName::ConsensusF, {18, 0, 0}},
        {DistributionName::ConsensusP, {0, 18, 0}},    {DistributionName::ConsensusN, {0, 0, 18}},
    };
    const auto t0 = Clock::now();
    StubbornOracle oracle;
    int ok = 0;
    std::string detail;
    for (const auto& [name, counts] : expect) {
        const auto cfg = base_sim(name, 20);
        Engine engine(cfg, oracle);
        std::vector<FinalDistribution> finals;
        for (int i = 0; i < cfg.n_simulations; ++i)
            finals.push_back(final_distribution(std::span<const AgentState>(run_simulation(engine, i).final_agents)));
        const auto agg = aggregate_distribution(finals);
        bool good      = true;
        int k          = 0;
        for (auto s : {Stance::Full, Stance::Partial, Stance::No}) {
            const double want = 100.0 * counts[k++] / 18.0;
            good = good && std::fabs(agg.of(s).mean - want) <= 1e-9 && std::fabs(agg.of(s).std) <= 1e-9;
        }
        ok += good;
        if (name == DistributionName::MajorityN)
            detail = "MajorityN N=" + fixed(agg.of(Stance::No).mean, 2) + " +/- " + fixed(agg.of(Stance::No).std, 2);
        if (!good)
            detail += " mismatch:" + InitialDistribution::named(name).display_name();
    }
    const double secs = seconds_since(t0);
    const bool pass   = ok == 10 && secs < 30.0;
    return {pass ? Verdict::Pass : Verdict::Fail,
            std::to_string(ok) + "/10 distributions, " + detail + ", " + num(secs, 2) + " s"};
}

// 4. Midpoint oracle from Polarization-P: final Partial % vs fraction of agents selected at least once.
Outcome midpoint_convergence()
{
    const auto t0  = Clock::now();
    const auto cfg = base_sim(DistributionName::PolarizationP, 20);
    MidpointOracle oracle;
    Engine engine(cfg, oracle);
    int sims_ok = 0, alloc_ok = 0, met_ok = 0;
    std::string detail;
    for (int i = 0; i < cfg.n_simulations; ++i) {
        const auto r = run_simulation(engine, i);
        std::set<int> selected;
        // agents that ever faced a partner holding a different allocation, directly or not
        std::vector<double> alloc(18);
        std::vector<bool> mixed(18, false);
        for (const auto& a : r.initial)
            alloc[a.agent_id] = *oracle_allocation(a.current.text);
        for (std::size_t k = 0; k + 1 < r.events.size(); k += 2) {
            const int a = r.events[k].agent_id, b = r.events[k].partner_id;
            selected.insert(a);
            selected.insert(b);
            if (alloc[a] != alloc[b])
                mixed[a] = mixed[b] = true;
            const double m = (alloc[a] + alloc[b]) / 2.0;
            alloc[a] = alloc[b] = m;
        }
        int partial = 0, in_open = 0, n_mixed = 0;
        for (const auto& a : r.final_agents) {
            partial += a.current.classified.stance == Stance::Partial;
            n_mixed += mixed[a.agent_id];
            if (selected.count(a.agent_id)) {
                const auto& v = a.current.classified.allocation;
                in_open += v && *v > 0.0 && *v < 100.0;
            }
        }
        const double partial_pct  = 100.0 * partial / 18.0;
        const double selected_pct = 100.0 * static_cast<double>(selected.size()) / 18.0;
        sims_ok += partial_pct == selected_pct;
        alloc_ok += in_open == static_cast<int>(selected.size());
        met_ok += partial == n_mixed;
        if (partial_pct != selected_pct && detail.size() < 200)
            detail += " sim" + std::to_string(i) + ": partial " + fixed(partial_pct, 2) + " vs selected " +
                      fixed(selected_pct, 2) + ";";
    }
    const double secs = seconds_since(t0);
    const bool pass   = sims_ok == cfg.n_simulations && alloc_ok == cfg.n_simulations && secs < 30.0;
    std::cout << "  info: final Partial count equals agents that met a differing allocation in " << met_ok << "/"
              << cfg.n_simulations << " simulations\n";
    return {pass ? Verdict::Pass : Verdict::Fail,
            std::to_string(sims_ok) + "/20 sims exact, allocation in (0,100) for selected agents in " +
                std::to_string(alloc_ok) + "/20, " + num(secs, 2) + " s;" + detail};
}

// 5. Byte-identical transcripts, and interrupt + resume matches an uninterrupted run.
Outcome determinism_replay()
{
    auto cfg = parse_config(R"({"mode":"freeform","backend":{"kind":"midpoint"},"n_agents":18,"n_rounds":90,
        "n_simulations":3,"distribution":"Equivalent","seed":77,"checkpoint_interval":10})");
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    std::ostringstream log;
    const int ra = cmd_run(cfg, a, log);
    const int rb = cmd_run(cfg, b, log);
    auto broken               = cfg;
    broken.backend.fail_after = 250; // dies inside the second simulation
    const int rc_fail         = cmd_run(broken, c, log);
    const int rc_resume       = cmd_resume(c, std::nullopt, log);
    int same_ab = 0, same_ac = 0;
    for (int i = 0; i < 3; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "sim_%03d.jsonl", i);
        const auto ta = slurp(a / name);
        same_ab += !ta.empty() && ta == slurp(b / name);
        same_ac += !ta.empty() && ta == slurp(c / name);
    }
    const bool pass = ra == 0 && rb == 0 && rc_fail == 1 && rc_resume == 0 && same_ab == 3 && same_ac == 3;
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
    return {pass ? Verdict::Pass : Verdict::Fail,
            "repeat identical " + std::to_string(same_ab) + "/3, resumed identical " + std::to_string(same_ac) +
                "/3 (interrupted rc " + std::to_string(rc_fail) + ", resume rc " + std::to_string(rc_resume) + ")"};
}

// 6. 10^5 pair draws at N=18, chi-square against 153 equally likely pairs.
Outcome scheduler_uniformity()
{
    std::mt19937_64 rng(child_seed(20240601, 0));
    const int n = 18, draws = 100000, cells = n * (n - 1) / 2;
    std::map<std::pair<int, int>, long> counts;
    for (int k = 0; k < draws; ++k) {
        auto [i, j] = select_pair(rng, n);
        ++counts[{std::min(i, j), std::max(i, j)}];
    }
    const double expected = static_cast<double>(draws) / cells;
    double chi2           = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const auto it  = counts.find({i, j});
            const double o = it == counts.end() ? 0.0 : static_cast<double>(it->second);
            chi2 += (o - expected) * (o - expected) / expected;
        }
    const double p = teststats::chi2_sf(chi2, cells - 1);
    return {p > 0.001 && static_cast<int>(counts.size()) == cells ? Verdict::Pass : Verdict::Fail,
            "chi2=" + num(chi2, 2) + " df=" + std::to_string(cells - 1) + " p=" + num(p, 4) + " cells=" +
                std::to_string(counts.size())};
}

// 7. 52 of 63 non-consensus combinations and 27 of 27 consensus ones.
Outcome consensus_arithmetic()
{
    std::vector<CombinationResult> results;
    const auto settings = enumerate_connotation_settings();
    int noncons         = 0;
    for (const auto& d : InitialDistribution::all_named()) {
        for (const auto& s : settings) {
            CombinationResult r;
            r.distribution = d;
            r.setting      = s;
            const auto target = d.consensus_stance().value_or(Stance::Partial);
            for (int sim = 0; sim < 20; ++sim) {
                std::vector<Stance> finals(18, target);
                if (!d.consensus_stance() && noncons >= 52 && sim == 7)
                    finals[3] = Stance::No;
                r.finals.push_back(finals);
            }
            if (!d.consensus_stance())
                ++noncons;
            results.push_back(std::move(r));
        }
    }
    const auto s         = consensus_summary(results, 20);
    const auto noncons_s = fixed(s.pct_noncons_all_partial, 2);
    const auto cons_s    = fixed(s.pct_cons_kept, 2);
    // Table 5, Llama 3 memoryless column
    const auto paper   = slurp(fs::path(OPDYN_SOURCE_DIR) / "paper.md");
    const bool in_paper = paper.find("ends in consensus on partial funding:\t" + noncons_s + "%") != std::string::npos &&
                          paper.find("keeps the same consensus:\t" + cons_s + "%") != std::string::npos;
    const bool pass = s.noncons_counted == 52 && s.noncons_combos_total == 63 && s.cons_counted == 27 &&
                      s.cons_combos_total == 27 && noncons_s == "82.54" && cons_s == "100.00" && in_paper;
    return {pass ? Verdict::Pass : Verdict::Fail,
            std::to_string(s.noncons_counted) + "/" + std::to_string(s.noncons_combos_total) + " -> " + noncons_s +
                "%, " + std::to_string(s.cons_counted) + "/" + std::to_string(s.cons_combos_total) + " -> " + cons_s +
                "%, matches paper table: " + (in_paper ? "yes" : "no")};
}

// 8. "the same" re-query with the suffix; "Option: (b)" adopts the partial template verbatim.
Outcome retry_and_option()
{
    SimulationConfig cfg;
    cfg.n_agents      = 4;
    cfg.n_rounds      = 1;
    cfg.n_simulations = 1;
    cfg.subject       = make_subject({});
    ScriptedBackend ff({"My view is the same as before.", "Thing A should receive 40% of the funding.",
                        "Thing A should receive 60% of the funding."});
    Engine e1(cfg, ff);
    auto st  = init_simulation(cfg, 0);
    auto ev  = e1.run_interaction(st);
    bool ok1 = ff.requests().size() == 3 && ev[0].retried && !ev[1].retried;
    if (ok1) {
        const auto& orig  = ff.requests()[0].user_prompt;
        const auto& again = ff.requests()[1].user_prompt;
        // second-to-last sentence: the text before the final ". " boundary
        const auto last_break = orig.rfind(". ");
        const std::string suffix = ", even if the funding remains the same.";
        ok1 = again == orig.substr(0, last_break) + suffix + orig.substr(last_break + 1) &&
              ff.requests()[2].user_prompt.find(suffix) == std::string::npos;
    }

    cfg.mode = Mode::ClosedForm;
    ScriptedBackend cf({"Option: (b)", "Option: (b)"});
    Engine e2(cfg, cf);
    auto st2      = init_simulation(cfg, 0);
    auto ev2      = e2.run_interaction(st2);
    const auto pt = render_initial_opinion(Stance::Partial, cfg.subject);
    const bool ok2 =
        st2.agents[ev2[0].agent_id].current.text == pt && st2.agents[ev2[1].agent_id].current.text == pt;
    return {ok1 && ok2 ? Verdict::Pass : Verdict::Fail,
            std::string("retry rule ") + (ok1 ? "ok" : "wrong") + ", option adoption " + (ok2 ? "ok" : "wrong")};
}

// 9. {5, 15, 95} -> 1/3, 1/3, 0..., 1/3; 100 in the last bin; 10 bins.
Outcome histogram_exactness()
{
    const std::vector<double> v = {5, 15, 95};
    const auto h                = allocation_histogram(v, 3);
    std::array<double, 10> want{};
    want[0] = want[1] = want[9] = 1.0 / 3.0;
    bool ok = h.frequencies.size() == 10 && h.counts.size() == 10;
    for (int k = 0; k < 10; ++k)
        ok = ok && std::fabs(h.frequencies[k] - want[k]) < 1e-12;
    const std::vector<double> hundred = {100};
    const auto h2                     = allocation_histogram(hundred, 1);
    ok = ok && h2.counts[9] == 1 && histogram_bin(100.0) == 9;
    const auto h0 = allocation_histogram({}, 0);
    ok            = ok && h0.counts.size() == 10;
    return {ok ? Verdict::Pass : Verdict::Fail,
            "freqs " + num(h.frequencies[0], 4) + "," + num(h.frequencies[1], 4) + ",0...," + num(h.frequencies[9], 4) +
                "; 100 -> bin " + std::to_string(histogram_bin(100.0))};
}

// 10. Opt-in live run, 4 agents x 6 rounds, zero unclassified.
Outcome live_smoke()
{
    if (!std::getenv("OPDYN_LIVE_ENDPOINT"))
        return {Verdict::Skip, "set OPDYN_LIVE_ENDPOINT=1 with OPDYN_BASE_URL, OPDYN_API_KEY, OPDYN_LIVE_MODEL"};
    SimulationConfig cfg;
    cfg.n_agents      = 4;
    cfg.n_rounds      = 6;
    cfg.n_simulations = 1;
    cfg.distribution  = InitialDistribution::named(DistributionName::Equivalent);
    cfg.subject       = make_subject({});
    cfg.model_id      = std::getenv("OPDYN_LIVE_MODEL") ? std::getenv("OPDYN_LIVE_MODEL") : "";
    HttpEndpointConfig hc;
    HttpChatBackend backend(hc);
    Engine engine(cfg, backend);
    const auto r = run_simulation(engine, 0);
    int unclassified = 0;
    for (const auto& ev : r.events)
        unclassified += ev.classified.unclassified;
    const bool pass = r.events.size() == 12 && unclassified == 0;
    return {pass ? Verdict::Pass : Verdict::Fail,
            std::to_string(r.events.size()) + " interactions, " + std::to_string(unclassified) + " unclassified"};
}

struct Criterion
{
    const char* title;
    Outcome (*run)();
};

const std::map<int, Criterion> kCriteria = {
    {1, {"template round-trip", template_round_trip}},
    {2, {"classifier corpus", classifier_corpus}},
    {3, {"stubborn-oracle preservation", stubborn_preservation}},
    {4, {"midpoint-oracle convergence", midpoint_convergence}},
    {5, {"determinism and replay", determinism_replay}},
    {6, {"scheduler uniformity", scheduler_uniformity}},
    {7, {"consensus-summary arithmetic", consensus_arithmetic}},
    {8, {"retry and option rules", retry_and_option}},
    {9, {"histogram exactness", histogram_exactness}},
    {10, {"live-endpoint smoke test", live_smoke}},
};

int run_one(int n)
{
    const auto& c = kCriteria.at(n);
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    std::cout << "criterion " << n << " [PRIMARY] " << c.title << ": " << tag << " (" << o.detail << ")\n";
    return o.verdict == Verdict::Pass ? 0 : o.verdict == Verdict::Fail ? 1 : 77;
}
} // namespace

int main(int argc, char** argv)
{
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc)
            which.push_back(std::atoi(argv[++i]));
        else if (a == "--all")
            for (const auto& [n, c] : kCriteria)
                which.push_back(n);
        else {
            std::cerr << "usage: acceptance --criterion N | --all\n";
            return 2;
        }
    }
    if (which.empty())
        for (const auto& [n, c] : kCriteria)
            which.push_back(n);
    int worst = 0;
    for (int n : which) {
        if (!kCriteria.count(n)) {
            std::cerr << "no criterion " << n << "\n";
            return 2;
        }
        const int rc = run_one(n);
        if (rc == 1 || worst == 0)
            worst = rc == 77 && which.size() > 1 ? worst : rc;
    }
    return worst;
}

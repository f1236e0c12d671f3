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
#include "opdyn/commands.hpp"
#include "opdyn/errors.hpp"

#include "json_io.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <mutex>
#include <thread>

namespace opdyn
{

namespace fs = std::filesystem;
using jsonio::json;

namespace
{

constexpr const char* kManifest = "manifest.json";
constexpr const char* kConfig   = "config.json";

std::string sim_stem(int index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "sim_%03d", index);
    return buf;
}

// Sums completion latency on top of writing the transcript.
struct TimingObserver : RoundObserver
{
    TranscriptWriter& writer;
    std::int64_t latency_ms = 0;
    int completions         = 0;

    explicit TimingObserver(TranscriptWriter& w)
        : writer(w)
    {
    }
    void round_done(const SimulationState& state, const std::array<InteractionEvent, 2>& events) override
    {
        writer.round_done(state, events);
        for (const auto& e : events)
            for (const auto& m : e.meta) {
                latency_ms += m.latency.count();
                ++completions;
            }
    }
};

void write_report(const fs::path& dir, const RunReport& r, std::ostream& log)
{
    if (!r.aggregate) {
        log << dir.string() << ": no completed simulation, summaries not written\n";
        return;
    }
    write_distribution_csv(dir / "distribution.csv", {{r.combination, *r.aggregate}});
    write_histogram_csv(dir / "histogram.csv", r.histogram);
    for (const auto& sim : r.simulations) {
        if (!sim.complete())
            continue;
        std::vector<std::vector<int>> traces;
        for (const auto& h : sim.histories())
            traces.push_back(evolution_trace(h, sim.n_rounds));
        write_traces_csv(dir / ("traces_" + sim_stem(sim.simulation_index) + ".csv"), sim.simulation_index, traces);
    }
}

void print_table(const RunReport& r, std::ostream& log)
{
    if (!r.aggregate)
        return;
    log << r.combination << " (" << r.aggregate->n_simulations << " simulations";
    if (r.incomplete)
        log << ", " << r.incomplete << " incomplete";
    log << ")\n";
    for (auto s : {Stance::Full, Stance::Partial, Stance::No}) {
        const auto& ms = r.aggregate->of(s);
        log << "  " << to_string(s) << ": " << fixed(ms.mean, 2) << " +/- " << fixed(ms.std, 2) << '\n';
    }
}

RunConfig stored_config(const fs::path& dir)
{
    return parse_config(read_file(dir / kConfig), dir);
}

// Runs (or continues) every simulation that is not done yet.
int execute(const RunConfig& cfg, const fs::path& dir, RunManifest& manifest, bool resuming, std::ostream& log)
{
    auto backend = make_backend(cfg.backend);
    Engine engine(cfg.sim, *backend, classifier_for(cfg.sim.subject, lexicon_of(cfg)));
    const auto combination = combination_name(cfg.sim.distribution, cfg.setting);
    std::mutex mu;
    auto save = [&] { manifest.save(dir / kManifest); };
    // an unreachable endpoint or rejected key will fail every later simulation too
    std::atomic<bool> halt{false};

    auto run_one = [&](std::size_t k) {
        if (halt)
            return;
        std::string transcript, checkpoint;
        int index = 0;
        {
            std::lock_guard lock(mu);
            auto& e = manifest.simulations[k];
            if (e.status == RunStatus::Done)
                return;
            manifest.advance(k, RunStatus::Running);
            save();
            transcript = e.transcript;
            checkpoint = e.checkpoint;
            index      = e.index;
        }
        TranscriptWriter writer(dir / transcript, dir / checkpoint, engine.config(), {combination});
        TimingObserver timing(writer);
        SimulationState state;
        bool started = false;
        std::string error;
        try {
            if (resuming && fs::exists(dir / checkpoint)) {
                auto c = load_checkpoint(dir / checkpoint);
                if (c.state.simulation_index != index || c.state.seed != child_seed(cfg.sim.master_seed, index))
                    throw IoError("checkpoint " + checkpoint + " belongs to a different simulation or seed");
                state = std::move(c.state);
                writer.reopen(c.transcript_offset);
            } else {
                state = init_simulation(cfg.sim, index);
                writer.start(state);
            }
            started = true;
            engine.advance(state, &timing);
        } catch (const std::exception& ex) {
            error = ex.what();
            if (dynamic_cast<const BackendError*>(&ex) || dynamic_cast<const ConfigError*>(&ex))
                halt = true;
            if (started) {
                try {
                    writer.write_checkpoint(state);
                } catch (const std::exception& cex) {
                    error += std::string(" (checkpoint failed: ") + cex.what() + ")";
                }
            }
        }
        std::lock_guard lock(mu);
        auto& e = manifest.simulations[k];
        e.rounds_completed = state.t;
        e.latency_ms += timing.latency_ms;
        e.completions += timing.completions;
        if (error.empty()) {
            manifest.advance(k, RunStatus::Done);
        } else {
            e.error = error;
            manifest.advance(k, RunStatus::Failed);
            log << dir.string() << ": simulation " << index << " failed at round " << state.t + 1 << ": " << error
                << '\n';
        }
        save();
    };

    const auto n       = manifest.simulations.size();
    const auto workers = backend->concurrent_safe()
                             ? std::min<std::size_t>(static_cast<std::size_t>(cfg.sim.parallelism), n)
                             : std::size_t{1};
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto k = next++; k < n; k = next++)
            run_one(k);
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    if (halt) {
        const auto pending = std::count_if(manifest.simulations.begin(), manifest.simulations.end(),
                                           [](const SimulationEntry& e) { return e.status == RunStatus::Pending; });
        if (pending > 0)
            log << dir.string() << ": stopped after a backend failure, " << pending
                << " simulation(s) not started; continue with `opdyn resume`\n";
    }

    const auto report = analyze_run(dir);
    write_report(dir, report, log);
    print_table(report, log);

    const bool ok = std::all_of(manifest.simulations.begin(), manifest.simulations.end(),
                                [](const SimulationEntry& e) { return e.status == RunStatus::Done; });
    manifest.outputs = {"config.json", "distribution.csv", "histogram.csv"};
    for (const auto& e : manifest.simulations) {
        manifest.outputs.push_back(e.transcript);
        if (e.status == RunStatus::Done)
            manifest.outputs.push_back("traces_" + sim_stem(e.index) + ".csv");
    }
    manifest.finished_at = utc_timestamp();
    manifest.advance(ok ? RunStatus::Done : RunStatus::Failed);
    save();
    return ok ? 0 : 1;
}

void prepare_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    if (fs::exists(dir / kManifest))
        throw ConfigError(dir.string() + " already holds a run; use resume or choose another --out");
}

RunManifest fresh_manifest(const std::string& kind)
{
    RunManifest m;
    m.run_id     = new_run_id();
    m.kind       = kind;
    m.started_at = utc_timestamp();
    return m;
}

RunConfig cell_config(const RunConfig& grid, const InitialDistribution& d, const ConnotationSetting& s)
{
    RunConfig c       = grid;
    c.sim.distribution = d;
    c.setting          = s;
    c.refresh_subject();
    return c;
}

int write_consensus(const fs::path& dir, const RunConfig& cfg, std::ostream& log)
{
    std::vector<CombinationResult> results;
    std::vector<DistributionRow> rows;
    for (const auto& d : cfg.grid.distributions) {
        for (const auto& s : cfg.grid.settings) {
            const auto cell = dir / combination_name(d, s);
            if (!fs::exists(cell / kManifest)) {
                CombinationResult missing;
                missing.distribution = d;
                missing.setting      = s;
                missing.complete     = false;
                results.push_back(std::move(missing));
                continue;
            }
            auto r = analyze_run(cell);
            results.push_back(r.combination_result);
            if (r.aggregate)
                rows.push_back({r.combination, *r.aggregate});
        }
    }
    const auto summary = consensus_summary(results, static_cast<std::size_t>(cfg.sim.n_simulations));
    for (const auto& w : summary.warnings)
        log << "warning: " << w << '\n';
    write_consensus_csv(dir / "consensus.csv", summary);
    write_distribution_csv(dir / "distribution.csv", rows);
    log << "non-consensus starts ending all Partial: " << summary.noncons_counted << "/"
        << summary.noncons_combos_total << " (" << fixed(summary.pct_noncons_all_partial, 2) << "%)\n";
    log << "consensus starts kept: " << summary.cons_counted << "/" << summary.cons_combos_total << " ("
        << fixed(summary.pct_cons_kept, 2) << "%)\n";
    return summary.warnings.empty() ? 0 : 1;
}

int run_grid(const RunConfig& cfg, const fs::path& dir, RunManifest& manifest, bool resuming,
             const std::optional<BackendSpec>& backend, std::ostream& log)
{
    auto save = [&] { manifest.save(dir / kManifest); };
    std::size_t k = 0;
    for (const auto& d : cfg.grid.distributions) {
        for (const auto& s : cfg.grid.settings) {
            auto& entry = manifest.simulations.at(k);
            if (entry.status == RunStatus::Done) {
                ++k;
                continue;
            }
            manifest.advance(k, RunStatus::Running);
            save();
            const auto cell = dir / entry.transcript;
            int rc          = 1;
            try {
                if (resuming && fs::exists(cell / kManifest))
                    rc = cmd_resume(cell, backend, log);
                else
                    rc = cmd_run(cell_config(cfg, d, s), cell, log);
            } catch (const std::exception& ex) {
                entry.error = ex.what();
                log << cell.string() << ": " << ex.what() << '\n';
            }
            manifest.advance(k, rc == 0 ? RunStatus::Done : RunStatus::Failed);
            save();
            ++k;
        }
    }
    const int rc = write_consensus(dir, cfg, log);
    const bool ok = rc == 0 && std::all_of(manifest.simulations.begin(), manifest.simulations.end(),
                                           [](const SimulationEntry& e) { return e.status == RunStatus::Done; });
    manifest.outputs     = {"config.json", "consensus.csv", "distribution.csv"};
    manifest.finished_at = utc_timestamp();
    manifest.advance(ok ? RunStatus::Done : RunStatus::Failed);
    save();
    return ok ? 0 : 1;
}

json classified_line(const ClassifiedOpinion& c)
{
    auto j = jsonio::to_json(c);
    j.erase("anomalies");
    if (!c.anomalies.empty())
        j["anomalies"] = c.anomalies;
    return j;
}

bool same_label(const ClassifiedOpinion& a, const ClassifiedOpinion& b)
{
    return a.stance == b.stance && a.no_kind == b.no_kind && a.allocation == b.allocation &&
           a.implicit == b.implicit && a.unclassified == b.unclassified &&
           a.resolved_from_time == b.resolved_from_time;
}

int classify_transcript(const fs::path& input, const ClassifyOptions& opts, std::ostream& out)
{
    const auto data = read_transcript(input);
    const auto mode = opts.mode.value_or(data.mode);
    DiscussionSubject subject;
    if (!data.item_a.empty())
        subject.item_a_text = data.item_a;
    if (!data.item_b.empty())
        subject.item_b_text = data.item_b;
    const auto classifier = classifier_for(subject, opts.lexicon);

    std::vector<std::vector<OpinionRecord>> h;
    for (const auto& a : data.initial)
        h.push_back({a.current});
    std::size_t mismatches = 0;
    for (const auto& e : data.events) {
        auto& hist = h.at(static_cast<std::size_t>(e.agent_id));
        ClassifiedOpinion c;
        if (mode == Mode::FreeForm) {
            c = classifier.classify(e.new_text, Mode::FreeForm, opts.strict);
            if (c.implicit || c.unclassified) {
                auto tmp = hist;
                tmp.push_back({e.t, e.new_text, c});
                c = resolve_implicit(tmp);
            }
        } else {
            const auto p = parse_option(e.raw_response);
            if (p.label) {
                const auto s = stance_of(*p.label);
                c = make_classified(s, s == Stance::No ? std::optional(NoKind::ExplicitZero) : std::nullopt);
            } else {
                c = hist.back().classified;
                c.anomalies.push_back("option_ambiguous");
            }
        }
        const bool match = same_label(c, e.classified);
        mismatches += match ? 0 : 1;
        auto line          = classified_line(c);
        line["simulation"] = e.simulation_index;
        line["t"]          = e.t;
        line["agent_id"]   = e.agent_id;
        line["matches_stored"] = match;
        out << line.dump() << '\n';
        hist.push_back({e.t, e.new_text, c});
    }
    out << "events: " << data.events.size() << ", mismatches: " << mismatches << '\n';
    return mismatches == 0 ? 0 : 1;
}

int classify_corpus(const fs::path& input, const ClassifyOptions& opts, std::ostream& out)
{
    const auto corpus = load_corpus(input);
    const Classifier classifier(opts.lexicon);
    const auto report = evaluate_corpus(classifier, corpus);
    for (const auto& f : report.failures) {
        auto line        = classified_line(f.got);
        line["index"]    = f.index;
        line["text"]     = f.expected.text;
        line["expected"] = {{"stance", f.expected.implicit ? "implicit" : std::string(to_string(f.expected.stance))},
                            {"no_kind", f.expected.no_kind ? json(std::string(to_string(*f.expected.no_kind)))
                                                           : json(nullptr)},
                            {"allocation", f.expected.allocation ? json(*f.expected.allocation) : json(nullptr)}};
        out << line.dump() << '\n';
    }
    out << "accuracy: " << report.correct << "/" << report.total << " (" << fixed(100.0 * report.accuracy(), 2)
        << "%)\n";
    return report.correct == report.total ? 0 : 1;
}

int classify_lines(const fs::path& input, const ClassifyOptions& opts, std::ostream& out)
{
    std::ifstream in(input);
    if (!in)
        throw IoError("cannot open " + input.string());
    const Classifier classifier(opts.lexicon);
    const auto mode = opts.mode.value_or(Mode::FreeForm);
    std::vector<std::size_t> offending;
    std::string text;
    std::size_t lineno = 0;
    while (std::getline(in, text)) {
        ++lineno;
        if (text.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto c = classifier.classify(text, mode, false);
        auto line    = classified_line(c);
        line["line"] = lineno;
        out << line.dump() << '\n';
        if (c.unclassified)
            offending.push_back(lineno);
    }
    if (opts.strict && !offending.empty()) {
        out << "unclassified lines:";
        for (auto n : offending)
            out << ' ' << n;
        out << '\n';
        return 1;
    }
    return 0;
}

} // namespace

std::string combination_name(const InitialDistribution& d, const ConnotationSetting& s)
{
    std::string name = d.display_name();
    for (auto& c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-')
            c = '_';
    return name + "__" + s.slug();
}

RunReport analyze_run(const fs::path& dir)
{
    if (!fs::exists(dir / kManifest))
        throw IoError(dir.string() + " is not a run directory (no manifest.json)");
    const auto manifest = RunManifest::load(dir / kManifest);
    const auto cfg      = stored_config(dir);
    RunReport r;
    r.combination                          = combination_name(cfg.sim.distribution, cfg.setting);
    r.combination_result.distribution     = cfg.sim.distribution;
    r.combination_result.setting          = cfg.setting;
    std::vector<FinalDistribution> finals;
    std::vector<OpinionRecord> final_opinions;
    for (const auto& e : manifest.simulations) {
        const auto path = dir / e.transcript;
        if (!fs::exists(path)) {
            if (e.status == RunStatus::Pending)
                continue;
            throw IoError("missing transcript " + path.string());
        }
        auto data = read_transcript(path);
        if (!data.complete()) {
            ++r.incomplete;
            r.simulations.push_back(std::move(data));
            continue;
        }
        std::vector<Stance> stances;
        for (const auto& h : data.histories()) {
            stances.push_back(h.back().classified.stance);
            final_opinions.push_back(h.back());
        }
        finals.push_back(final_distribution(stances));
        r.combination_result.finals.push_back(std::move(stances));
        r.simulations.push_back(std::move(data));
    }
    if (r.simulations.empty())
        throw IoError(dir.string() + " has no transcripts");
    r.combination_result.complete = r.incomplete == 0 && finals.size() == manifest.simulations.size();
    if (!finals.empty())
        r.aggregate = aggregate_distribution(finals);
    r.histogram = allocation_histogram(explicit_allocations(final_opinions), final_opinions.size());
    return r;
}

int cmd_run(const RunConfig& config, const fs::path& out_dir, std::ostream& log)
{
    config.validate();
    prepare_dir(out_dir);
    write_file_atomic(out_dir / kConfig, config_to_json(config) + "\n");
    auto m = fresh_manifest("run");
    for (int i = 0; i < config.sim.n_simulations; ++i) {
        SimulationEntry e;
        e.index      = i;
        e.transcript = sim_stem(i) + ".jsonl";
        e.checkpoint = sim_stem(i) + ".checkpoint.json";
        m.simulations.push_back(std::move(e));
    }
    m.save(out_dir / kManifest);
    m.advance(RunStatus::Running);
    m.save(out_dir / kManifest);
    return execute(config, out_dir, m, false, log);
}

int cmd_grid(const RunConfig& config, const fs::path& out_dir, std::ostream& log)
{
    config.validate();
    prepare_dir(out_dir);
    write_file_atomic(out_dir / kConfig, config_to_json(config) + "\n");
    auto m = fresh_manifest("grid");
    int k  = 0;
    for (const auto& d : config.grid.distributions) {
        for (const auto& s : config.grid.settings) {
            cell_config(config, d, s).validate();
            SimulationEntry e;
            e.index      = k++;
            e.transcript = combination_name(d, s);
            m.simulations.push_back(std::move(e));
        }
    }
    m.save(out_dir / kManifest);
    m.advance(RunStatus::Running);
    m.save(out_dir / kManifest);
    return run_grid(config, out_dir, m, false, std::nullopt, log);
}

int cmd_resume(const fs::path& dir, const std::optional<BackendSpec>& backend, std::ostream& log)
{
    if (!fs::exists(dir / kManifest))
        throw IoError(dir.string() + " is not a run directory (no manifest.json)");
    auto m   = RunManifest::load(dir / kManifest);
    auto cfg = stored_config(dir);
    if (backend)
        cfg.backend = *backend;
    else
        cfg.backend.fail_after.reset();
    m.reopen();
    m.save(dir / kManifest);
    if (m.kind == "grid")
        return run_grid(cfg, dir, m, true, backend, log);
    return execute(cfg, dir, m, true, log);
}

int cmd_report(const fs::path& dir, std::ostream& log)
{
    if (!fs::exists(dir / kManifest))
        throw IoError(dir.string() + " is not a run directory (no manifest.json)");
    const auto m = RunManifest::load(dir / kManifest);
    if (m.kind == "grid")
        return write_consensus(dir, stored_config(dir), log);
    const auto r = analyze_run(dir);
    write_report(dir, r, log);
    print_table(r, log);
    return r.aggregate ? 0 : 1;
}

int cmd_classify(const fs::path& input, const ClassifyOptions& options, std::ostream& out)
{
    if (!fs::exists(input))
        throw IoError("no such file: " + input.string());
    if (options.corpus)
        return classify_corpus(input, options, out);
    if (is_transcript(input))
        return classify_transcript(input, options, out);
    return classify_lines(input, options, out);
}

} // namespace opdyn

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
#include "opdyn/persistence.hpp"
#include "opdyn/errors.hpp"

#include "opdyn/backends.hpp"

#include "json_io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <random>
#include <sstream>

namespace opdyn
{

namespace fs = std::filesystem;
using jsonio::json;

void write_file_atomic(const fs::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write " + tmp.string());
        out << content;
        if (!out.flush())
            throw IoError("cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

TranscriptWriter::TranscriptWriter(fs::path transcript, fs::path checkpoint, const SimulationConfig& config,
                                   TranscriptInfo info)
    : m_transcript(std::move(transcript))
    , m_checkpoint(std::move(checkpoint))
    , m_config(config)
    , m_info(std::move(info))
{
}

void TranscriptWriter::append(const std::string& line)
{
    m_out << line << '\n';
    if (!m_out)
        throw IoError("cannot append to " + m_transcript.string());
    m_offset += line.size() + 1;
}

void TranscriptWriter::start(const SimulationState& initial)
{
    m_out = std::ofstream(m_transcript, std::ios::binary | std::ios::trunc);
    if (!m_out)
        throw IoError("cannot create " + m_transcript.string());
    m_offset = 0;
    const json header = {{"type", "header"},
                         {"schema", "opdyn.transcript"},
                         {"version", kTranscriptVersion},
                         {"library_version", m_info.library_version},
                         {"simulation", initial.simulation_index},
                         {"seed", initial.seed},
                         {"n_agents", m_config.n_agents},
                         {"n_rounds", m_config.n_rounds},
                         {"mode", std::string(to_string(m_config.mode))},
                         {"with_memory", m_config.with_memory},
                         {"distribution", m_config.distribution.display_name()},
                         {"combination", m_info.combination},
                         {"item_a", m_config.subject.item_a_text},
                         {"item_b", m_config.subject.item_b_text}};
    append(header.dump());
    for (const auto& a : initial.agents)
        append(json{{"type", "initial"}, {"agent_id", a.agent_id}, {"record", jsonio::to_json(a.current)}}.dump());
    m_out.flush();
    write_checkpoint(initial);
}

void TranscriptWriter::reopen(std::uint64_t offset)
{
    std::error_code ec;
    const auto size = fs::file_size(m_transcript, ec);
    if (ec || size < offset)
        throw IoError("transcript " + m_transcript.string() + " is shorter than its checkpoint");
    fs::resize_file(m_transcript, offset);
    m_out = std::ofstream(m_transcript, std::ios::binary | std::ios::app);
    if (!m_out)
        throw IoError("cannot reopen " + m_transcript.string());
    m_offset = offset;
}

void TranscriptWriter::round_done(const SimulationState& state, const std::array<InteractionEvent, 2>& events)
{
    for (const auto& e : events)
        append(jsonio::to_json(e).dump());
    m_out.flush();
    if (state.t % m_config.checkpoint_interval == 0 || state.t == m_config.n_rounds)
        write_checkpoint(state);
}

void TranscriptWriter::write_checkpoint(const SimulationState& state)
{
    m_out.flush();
    save_checkpoint(m_checkpoint, state, m_offset);
}

void save_checkpoint(const fs::path& path, const SimulationState& state, std::uint64_t transcript_offset)
{
    std::ostringstream rng;
    rng << state.rng;
    json agents = json::array();
    for (const auto& a : state.agents)
        agents.push_back(jsonio::to_json(a));
    json histories = json::array();
    for (const auto& h : state.histories) {
        json list = json::array();
        for (const auto& r : h)
            list.push_back(jsonio::to_json(r));
        histories.push_back(list);
    }
    const json j = {{"version", kCheckpointVersion}, {"simulation", state.simulation_index},
                    {"seed", state.seed},            {"t", state.t},
                    {"rng", rng.str()},              {"transcript_offset", transcript_offset},
                    {"agents", agents},              {"histories", histories}};
    write_file_atomic(path, j.dump() + "\n");
}

Checkpoint load_checkpoint(const fs::path& path)
{
    try {
        const auto j = json::parse(read_file(path));
        if (j.at("version").get<int>() != kCheckpointVersion)
            throw IoError("checkpoint " + path.string() + " has an unsupported version");
        Checkpoint c;
        c.state.simulation_index = j.at("simulation").get<int>();
        c.state.seed             = j.at("seed").get<std::uint64_t>();
        c.state.t                = j.at("t").get<int>();
        std::istringstream rng(j.at("rng").get<std::string>());
        rng >> c.state.rng;
        if (!rng)
            throw IoError("checkpoint " + path.string() + " has a corrupt generator state");
        for (const auto& a : j.at("agents"))
            c.state.agents.push_back(jsonio::agent_from_json(a));
        for (const auto& h : j.at("histories")) {
            std::vector<OpinionRecord> list;
            for (const auto& r : h)
                list.push_back(jsonio::record_from_json(r));
            c.state.histories.push_back(std::move(list));
        }
        c.transcript_offset = j.at("transcript_offset").get<std::uint64_t>();
        return c;
    } catch (const json::exception& e) {
        throw IoError("checkpoint " + path.string() + " is corrupt: " + e.what());
    }
}

std::vector<std::vector<OpinionRecord>> TranscriptData::histories() const
{
    std::vector<std::vector<OpinionRecord>> h;
    for (const auto& a : initial)
        h.push_back({a.current});
    for (const auto& e : events) {
        if (e.agent_id < 0 || static_cast<std::size_t>(e.agent_id) >= h.size())
            throw IoError("transcript event names an unknown agent");
        h[static_cast<std::size_t>(e.agent_id)].push_back({e.t, e.new_text, e.classified});
    }
    return h;
}

bool is_transcript(const fs::path& path)
{
    std::ifstream in(path);
    std::string line;
    if (!in || !std::getline(in, line))
        return false;
    try {
        const auto j = json::parse(line);
        return j.is_object() && j.value("type", "") == "header" && j.value("schema", "") == "opdyn.transcript";
    } catch (const json::exception&) {
        return false;
    }
}

TranscriptData read_transcript(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open transcript " + path.string());
    TranscriptData d;
    std::string line;
    std::size_t lineno = 0;
    bool header        = false;
    try {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty())
                continue;
            const auto j    = json::parse(line);
            const auto type = j.at("type").get<std::string>();
            if (type == "header") {
                if (j.at("schema").get<std::string>() != "opdyn.transcript" ||
                    j.at("version").get<int>() != kTranscriptVersion)
                    throw IoError(path.string() + ": unsupported transcript schema");
                d.simulation_index = j.at("simulation").get<int>();
                d.seed             = j.at("seed").get<std::uint64_t>();
                d.n_agents         = j.at("n_agents").get<int>();
                d.n_rounds         = j.at("n_rounds").get<int>();
                d.mode             = mode_from_string(j.at("mode").get<std::string>());
                d.item_a           = j.value("item_a", "");
                d.item_b           = j.value("item_b", "");
                d.combination      = j.value("combination", "");
                header             = true;
            } else if (type == "initial") {
                AgentState a;
                a.agent_id = j.at("agent_id").get<int>();
                a.current  = jsonio::record_from_json(j.at("record"));
                d.initial.push_back(std::move(a));
            } else if (type == "event") {
                d.events.push_back(jsonio::event_from_json(j));
            } else {
                throw IoError(path.string() + ":" + std::to_string(lineno) + ": unknown line type '" + type + "'");
            }
        }
    } catch (const json::exception& e) {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!header)
        throw IoError(path.string() + ": missing transcript header");
    if (static_cast<int>(d.initial.size()) != d.n_agents)
        throw IoError(path.string() + ": expected " + std::to_string(d.n_agents) + " initial opinions");
    return d;
}

std::string_view to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::Pending:
        return "pending";
    case RunStatus::Running:
        return "running";
    case RunStatus::Done:
        return "done";
    case RunStatus::Failed:
        return "failed";
    }
    return "pending";
}

RunStatus run_status_from_string(std::string_view s)
{
    for (auto r : {RunStatus::Pending, RunStatus::Running, RunStatus::Done, RunStatus::Failed})
        if (s == to_string(r))
            return r;
    throw IoError("unknown run status '" + std::string(s) + "'");
}

namespace
{

int rank(RunStatus s)
{
    switch (s) {
    case RunStatus::Pending:
        return 0;
    case RunStatus::Running:
        return 1;
    default:
        return 2;
    }
}

void check_transition(RunStatus from, RunStatus to)
{
    if (rank(to) < rank(from) || (rank(from) == 2 && from != to))
        throw InternalError("status cannot go from " + std::string(to_string(from)) + " to " +
                            std::string(to_string(to)));
}

} // namespace

void RunManifest::advance(RunStatus next)
{
    check_transition(status, next);
    status = next;
}

void RunManifest::advance(std::size_t sim, RunStatus next)
{
    check_transition(simulations.at(sim).status, next);
    simulations.at(sim).status = next;
}

void RunManifest::reopen()
{
    ++resumes;
    status      = RunStatus::Running;
    finished_at = "";
    for (auto& s : simulations)
        if (s.status == RunStatus::Failed) {
            s.status = RunStatus::Pending;
            s.error.clear();
        }
}

void RunManifest::save(const fs::path& path) const
{
    json sims = json::array();
    for (const auto& s : simulations)
        sims.push_back({{"index", s.index},
                        {"status", std::string(to_string(s.status))},
                        {"transcript", s.transcript},
                        {"checkpoint", s.checkpoint},
                        {"error", s.error},
                        {"rounds_completed", s.rounds_completed},
                        {"latency_ms", s.latency_ms},
                        {"completions", s.completions}});
    const json j = {{"run_id", run_id},
                    {"kind", kind},
                    {"version", version},
                    {"status", std::string(to_string(status))},
                    {"started_at", started_at},
                    {"finished_at", finished_at},
                    {"resumes", resumes},
                    {"simulations", sims},
                    {"outputs", outputs}};
    write_file_atomic(path, j.dump(2) + "\n");
}

RunManifest RunManifest::load(const fs::path& path)
{
    try {
        const auto j = json::parse(read_file(path));
        RunManifest m;
        m.run_id      = j.at("run_id").get<std::string>();
        m.kind        = j.value("kind", "run");
        m.version     = j.at("version").get<std::string>();
        m.status      = run_status_from_string(j.at("status").get<std::string>());
        m.started_at  = j.value("started_at", "");
        m.finished_at = j.value("finished_at", "");
        m.resumes     = j.value("resumes", 0);
        for (const auto& s : j.at("simulations")) {
            SimulationEntry e;
            e.index            = s.at("index").get<int>();
            e.status           = run_status_from_string(s.at("status").get<std::string>());
            e.transcript       = s.value("transcript", "");
            e.checkpoint       = s.value("checkpoint", "");
            e.error            = s.value("error", "");
            e.rounds_completed = s.value("rounds_completed", 0);
            e.latency_ms       = s.value("latency_ms", std::int64_t{0});
            e.completions      = s.value("completions", 0);
            m.simulations.push_back(std::move(e));
        }
        m.outputs = j.value("outputs", std::vector<std::string>{});
        return m;
    } catch (const json::exception& e) {
        throw IoError("manifest " + path.string() + " is corrupt: " + e.what());
    }
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string new_run_id()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
    std::random_device rd;
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "%08x", rd());
    return std::string(stamp) + "-" + suffix;
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

namespace
{

std::ofstream open_csv(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    return out;
}

} // namespace

void write_distribution_csv(const fs::path& path, const std::vector<DistributionRow>& rows)
{
    auto out = open_csv(path);
    out << "combination,stance,mean,std,mean_full,std_full,n_simulations,std_convention\n";
    for (const auto& r : rows) {
        for (auto s : {Stance::Full, Stance::Partial, Stance::No}) {
            const auto& ms = r.aggregate.of(s);
            out << r.combination << ',' << to_string(s) << ',' << fixed(ms.mean, 2) << ',' << fixed(ms.std, 2) << ','
                << format_number(ms.mean) << ',' << format_number(ms.std) << ',' << r.aggregate.n_simulations
                << ",population\n";
        }
    }
}

void write_histogram_csv(const fs::path& path, const AllocationHistogram& h)
{
    auto out = open_csv(path);
    out << "bin_lo,bin_hi,count,frequency,n_explicit,n_total,normalization\n";
    for (std::size_t k = 0; k < AllocationHistogram::kBins; ++k)
        out << format_number(h.bin_edges[k]) << ',' << format_number(h.bin_edges[k + 1]) << ',' << h.counts[k] << ','
            << format_number(h.frequencies[k]) << ',' << h.n_explicit << ',' << h.n_total << ",n_explicit\n";
}

void write_traces_csv(const fs::path& path, int simulation_index, const std::vector<std::vector<int>>& traces)
{
    auto out = open_csv(path);
    out << "simulation,agent_id,t,code\n";
    for (std::size_t a = 0; a < traces.size(); ++a)
        for (std::size_t t = 0; t < traces[a].size(); ++t)
            out << simulation_index << ',' << a << ',' << t << ',' << traces[a][t] << '\n';
}

void write_consensus_csv(const fs::path& path, const ConsensusSummary& s)
{
    auto out = open_csv(path);
    out << "group,counted,total,pct\n";
    out << "nonconsensus_all_partial," << s.noncons_counted << ',' << s.noncons_combos_total << ','
        << fixed(s.pct_noncons_all_partial, 2) << '\n';
    out << "consensus_kept," << s.cons_counted << ',' << s.cons_combos_total << ',' << fixed(s.pct_cons_kept, 2)
        << '\n';
}

} // namespace opdyn

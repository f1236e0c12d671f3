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
#ifndef OPDYN_PERSISTENCE_HPP
#define OPDYN_PERSISTENCE_HPP

#include "opdyn/engine.hpp"
#include "opdyn/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

namespace opdyn
{

inline constexpr int kTranscriptVersion = 1;
inline constexpr int kCheckpointVersion = 1;

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

struct TranscriptInfo
{
    std::string combination;
    std::string library_version = OPDYN_VERSION_STRING;
};

/// Appends one JSONL transcript per simulation and keeps its checkpoint.
class TranscriptWriter : public RoundObserver
{
public:
    TranscriptWriter(std::filesystem::path transcript, std::filesystem::path checkpoint, const SimulationConfig& config,
                     TranscriptInfo info = {});

    /// Truncates the transcript and writes the header and initial opinions.
    void start(const SimulationState& initial);
    /// Cuts the transcript back to `offset` bytes and continues after it.
    void reopen(std::uint64_t offset);

    void round_done(const SimulationState& state, const std::array<InteractionEvent, 2>& events) override;
    void write_checkpoint(const SimulationState& state);

    std::uint64_t offset() const
    {
        return m_offset;
    }

private:
    void append(const std::string& line);

    std::filesystem::path m_transcript;
    std::filesystem::path m_checkpoint;
    const SimulationConfig& m_config;
    TranscriptInfo m_info;
    std::ofstream m_out;
    std::uint64_t m_offset = 0;
};

struct Checkpoint
{
    SimulationState state;
    std::uint64_t transcript_offset = 0;
};

void save_checkpoint(const std::filesystem::path& path, const SimulationState& state, std::uint64_t transcript_offset);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct TranscriptData
{
    int simulation_index = 0;
    std::uint64_t seed = 0;
    int n_agents = 0;
    int n_rounds = 0;
    Mode mode = Mode::FreeForm;
    std::string item_a;
    std::string item_b;
    std::string combination;
    std::vector<AgentState> initial;
    std::vector<InteractionEvent> events;

    bool complete() const
    {
        return events.size() == 2 * static_cast<std::size_t>(n_rounds);
    }
    /// Every opinion of every agent, rebuilt from the initial lines and events.
    std::vector<std::vector<OpinionRecord>> histories() const;
};

TranscriptData read_transcript(const std::filesystem::path& path);
/// True when the file starts with a transcript header line.
bool is_transcript(const std::filesystem::path& path);

enum class RunStatus
{
    Pending,
    Running,
    Done,
    Failed,
};

std::string_view to_string(RunStatus s);
RunStatus run_status_from_string(std::string_view s);

struct SimulationEntry
{
    int index = 0;
    RunStatus status = RunStatus::Pending;
    std::string transcript;
    std::string checkpoint;
    std::string error;
    int rounds_completed = 0;
    /// Wall-clock time spent waiting for completions.
    std::int64_t latency_ms = 0;
    int completions = 0;
};

/// manifest.json of one run directory.
struct RunManifest
{
    std::string run_id;
    std::string kind = "run";
    std::string version = OPDYN_VERSION_STRING;
    RunStatus status = RunStatus::Pending;
    std::string started_at;
    std::string finished_at;
    int resumes = 0;
    std::vector<SimulationEntry> simulations;
    std::vector<std::string> outputs;

    /// Moves the run or one simulation forward; going back raises InternalError.
    void advance(RunStatus next);
    void advance(std::size_t sim, RunStatus next);
    /// Marks a finished run as running again for a resume.
    void reopen();

    void save(const std::filesystem::path& path) const;
    static RunManifest load(const std::filesystem::path& path);
};

std::string new_run_id();
std::string utc_timestamp();

/// Fixed-point text with `digits` decimals.
std::string fixed(double v, int digits);

struct DistributionRow
{
    std::string combination;
    AggregateDistribution aggregate;
};

void write_distribution_csv(const std::filesystem::path& path, const std::vector<DistributionRow>& rows);
void write_histogram_csv(const std::filesystem::path& path, const AllocationHistogram& h);
void write_traces_csv(const std::filesystem::path& path, int simulation_index,
                      const std::vector<std::vector<int>>& traces);
void write_consensus_csv(const std::filesystem::path& path, const ConsensusSummary& s);

} // namespace opdyn

#endif

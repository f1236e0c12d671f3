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
#ifndef OPDYN_COMMANDS_HPP
#define OPDYN_COMMANDS_HPP

#include "opdyn/classifier.hpp"
#include "opdyn/config.hpp"
#include "opdyn/metrics.hpp"
#include "opdyn/persistence.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace opdyn
{

/// Exit status of a command that ran to the end: 0 when everything
/// succeeded, 1 when some simulation failed or some check did not pass.
/// Errors that stop a command early are thrown.

/// Runs one batch into `out_dir`, which must not hold a run yet.
int cmd_run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// Continues a run or grid directory. `backend` replaces the stored backend
/// section; without it the stored one is used with fault injection removed.
int cmd_resume(const std::filesystem::path& dir, const std::optional<BackendSpec>& backend, std::ostream& log);

/// Runs every distribution x setting pair of config.grid, one directory each,
/// then writes the consensus summary.
int cmd_grid(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// Rewrites the summary CSVs of a run or grid directory from its transcripts.
int cmd_report(const std::filesystem::path& dir, std::ostream& log);

struct ClassifyOptions
{
    std::optional<Mode> mode;
    bool strict = false;
    /// Treat the input as a labelled corpus and report accuracy.
    bool corpus = false;
    LexiconConfig lexicon = LexiconConfig::defaults();
};

/// Classifies every line of a text file, every event of a transcript, or a
/// labelled corpus; one JSON record per line on `out`.
int cmd_classify(const std::filesystem::path& input, const ClassifyOptions& options, std::ostream& out);

struct RunReport
{
    std::string combination;
    std::vector<TranscriptData> simulations;
    std::size_t incomplete = 0;
    std::optional<AggregateDistribution> aggregate;
    AllocationHistogram histogram;
    CombinationResult combination_result;
};

/// Reads every transcript of a run directory and computes its summaries.
RunReport analyze_run(const std::filesystem::path& dir);

/// Directory name used for one grid cell, e.g. "Majority-F__ia0_ib0_ra0_rb1".
std::string combination_name(const InitialDistribution& d, const ConnotationSetting& s);

} // namespace opdyn

#endif

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
#include "opdyn/opdyn.h"

#include "CLI11.hpp"

#include <cstdio>
#include <optional>
#include <string>

namespace
{

struct Overrides
{
    std::optional<std::uint64_t> seed;
    std::string backend;
    std::string mode;
    bool memory = false;
    bool strict = false;
    std::optional<int> parallelism;
};

int report(opdyn_status s, char* text)
{
    if (text) {
        std::fputs(text, stdout);
        opdyn_string_free(text);
    }
    if (s != OPDYN_OK && s != OPDYN_INCOMPLETE)
        std::fprintf(stderr, "opdyn: %s: %s\n", opdyn_status_name(s), opdyn_last_error());
    return static_cast<int>(s);
}

// Loads --config and applies the command-line overrides.
opdyn_config* build_config(const std::string& path, const Overrides& o, opdyn_status& status)
{
    opdyn_config* cfg = nullptr;
    status            = opdyn_config_load(path.c_str(), &cfg);
    if (status != OPDYN_OK)
        return nullptr;
    if (o.seed && status == OPDYN_OK)
        status = opdyn_config_set_seed(cfg, *o.seed);
    if (!o.backend.empty() && status == OPDYN_OK)
        status = opdyn_config_set_backend(cfg, o.backend.c_str());
    if (!o.mode.empty() && status == OPDYN_OK)
        status = opdyn_config_set_mode(cfg, o.mode.c_str());
    if (o.memory && status == OPDYN_OK)
        status = opdyn_config_set_memory(cfg, 1);
    if (o.strict && status == OPDYN_OK)
        status = opdyn_config_set_strict(cfg, 1);
    if (o.parallelism && status == OPDYN_OK)
        status = opdyn_config_set_parallelism(cfg, *o.parallelism);
    if (status != OPDYN_OK) {
        opdyn_config_free(cfg);
        return nullptr;
    }
    return cfg;
}

void add_overrides(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--backend", o.backend, "Backend kind")
        ->check(CLI::IsMember({"http", "scripted", "midpoint", "stubborn"}));
    cmd->add_option("--mode", o.mode, "freeform or closedform")->check(CLI::IsMember({"freeform", "closedform"}));
    cmd->add_flag("--memory", o.memory, "Show agents their two previous opinions");
    cmd->add_flag("--strict", o.strict, "Abort on an unclassifiable opinion");
    cmd->add_option("--parallelism", o.parallelism, "Simulations run at once")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pairwise opinion-dynamics simulations with language-model agents"};
    app.set_version_flag("--version", opdyn_version());
    app.require_subcommand(1);

    std::string config_path, out_dir, input, mode;
    Overrides o;
    bool resume = false, corpus = false, strict = false;
    std::string lexicon;

    auto* run = app.add_subcommand("run", "Run one batch of simulations");
    run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_flag("--resume", resume, "Continue the run already in --out");
    add_overrides(run, o);

    auto* grid = app.add_subcommand("grid", "Run every distribution x connotation setting");
    grid->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    grid->add_option("--out", out_dir, "Output directory")->required();
    grid->add_flag("--resume", resume, "Continue the grid already in --out");
    add_overrides(grid, o);

    auto* res = app.add_subcommand("resume", "Continue an interrupted run or grid");
    res->add_option("--out", out_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    res->add_option("--config", config_path, "Config whose backend section replaces the stored one")
        ->check(CLI::ExistingFile);

    auto* rep = app.add_subcommand("report", "Rewrite summary CSVs from transcripts");
    rep->add_option("--out", out_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

    auto* cls = app.add_subcommand("classify", "Classify opinions from a text file, transcript or corpus");
    cls->add_option("input", input, "Input file")->required()->check(CLI::ExistingFile);
    cls->add_option("--mode", mode, "freeform or closedform")->check(CLI::IsMember({"freeform", "closedform"}));
    cls->add_flag("--strict", strict, "Non-zero exit when a line cannot be classified");
    cls->add_flag("--corpus", corpus, "Input is a labelled corpus; report accuracy");
    cls->add_option("--lexicon", lexicon, "Lexicon file")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    char* text = nullptr;
    if (*run || *grid) {
        if (resume) {
            const auto s = opdyn_resume(out_dir.c_str(), nullptr, &text);
            return report(s, text);
        }
        opdyn_status s;
        opdyn_config* cfg = build_config(config_path, o, s);
        if (!cfg)
            return report(s, nullptr);
        s = *run ? opdyn_run(cfg, out_dir.c_str(), &text) : opdyn_grid(cfg, out_dir.c_str(), &text);
        opdyn_config_free(cfg);
        return report(s, text);
    }
    if (*res) {
        opdyn_config* cfg = nullptr;
        if (!config_path.empty()) {
            const auto s = opdyn_config_load(config_path.c_str(), &cfg);
            if (s != OPDYN_OK)
                return report(s, nullptr);
        }
        const auto s = opdyn_resume(out_dir.c_str(), cfg, &text);
        opdyn_config_free(cfg);
        return report(s, text);
    }
    if (*rep)
        return report(opdyn_report(out_dir.c_str(), &text), text);

    const auto s = opdyn_classify_file(input.c_str(), mode.empty() ? nullptr : mode.c_str(), strict ? 1 : 0,
                                       corpus ? 1 : 0, lexicon.empty() ? nullptr : lexicon.c_str(), &text);
    return report(s, text);
}

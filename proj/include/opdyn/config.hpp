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
#ifndef OPDYN_CONFIG_HPP
#define OPDYN_CONFIG_HPP

#include "opdyn/backends.hpp"
#include "opdyn/classifier.hpp"
#include "opdyn/engine.hpp"
#include "opdyn/subjects.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace opdyn
{

enum class BackendKind
{
    Http,
    Scripted,
    Midpoint,
    Stubborn,
};

std::string_view to_string(BackendKind k);
BackendKind backend_kind_from_string(std::string_view s);

struct BackendSpec
{
    BackendKind kind = BackendKind::Http;
    std::string base_url;
    int retries = 3;
    int backoff_base_ms = 1000;
    int timeout_s = 120;
    /// Empty disables caching; OPDYN_CACHE_DIR overrides it for remote backends.
    std::string cache_dir;
    /// Replies for the scripted backend.
    std::vector<std::string> responses;
    /// Test hook: fail every call after this many.
    std::optional<int> fail_after;
};

struct GridSpec
{
    std::vector<InitialDistribution> distributions = InitialDistribution::all_named();
    std::vector<ConnotationSetting> settings = enumerate_connotation_settings();
};

struct RunConfig
{
    SimulationConfig sim;
    BackendSpec backend;
    ConnotationSetting setting;
    TextValues text_values = TextValues::defaults();
    bool strict_single_nonneutral = true;
    /// Lexicon file; empty means the built-in lexicon.
    std::string lexicon_path;
    GridSpec grid;

    /// Rebuilds sim.subject from setting, text values and the strictness flag.
    void refresh_subject();
    void validate() const;
};

/// Reads a JSON config. Relative paths inside it are taken relative to the
/// file's directory.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text,
                       const std::filesystem::path& base_dir = std::filesystem::current_path());
/// Complete config with every default written out; parse_config reads it back.
std::string config_to_json(const RunConfig& config);

/// "[0,0][0,1]" -> setting.
ConnotationSetting parse_setting_label(const std::string& label);

std::shared_ptr<Backend> make_backend(const BackendSpec& spec);
LexiconConfig lexicon_of(const RunConfig& config);

} // namespace opdyn

#endif

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

#include "opdyn/classifier.hpp"
#include "opdyn/commands.hpp"
#include "opdyn/config.hpp"
#include "opdyn/errors.hpp"

#include "json_io.hpp"

#include <cstdlib>
#include <cstring>
#include <sstream>

struct opdyn_config
{
    opdyn::RunConfig config;
};

namespace
{

thread_local std::string g_last_error;

opdyn_status fail(opdyn_status s, const std::string& msg)
{
    g_last_error = msg;
    return s;
}

template <class Fn>
opdyn_status guard(Fn&& fn)
{
    try {
        return fn();
    } catch (const opdyn::ConfigError& e) {
        return fail(OPDYN_ERR_CONFIG, e.what());
    } catch (const opdyn::BackendError& e) {
        return fail(OPDYN_ERR_BACKEND, e.what());
    } catch (const opdyn::ProtocolError& e) {
        return fail(OPDYN_ERR_PROTOCOL, e.what());
    } catch (const opdyn::ClassificationError& e) {
        return fail(OPDYN_ERR_CLASSIFICATION, e.what());
    } catch (const opdyn::IoError& e) {
        return fail(OPDYN_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(OPDYN_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(OPDYN_ERR_INTERNAL, "unknown error");
    }
}

char* dup(const std::string& s)
{
    auto* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p)
        throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

opdyn_status exit_status(int rc)
{
    return rc == 0 ? OPDYN_OK : OPDYN_INCOMPLETE;
}

template <class Fn>
opdyn_status with_log(char** log, Fn&& fn)
{
    return guard([&] {
        std::ostringstream out;
        const int rc = fn(out);
        if (log)
            *log = dup(out.str());
        return exit_status(rc);
    });
}

#define REQUIRE_ARG(cond)                                                                                              \
    do {                                                                                                               \
        if (!(cond))                                                                                                   \
            return fail(OPDYN_ERR_ARGUMENT, "invalid argument: " #cond);                                               \
    } while (0)

std::optional<opdyn::Mode> mode_arg(const char* mode)
{
    if (!mode)
        return std::nullopt;
    return opdyn::mode_from_string(mode);
}

} // namespace

extern "C" {

const char* opdyn_last_error(void)
{
    return g_last_error.c_str();
}

const char* opdyn_version(void)
{
    return OPDYN_VERSION_STRING;
}

const char* opdyn_status_name(opdyn_status status)
{
    switch (status) {
    case OPDYN_OK:
        return "ok";
    case OPDYN_INCOMPLETE:
        return "incomplete";
    case OPDYN_ERR_CONFIG:
        return "configuration error";
    case OPDYN_ERR_BACKEND:
        return "backend error";
    case OPDYN_ERR_PROTOCOL:
        return "protocol error";
    case OPDYN_ERR_CLASSIFICATION:
        return "classification error";
    case OPDYN_ERR_IO:
        return "i/o error";
    case OPDYN_ERR_INTERNAL:
        return "internal error";
    case OPDYN_ERR_ARGUMENT:
        return "invalid argument";
    }
    return "unknown status";
}

void opdyn_string_free(char* s)
{
    std::free(s);
}

opdyn_status opdyn_config_load(const char* path, opdyn_config** out)
{
    REQUIRE_ARG(path && out);
    return guard([&] {
        *out = new opdyn_config{opdyn::load_config(path)};
        return OPDYN_OK;
    });
}

opdyn_status opdyn_config_from_json(const char* json_text, opdyn_config** out)
{
    REQUIRE_ARG(json_text && out);
    return guard([&] {
        *out = new opdyn_config{opdyn::parse_config(json_text)};
        return OPDYN_OK;
    });
}

opdyn_status opdyn_config_new(const char* mode, const char* backend_kind, opdyn_config** out)
{
    REQUIRE_ARG(mode && backend_kind && out);
    return guard([&] {
        const opdyn::jsonio::json j = {{"mode", mode}, {"backend", {{"kind", backend_kind}}}};
        *out                        = new opdyn_config{opdyn::parse_config(j.dump())};
        return OPDYN_OK;
    });
}

void opdyn_config_free(opdyn_config* config)
{
    delete config;
}

opdyn_status opdyn_config_to_json(const opdyn_config* config, char** out)
{
    REQUIRE_ARG(config && out);
    return guard([&] {
        *out = dup(opdyn::config_to_json(config->config));
        return OPDYN_OK;
    });
}

opdyn_status opdyn_config_set_seed(opdyn_config* config, uint64_t seed)
{
    REQUIRE_ARG(config);
    config->config.sim.master_seed = seed;
    return OPDYN_OK;
}

opdyn_status opdyn_config_set_mode(opdyn_config* config, const char* mode)
{
    REQUIRE_ARG(config && mode);
    return guard([&] {
        config->config.sim.mode = opdyn::mode_from_string(mode);
        return OPDYN_OK;
    });
}

opdyn_status opdyn_config_set_memory(opdyn_config* config, int with_memory)
{
    REQUIRE_ARG(config);
    config->config.sim.with_memory = with_memory != 0;
    return OPDYN_OK;
}

opdyn_status opdyn_config_set_strict(opdyn_config* config, int strict)
{
    REQUIRE_ARG(config);
    config->config.sim.strict_classification = strict != 0;
    return OPDYN_OK;
}

opdyn_status opdyn_config_set_parallelism(opdyn_config* config, int parallelism)
{
    REQUIRE_ARG(config);
    if (parallelism < 1)
        return fail(OPDYN_ERR_CONFIG, "parallelism must be >= 1");
    config->config.sim.parallelism = parallelism;
    return OPDYN_OK;
}

opdyn_status opdyn_config_set_backend(opdyn_config* config, const char* kind)
{
    REQUIRE_ARG(config && kind);
    return guard([&] {
        config->config.backend.kind = opdyn::backend_kind_from_string(kind);
        return OPDYN_OK;
    });
}

opdyn_status opdyn_config_set_sizes(opdyn_config* config, int n_agents, int n_rounds, int n_simulations)
{
    REQUIRE_ARG(config);
    return guard([&] {
        auto copy          = config->config.sim;
        copy.n_agents      = n_agents;
        copy.n_rounds      = n_rounds;
        copy.n_simulations = n_simulations;
        copy.validate();
        config->config.sim = copy;
        return OPDYN_OK;
    });
}

opdyn_status opdyn_config_set_distribution(opdyn_config* config, const char* name)
{
    REQUIRE_ARG(config && name);
    return guard([&] {
        config->config.sim.distribution = opdyn::InitialDistribution::from_name(name);
        return OPDYN_OK;
    });
}

opdyn_status opdyn_run(const opdyn_config* config, const char* out_dir, char** log)
{
    REQUIRE_ARG(config && out_dir);
    return with_log(log, [&](std::ostream& out) { return opdyn::cmd_run(config->config, out_dir, out); });
}

opdyn_status opdyn_grid(const opdyn_config* config, const char* out_dir, char** log)
{
    REQUIRE_ARG(config && out_dir);
    return with_log(log, [&](std::ostream& out) { return opdyn::cmd_grid(config->config, out_dir, out); });
}

opdyn_status opdyn_resume(const char* dir, const opdyn_config* backend_config, char** log)
{
    REQUIRE_ARG(dir);
    std::optional<opdyn::BackendSpec> backend;
    if (backend_config)
        backend = backend_config->config.backend;
    return with_log(log, [&](std::ostream& out) { return opdyn::cmd_resume(dir, backend, out); });
}

opdyn_status opdyn_report(const char* dir, char** log)
{
    REQUIRE_ARG(dir);
    return with_log(log, [&](std::ostream& out) { return opdyn::cmd_report(dir, out); });
}

opdyn_status opdyn_classify_file(const char* path, const char* mode, int strict, int corpus, const char* lexicon_path,
                                 char** out)
{
    REQUIRE_ARG(path);
    return with_log(out, [&](std::ostream& os) {
        opdyn::ClassifyOptions opts;
        opts.mode   = mode_arg(mode);
        opts.strict = strict != 0;
        opts.corpus = corpus != 0;
        if (lexicon_path)
            opts.lexicon = opdyn::LexiconConfig::load(lexicon_path);
        return opdyn::cmd_classify(path, opts, os);
    });
}

opdyn_status opdyn_classify_text(const char* text, const char* mode, int strict, char** out)
{
    REQUIRE_ARG(text && out);
    return guard([&] {
        const opdyn::Classifier classifier;
        const auto c = classifier.classify(text, mode_arg(mode).value_or(opdyn::Mode::FreeForm), strict != 0);
        *out         = dup(opdyn::jsonio::to_json(c).dump());
        return OPDYN_OK;
    });
}

opdyn_status opdyn_render_initial_opinion(const char* stance, const char* setting, char** out)
{
    REQUIRE_ARG(stance && setting && out);
    return guard([&] {
        const auto subject = opdyn::make_subject(opdyn::parse_setting_label(setting));
        *out               = dup(opdyn::render_initial_opinion(opdyn::stance_from_string(stance), subject));
        return OPDYN_OK;
    });
}

} // extern "C"

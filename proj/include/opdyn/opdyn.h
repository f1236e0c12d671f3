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
#ifndef OPDYN_H
#define OPDYN_H

#include <stddef.h>
#include <stdint.h>

#if defined(OPDYN_BUILDING_LIBRARY)
#define OPDYN_API __attribute__((visibility("default")))
#else
#define OPDYN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum opdyn_status
{
    OPDYN_OK = 0,
    /* The command ran but some simulation failed or some check did not pass. */
    OPDYN_INCOMPLETE = 1,
    OPDYN_ERR_CONFIG = 2,
    OPDYN_ERR_BACKEND = 3,
    OPDYN_ERR_PROTOCOL = 4,
    OPDYN_ERR_CLASSIFICATION = 5,
    OPDYN_ERR_IO = 6,
    OPDYN_ERR_INTERNAL = 7,
    OPDYN_ERR_ARGUMENT = 8
} opdyn_status;

typedef struct opdyn_config opdyn_config;

/* Message of the last failed call on this thread; never NULL. */
OPDYN_API const char* opdyn_last_error(void);
OPDYN_API const char* opdyn_version(void);
OPDYN_API const char* opdyn_status_name(opdyn_status status);

/* Strings returned through char** out-parameters are owned by the caller. */
OPDYN_API void opdyn_string_free(char* s);

OPDYN_API opdyn_status opdyn_config_load(const char* path, opdyn_config** out);
OPDYN_API opdyn_status opdyn_config_from_json(const char* json_text, opdyn_config** out);
/* Config with every default and the given backend kind. */
OPDYN_API opdyn_status opdyn_config_new(const char* mode, const char* backend_kind, opdyn_config** out);
OPDYN_API void opdyn_config_free(opdyn_config* config);
OPDYN_API opdyn_status opdyn_config_to_json(const opdyn_config* config, char** out);

OPDYN_API opdyn_status opdyn_config_set_seed(opdyn_config* config, uint64_t seed);
OPDYN_API opdyn_status opdyn_config_set_mode(opdyn_config* config, const char* mode);
OPDYN_API opdyn_status opdyn_config_set_memory(opdyn_config* config, int with_memory);
OPDYN_API opdyn_status opdyn_config_set_strict(opdyn_config* config, int strict);
OPDYN_API opdyn_status opdyn_config_set_parallelism(opdyn_config* config, int parallelism);
OPDYN_API opdyn_status opdyn_config_set_backend(opdyn_config* config, const char* kind);
OPDYN_API opdyn_status opdyn_config_set_sizes(opdyn_config* config, int n_agents, int n_rounds, int n_simulations);
OPDYN_API opdyn_status opdyn_config_set_distribution(opdyn_config* config, const char* name);

/* Commands. Progress and summary text goes to *log when log is not NULL. */
OPDYN_API opdyn_status opdyn_run(const opdyn_config* config, const char* out_dir, char** log);
OPDYN_API opdyn_status opdyn_grid(const opdyn_config* config, const char* out_dir, char** log);
/* backend_config may be NULL; otherwise its backend section replaces the stored one. */
OPDYN_API opdyn_status opdyn_resume(const char* dir, const opdyn_config* backend_config, char** log);
OPDYN_API opdyn_status opdyn_report(const char* dir, char** log);

/* mode is "freeform", "closedform" or NULL (freeform, or the transcript's own mode).
   lexicon_path may be NULL for the built-in lexicon. */
OPDYN_API opdyn_status opdyn_classify_file(const char* path, const char* mode, int strict, int corpus,
                                           const char* lexicon_path, char** out);

/* One opinion; *out receives a JSON object. */
OPDYN_API opdyn_status opdyn_classify_text(const char* text, const char* mode, int strict, char** out);

/* Initial opinion for stance "full", "partial" or "no" under a setting label
   such as "[0,0][0,1]". */
OPDYN_API opdyn_status opdyn_render_initial_opinion(const char* stance, const char* setting, char** out);

#ifdef __cplusplus
}
#endif

#endif

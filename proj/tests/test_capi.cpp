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
#include "opdyn/opdyn.h"

#include <cstring>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace fs = std::filesystem;

namespace
{
std::string take(char* s)
{
    std::string out = s ? s : "";
    opdyn_string_free(s);
    return out;
}
} // namespace

TEST_SUITE("capi")
{
    TEST_CASE("version and status names")
    {
        CHECK(std::strlen(opdyn_version()) > 0);
        CHECK(std::string(opdyn_status_name(OPDYN_ERR_CONFIG)) == "configuration error");
    }

    TEST_CASE("config errors come back as codes")
    {
        opdyn_config* c = nullptr;
        CHECK(opdyn_config_new("sideways", "midpoint", &c) == OPDYN_ERR_CONFIG);
        CHECK(c == nullptr);
        CHECK(std::string(opdyn_last_error()).find("mode") != std::string::npos);
        CHECK(opdyn_config_from_json("{", &c) == OPDYN_ERR_CONFIG);
        CHECK(opdyn_config_new("freeform", "midpoint", nullptr) == OPDYN_ERR_ARGUMENT);
    }

    TEST_CASE("run and report through the C API")
    {
        opdyn_config* c = nullptr;
        REQUIRE(opdyn_config_new("freeform", "stubborn", &c) == OPDYN_OK);
        CHECK(opdyn_config_set_sizes(c, 6, 5, 2) == OPDYN_OK);
        CHECK(opdyn_config_set_sizes(c, 1, 5, 2) == OPDYN_ERR_CONFIG);
        CHECK(opdyn_config_set_distribution(c, "Majority-N") == OPDYN_OK);
        CHECK(opdyn_config_set_seed(c, 3) == OPDYN_OK);
        CHECK(opdyn_config_set_distribution(c, "Mostly-N") == OPDYN_ERR_CONFIG);

        char* json = nullptr;
        REQUIRE(opdyn_config_to_json(c, &json) == OPDYN_OK);
        CHECK(take(json).find("\"seed\": 3") != std::string::npos);

        const auto dir = fs::temp_directory_path() / ("opdyn_capi_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        char* log = nullptr;
        CHECK(opdyn_run(c, dir.c_str(), &log) == OPDYN_OK);
        take(log);
        CHECK(fs::exists(dir / "distribution.csv"));
        CHECK(opdyn_report(dir.c_str(), &log) == OPDYN_OK);
        CHECK(!take(log).empty());
        opdyn_config_free(c);
        fs::remove_all(dir);
    }

    TEST_CASE("classify text")
    {
        char* out = nullptr;
        REQUIRE(opdyn_classify_text("I suggest allocating 47.418359375% of funding to Thing A.", "freeform", 0, &out) ==
                OPDYN_OK);
        const auto j = take(out);
        CHECK(j.find("\"stance\":\"partial\"") != std::string::npos);
        CHECK(j.find("47.418359375") != std::string::npos);
        CHECK(opdyn_classify_text("hmm", "freeform", 1, &out) == OPDYN_ERR_CLASSIFICATION);
        CHECK(opdyn_classify_text("x", "banana", 0, &out) == OPDYN_ERR_CONFIG);
    }

    TEST_CASE("render initial opinion")
    {
        char* out = nullptr;
        REQUIRE(opdyn_render_initial_opinion("full", "[1,0][0,0]", &out) == OPDYN_OK);
        CHECK(take(out) == "I think that affordable housing should have all the funding because of REASON A.");
        CHECK(opdyn_render_initial_opinion("most", "[0,0][0,0]", &out) == OPDYN_ERR_CONFIG);
    }
}

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
#include "opdyn/config.hpp"
#include "opdyn/errors.hpp"

#include <cstdlib>
#include <filesystem>

using namespace opdyn;

namespace
{
std::string error_of(const std::string& json)
{
    try {
        parse_config(json);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}
} // namespace

TEST_SUITE("config")
{
    TEST_CASE("minimal config takes the defaults")
    {
        const auto c = parse_config(R"({"mode":"freeform","backend":{"kind":"midpoint"}})");
        CHECK(c.sim.mode == Mode::FreeForm);
        CHECK(c.sim.n_agents == 18);
        CHECK(c.sim.n_rounds == 90);
        CHECK(c.sim.n_simulations == 20);
        CHECK(c.sim.temperature == 0.0);
        CHECK(c.sim.max_option_reasks == 3);
        CHECK(c.backend.kind == BackendKind::Midpoint);
        CHECK(c.grid.distributions.size() == 10);
        CHECK(c.grid.settings.size() == 9);
        CHECK(c.sim.subject.item_a_text == "Thing A");
    }

    TEST_CASE("full config")
    {
        const auto c = parse_config(R"({
            "mode": "closedform", "with_memory": true, "n_agents": 6, "n_rounds": 10, "n_simulations": 2,
            "distribution": "Majority-P", "seed": 99, "model_family": "mistral",
            "subject": {"item_a": 1},
            "backend": {"kind": "scripted", "responses": ["Option: [a]"]},
            "retry_trigger": "The Same", "retry_case_sensitive": true, "parallelism": 2
        })");
        CHECK(c.sim.mode == Mode::ClosedForm);
        CHECK(c.sim.with_memory);
        CHECK(c.sim.master_seed == 99);
        CHECK(c.sim.distribution.name == DistributionName::MajorityP);
        CHECK(c.sim.subject.item_a_text == "affordable housing");
        CHECK(c.sim.model_family == ModelFamily::Mistral);
        CHECK(c.sim.retry_rule.trigger == "The Same");
        CHECK(c.sim.retry_rule.case_sensitive);
        CHECK(c.backend.responses.size() == 1);
    }

    TEST_CASE("custom distribution object")
    {
        const auto c = parse_config(
            R"({"mode":"freeform","backend":{"kind":"stubborn"},"distribution":{"full":"1/2","partial":"1/4","no":"1/4"}})");
        CHECK(c.sim.distribution.name == DistributionName::Custom);
        CHECK(c.sim.distribution.proportions[1] == Fraction{1, 4});
    }

    TEST_CASE("errors name the field")
    {
        CHECK(error_of(R"({"backend":{"kind":"midpoint"}})").find("mode") != std::string::npos);
        CHECK(error_of(R"({"mode":"freeform"})").find("backend") != std::string::npos);
        CHECK(error_of(R"({"mode":"sideways","backend":{"kind":"midpoint"}})").find("mode") != std::string::npos);
        CHECK(error_of(R"({"mode":"freeform","backend":{"kind":"midpoint"},"n_agent":3})").find("n_agent") !=
              std::string::npos);
        CHECK(error_of(R"({"mode":"freeform","backend":{"kind":"midpoint"},"n_agents":1})").find("n_agents") !=
              std::string::npos);
        CHECK(error_of(R"({"mode":"freeform","backend":{"kind":"midpoint"},"n_agents":"six"})").find("n_agents") !=
              std::string::npos);
        CHECK(error_of(R"({"mode":"freeform","backend":{"kind":"midpoint"},"subject":{"item_a":1,"reason_b":-1}})")
                  .find("non-neutral") != std::string::npos);
        CHECK_FALSE(error_of("{ not json").empty());
    }

    TEST_CASE("lenient subject composition")
    {
        const auto c = parse_config(R"({"mode":"freeform","backend":{"kind":"midpoint"},
            "subject":{"item_a":1,"reason_b":-1,"strict_single_nonneutral":false}})");
        CHECK(c.sim.subject.item_a_connotation == Connotation::Positive);
        CHECK(c.sim.subject.reason_b_connotation == Connotation::Negative);
    }

    TEST_CASE("round trip through json")
    {
        const auto a = parse_config(R"({"mode":"freeform","backend":{"kind":"midpoint"},"seed":5,"n_agents":6,
            "distribution":"Polarization-N","subject":{"reason_a":-1},"grid":{"distributions":["Majority-F"],
            "settings":["[0,0][0,0]","[0,1][0,0]"]}})");
        const auto b = parse_config(config_to_json(a));
        CHECK(config_to_json(b) == config_to_json(a));
        CHECK(b.grid.distributions.size() == 1);
        CHECK(b.grid.settings.size() == 2);
        CHECK(b.sim.subject.reason_a_connotation == Connotation::Negative);
    }

    TEST_CASE("setting labels")
    {
        const auto s = parse_setting_label("[0,-1][0,0]");
        CHECK(s.item_b == Connotation::Negative);
        CHECK(s.label() == "[0,-1][0,0]");
        CHECK_THROWS_AS(parse_setting_label("[0,0]"), ConfigError);
    }

    TEST_CASE("backend factory")
    {
        BackendSpec s;
        s.kind = BackendKind::Stubborn;
        CHECK(make_backend(s)->name() == "stubborn-oracle");
        s.kind = BackendKind::Http;
        ::unsetenv("OPDYN_BASE_URL");
        CHECK_THROWS_AS(make_backend(s), ConfigError);
        CHECK(backend_kind_from_string("midpoint") == BackendKind::Midpoint);
    }
}

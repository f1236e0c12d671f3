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
#include "opdyn/opinion.hpp"
#include "opdyn/errors.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace opdyn
{

namespace
{

std::string lowered(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    out.erase(std::remove_if(out.begin(), out.end(), [](char c) { return c == '_' || c == '-' || c == ' '; }),
              out.end());
    return out;
}

} // namespace

std::string_view to_string(Stance s)
{
    switch (s) {
    case Stance::Full:
        return "full";
    case Stance::Partial:
        return "partial";
    case Stance::No:
        return "no";
    }
    return "no";
}

std::string_view to_string(NoKind k)
{
    return k == NoKind::ExplicitZero ? "explicit_zero" : "unspecified";
}

std::string_view to_string(Mode m)
{
    return m == Mode::FreeForm ? "freeform" : "closedform";
}

Stance stance_from_string(std::string_view s)
{
    const auto v = lowered(s);
    if (v == "full" || v == "f")
        return Stance::Full;
    if (v == "partial" || v == "p")
        return Stance::Partial;
    if (v == "no" || v == "n" || v == "none")
        return Stance::No;
    throw ConfigError("unknown stance '" + std::string(s) + "'");
}

NoKind no_kind_from_string(std::string_view s)
{
    const auto v = lowered(s);
    if (v == "explicitzero" || v == "zero")
        return NoKind::ExplicitZero;
    if (v == "unspecified")
        return NoKind::Unspecified;
    throw ConfigError("unknown no_kind '" + std::string(s) + "'");
}

Mode mode_from_string(std::string_view s)
{
    const auto v = lowered(s);
    if (v == "freeform")
        return Mode::FreeForm;
    if (v == "closedform")
        return Mode::ClosedForm;
    throw ConfigError("unknown mode '" + std::string(s) + "' (expected freeform or closedform)");
}

int stance_code(Stance s)
{
    switch (s) {
    case Stance::Full:
        return 1;
    case Stance::Partial:
        return 0;
    case Stance::No:
        return -1;
    }
    return -1;
}

ClassifiedOpinion make_classified(Stance s, std::optional<NoKind> kind, std::optional<double> allocation)
{
    ClassifiedOpinion c;
    c.stance = s;
    if (s == Stance::No)
        c.no_kind = kind.value_or(NoKind::ExplicitZero);
    c.allocation = allocation;
    return c;
}

} // namespace opdyn

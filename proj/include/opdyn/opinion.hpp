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
#ifndef OPDYN_OPINION_HPP
#define OPDYN_OPINION_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace opdyn
{

/// Funding stance for Item A. No covers both an explicit zero and a refusal to
/// name any amount.
enum class Stance
{
    Full,
    Partial,
    No,
};

enum class NoKind
{
    ExplicitZero,
    Unspecified,
};

enum class Mode
{
    FreeForm,
    ClosedForm,
};

std::string_view to_string(Stance s);
std::string_view to_string(NoKind k);
std::string_view to_string(Mode m);
Stance stance_from_string(std::string_view s);
NoKind no_kind_from_string(std::string_view s);
Mode mode_from_string(std::string_view s);

/// Trace code used in evolution plots: Full 1, Partial 0, No -1.
int stance_code(Stance s);

struct AllocationRange
{
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const AllocationRange&) const = default;
};

/// Result of classifying one opinion text.
///
/// While `implicit` or `unclassified` is set the stance is a placeholder (No)
/// until the engine resolves it against the agent's own history; a resolved
/// record has `implicit == false` and carries `resolved_from_time`.
struct ClassifiedOpinion
{
    Stance stance = Stance::No;
    std::optional<NoKind> no_kind;
    std::optional<double> allocation;
    std::optional<AllocationRange> allocation_range;
    bool implicit = false;
    bool unclassified = false;
    std::optional<int> resolved_from_time;
    std::vector<std::string> anomalies;

    bool operator==(const ClassifiedOpinion&) const = default;

    /// True when the allocation came from a percentage written in this text.
    bool explicit_allocation() const
    {
        return allocation.has_value() && !resolved_from_time.has_value();
    }
};

ClassifiedOpinion make_classified(Stance s, std::optional<NoKind> kind = std::nullopt,
                                  std::optional<double> allocation = std::nullopt);

/// One agent's opinion at one time.
struct OpinionRecord
{
    int time = 0;
    std::string text;
    ClassifiedOpinion classified;

    bool operator==(const OpinionRecord&) const = default;
};

} // namespace opdyn

#endif

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
#ifndef OPDYN_SUBJECTS_HPP
#define OPDYN_SUBJECTS_HPP

#include "opdyn/opinion.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace opdyn
{

enum class Connotation : int
{
    Negative = -1,
    Neutral  = 0,
    Positive = 1,
};

inline int code(Connotation c)
{
    return static_cast<int>(c);
}
Connotation connotation_from_code(int code);

enum class SubjectRole
{
    ItemA,
    ItemB,
    ReasonA,
    ReasonB,
};

/// Connotation of each of the four slots, written "[ItemA,ItemB][ReasonA,ReasonB]".
struct ConnotationSetting
{
    Connotation item_a   = Connotation::Neutral;
    Connotation item_b   = Connotation::Neutral;
    Connotation reason_a = Connotation::Neutral;
    Connotation reason_b = Connotation::Neutral;

    bool operator==(const ConnotationSetting&) const = default;

    int non_neutral_count() const;
    /// "[0,0][0,1]"
    std::string label() const;
    /// Filesystem-friendly variant of label(), e.g. "ia0_ib0_ra0_rb1", "m1" for -1.
    std::string slug() const;
};

/// The nine settings in table row order: all neutral, then reason B+,
/// reason A+, reason B-, reason A-, item B+, item A+, item B-, item A-.
std::vector<ConnotationSetting> enumerate_connotation_settings();

/// Text value table indexed by role and connotation. Overridable cell by cell.
class TextValues
{
public:
    static TextValues defaults();

    const std::string& get(SubjectRole role, Connotation c) const;
    void set(SubjectRole role, Connotation c, std::string text);

private:
    std::array<std::array<std::string, 3>, 4> m_cells;
};

std::string default_text_value(SubjectRole role, Connotation c);

struct DiscussionSubject
{
    std::string item_a_text = "Thing A";
    std::string item_b_text = "Thing B";
    /// Tokens used where a reason is neutral; shown to the model verbatim.
    std::string reason_a_text = "REASON A";
    std::string reason_b_text = "REASON B";
    Connotation item_a_connotation   = Connotation::Neutral;
    Connotation item_b_connotation   = Connotation::Neutral;
    Connotation reason_a_connotation = Connotation::Neutral;
    Connotation reason_b_connotation = Connotation::Neutral;
    bool strict_single_nonneutral    = true;

    ConnotationSetting setting() const;
    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

DiscussionSubject make_subject(const ConnotationSetting& setting,
                               const TextValues& values = TextValues::defaults(),
                               bool strict_single_nonneutral = true);

/// Initial opinion for `stance`, with item and reason phrases substituted.
std::string render_initial_opinion(Stance stance, const DiscussionSubject& subject);

} // namespace opdyn

#endif

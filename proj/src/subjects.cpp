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
#include "opdyn/subjects.hpp"
#include "opdyn/errors.hpp"

namespace opdyn
{

namespace
{

std::size_t slot(Connotation c)
{
    return static_cast<std::size_t>(code(c) + 1);
}

std::string code_label(Connotation c)
{
    return std::to_string(code(c));
}

std::string code_slug(Connotation c)
{
    return c == Connotation::Negative ? "m1" : std::to_string(code(c));
}

// Clause justifying Item B inside the partial-funding template.
std::string item_b_clause(const DiscussionSubject& s)
{
    switch (s.reason_b_connotation) {
    case Connotation::Positive:
        return "the increasing appreciation of " + s.item_b_text + " in our culture calls for more funding for it";
    case Connotation::Negative:
        return "our culture does not appreciate " + s.item_b_text + ", which calls for more funding for it";
    case Connotation::Neutral:
        break;
    }
    return s.item_b_text + ", justified by " + s.reason_b_text + ", calls for some funding allocation";
}

// Clause justifying Item A inside the partial-funding template.
std::string item_a_clause(const DiscussionSubject& s)
{
    switch (s.reason_a_connotation) {
    case Connotation::Positive:
        return "the positive cultural importance of " + s.item_a_text;
    case Connotation::Negative:
        return "the negative cultural importance of " + s.item_a_text;
    case Connotation::Neutral:
        break;
    }
    return s.reason_a_text + " justifying " + s.item_a_text;
}

std::string full_reason(const DiscussionSubject& s)
{
    switch (s.reason_a_connotation) {
    case Connotation::Positive:
        return "they are constructive and important in our culture";
    case Connotation::Negative:
        return "they are destructive and devastating for our culture";
    case Connotation::Neutral:
        break;
    }
    return "of " + s.reason_a_text;
}

std::string partial_reason(const DiscussionSubject& s)
{
    return item_b_clause(s) + ". However, given " + item_a_clause(s) + ", we should keep some funding for it";
}

// The non-neutral variants end in their own period, which the template
// then closes again. The doubled period is what agents were shown.
std::string no_reason(const DiscussionSubject& s)
{
    switch (s.reason_b_connotation) {
    case Connotation::Positive:
        return "there is a large cultural appreciation of " + s.item_b_text +
               " which justifies reallocating all the funding for it.";
    case Connotation::Negative:
        return "there is a large disdain of " + s.item_b_text +
               " in our culture, which justifies reallocating all the funding for it.";
    case Connotation::Neutral:
        break;
    }
    return s.item_b_text + " must get all the funding because of " + s.reason_b_text;
}

} // namespace

Connotation connotation_from_code(int c)
{
    switch (c) {
    case -1:
        return Connotation::Negative;
    case 0:
        return Connotation::Neutral;
    case 1:
        return Connotation::Positive;
    default:
        throw ConfigError("connotation code must be -1, 0 or 1, got " + std::to_string(c));
    }
}

int ConnotationSetting::non_neutral_count() const
{
    int n = 0;
    for (auto c : {item_a, item_b, reason_a, reason_b})
        n += c != Connotation::Neutral ? 1 : 0;
    return n;
}

std::string ConnotationSetting::label() const
{
    return "[" + code_label(item_a) + "," + code_label(item_b) + "][" + code_label(reason_a) + "," +
           code_label(reason_b) + "]";
}

std::string ConnotationSetting::slug() const
{
    return "ia" + code_slug(item_a) + "_ib" + code_slug(item_b) + "_ra" + code_slug(reason_a) + "_rb" +
           code_slug(reason_b);
}

std::vector<ConnotationSetting> enumerate_connotation_settings()
{
    using C = Connotation;
    std::vector<ConnotationSetting> out;
    out.push_back({});
    for (C c : {C::Positive, C::Negative}) {
        ConnotationSetting rb;
        rb.reason_b = c;
        ConnotationSetting ra;
        ra.reason_a = c;
        out.push_back(rb);
        out.push_back(ra);
    }
    for (C c : {C::Positive, C::Negative}) {
        ConnotationSetting ib;
        ib.item_b = c;
        ConnotationSetting ia;
        ia.item_a = c;
        out.push_back(ib);
        out.push_back(ia);
    }
    return out;
}

TextValues TextValues::defaults()
{
    TextValues v;
    using C = Connotation;
    using R = SubjectRole;
    v.set(R::ItemA, C::Positive, "affordable housing");
    v.set(R::ItemA, C::Neutral, "Thing A");
    v.set(R::ItemA, C::Negative, "destructive bombs");
    v.set(R::ItemB, C::Positive, "affordable public transportation");
    v.set(R::ItemB, C::Neutral, "Thing B");
    v.set(R::ItemB, C::Negative, "nasty pollution");
    v.set(R::ReasonA, C::Positive, "constructive & important");
    v.set(R::ReasonA, C::Neutral, "REASON A");
    v.set(R::ReasonA, C::Negative, "destructive & devastating");
    v.set(R::ReasonB, C::Positive, "increasing/large appreciation");
    v.set(R::ReasonB, C::Neutral, "REASON B");
    v.set(R::ReasonB, C::Negative, "not appreciated/largely disdained");
    return v;
}

const std::string& TextValues::get(SubjectRole role, Connotation c) const
{
    return m_cells[static_cast<std::size_t>(role)][slot(c)];
}

void TextValues::set(SubjectRole role, Connotation c, std::string text)
{
    if (text.empty())
        throw ConfigError("text values must be non-empty");
    m_cells[static_cast<std::size_t>(role)][slot(c)] = std::move(text);
}

std::string default_text_value(SubjectRole role, Connotation c)
{
    return TextValues::defaults().get(role, c);
}

ConnotationSetting DiscussionSubject::setting() const
{
    return {item_a_connotation, item_b_connotation, reason_a_connotation, reason_b_connotation};
}

void DiscussionSubject::validate() const
{
    if (item_a_text.empty() || item_b_text.empty())
        throw ConfigError("subject: item texts must be non-empty");
    if (strict_single_nonneutral && setting().non_neutral_count() > 1)
        throw ConfigError("subject: at most one item or reason may carry a non-neutral connotation (got " +
                          setting().label() + "); disable strict_single_nonneutral to allow this");
}

DiscussionSubject make_subject(const ConnotationSetting& setting, const TextValues& values,
                               bool strict_single_nonneutral)
{
    DiscussionSubject s;
    s.item_a_text              = values.get(SubjectRole::ItemA, setting.item_a);
    s.item_b_text              = values.get(SubjectRole::ItemB, setting.item_b);
    // Only the neutral reason cells are literal tokens; non-neutral reasons
    // are expressed by fixed phrases in the templates.
    s.reason_a_text            = values.get(SubjectRole::ReasonA, Connotation::Neutral);
    s.reason_b_text            = values.get(SubjectRole::ReasonB, Connotation::Neutral);
    s.item_a_connotation       = setting.item_a;
    s.item_b_connotation       = setting.item_b;
    s.reason_a_connotation     = setting.reason_a;
    s.reason_b_connotation     = setting.reason_b;
    s.strict_single_nonneutral = strict_single_nonneutral;
    s.validate();
    return s;
}

std::string render_initial_opinion(Stance stance, const DiscussionSubject& subject)
{
    subject.validate();
    switch (stance) {
    case Stance::Full:
        return "I think that " + subject.item_a_text + " should have all the funding because " +
               full_reason(subject) + ".";
    case Stance::Partial:
        return "I think that we should provide measured funding for " + subject.item_a_text + " because " +
               partial_reason(subject) + ".";
    case Stance::No:
        return "I think that " + subject.item_a_text + " should not have any funding because " +
               no_reason(subject) + ".";
    }
    throw InternalError("unknown stance");
}

} // namespace opdyn

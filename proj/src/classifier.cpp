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
#include "opdyn/classifier.hpp"
#include "opdyn/errors.hpp"
#include "opdyn/subjects.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace opdyn
{

namespace
{

using json = nlohmann::json;

bool is_word_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

std::string to_lower_ascii(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

void replace_all(std::string& s, std::string_view from, std::string_view to)
{
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
}

// Lowercase, plain quotes and dashes, markdown escapes removed.
std::string normalize(std::string_view text)
{
    std::string s = to_lower_ascii(text);
    replace_all(s, "\\$", "$");
    replace_all(s, "\\%", "%");
    replace_all(s, "\xE2\x80\x9C", "\"");
    replace_all(s, "\xE2\x80\x9D", "\"");
    replace_all(s, "\xE2\x80\x98", "'");
    replace_all(s, "\xE2\x80\x99", "'");
    replace_all(s, "\xE2\x80\x93", "-");
    replace_all(s, "\xE2\x80\x94", "-");
    return s;
}

std::vector<std::string> split_sentences(const std::string& s)
{
    std::vector<std::string> out;
    std::size_t begin = 0;
    auto is_space = [&](std::size_t i) { return i >= s.size() || std::isspace(static_cast<unsigned char>(s[i])); };
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c != '.' && c != '!' && c != '?')
            continue;
        std::size_t end = i + 1;
        while (end < s.size() && (s[end] == '"' || s[end] == '\''))
            ++end;
        if (!is_space(end))
            continue;
        out.push_back(s.substr(begin, end - begin));
        begin = end;
        i     = end;
    }
    if (begin < s.size()) {
        auto tail = s.substr(begin);
        if (std::any_of(tail.begin(), tail.end(), [](unsigned char ch) { return !std::isspace(ch); }))
            out.push_back(std::move(tail));
    }
    return out;
}

// Position of `phrase` in `s` starting on a word boundary; when `whole` the
// match must also end on one.
std::size_t find_phrase(std::string_view s, std::string_view phrase, bool whole = true, std::size_t from = 0)
{
    if (phrase.empty())
        return std::string_view::npos;
    for (auto pos = s.find(phrase, from); pos != std::string_view::npos; pos = s.find(phrase, pos + 1)) {
        const bool starts = pos == 0 || !is_word_char(s[pos - 1]) || !is_word_char(phrase.front());
        const auto end    = pos + phrase.size();
        const bool ends   = !whole || end == s.size() || !is_word_char(s[end]) || !is_word_char(phrase.back());
        if (starts && ends)
            return pos;
    }
    return std::string_view::npos;
}

bool contains_phrase(std::string_view s, std::string_view phrase, bool whole = true)
{
    return find_phrase(s, phrase, whole) != std::string_view::npos;
}

struct PercentMatch
{
    std::size_t begin = 0;
    std::size_t end = 0;
    double lo = 0.0;
    double hi = 0.0;
    bool is_range = false;
};

std::optional<std::pair<double, std::size_t>> read_number(const std::string& s, std::size_t i)
{
    if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
        return std::nullopt;
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
        ++j;
    if (j + 1 < s.size() && s[j] == '.' && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
            ++j;
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data() + i, s.data() + j, v);
    if (res.ec != std::errc())
        return std::nullopt;
    return std::make_pair(v, j);
}

std::size_t skip_spaces(const std::string& s, std::size_t i)
{
    while (i < s.size() && s[i] == ' ')
        ++i;
    return i;
}

// Length of a percent sign or the word "percent" at i, else 0.
std::size_t percent_sign(const std::string& s, std::size_t i)
{
    if (i < s.size() && s[i] == '%')
        return 1;
    if (s.compare(i, 7, "percent") == 0 && (i + 7 == s.size() || !is_word_char(s[i + 7])))
        return 7;
    return 0;
}

std::vector<PercentMatch> find_percentages(const std::string& s)
{
    std::vector<PercentMatch> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const bool boundary = i == 0 || !(is_word_char(s[i - 1]) || s[i - 1] == '.');
        auto first = boundary ? read_number(s, i) : std::nullopt;
        if (!first) {
            ++i;
            continue;
        }
        auto [v1, j] = *first;
        std::size_t k  = skip_spaces(s, j);
        const auto p1 = percent_sign(s, k);
        std::size_t after_first = p1 ? k + p1 : j;

        // Range: "20-30%", "20% - 30%", "20 to 30 percent".
        std::size_t r = skip_spaces(s, after_first);
        std::size_t sep = 0;
        if (r < s.size() && s[r] == '-')
            sep = 1;
        else if (s.compare(r, 3, "to ") == 0)
            sep = 2;
        if (sep) {
            const auto q = skip_spaces(s, r + sep);
            if (auto second = read_number(s, q)) {
                const auto [v2, e2] = *second;
                const auto k2 = skip_spaces(s, e2);
                if (const auto p2 = percent_sign(s, k2)) {
                    out.push_back({i, k2 + p2, std::min(v1, v2), std::max(v1, v2), true});
                    i = k2 + p2;
                    continue;
                }
            }
        }
        if (p1) {
            out.push_back({i, after_first, v1, v1, false});
            i = after_first;
            continue;
        }
        i = j;
    }
    return out;
}

// Start of the clause containing `pos`.
std::size_t clause_start(const std::string& s, std::size_t pos, bool split_on_conjunctions)
{
    std::size_t start = 0;
    for (char c : {',', ';', ':'}) {
        const auto p = s.rfind(c, pos == 0 ? 0 : pos - 1);
        if (p != std::string::npos && p < pos)
            start = std::max(start, p + 1);
    }
    if (split_on_conjunctions) {
        for (std::string_view w : {" and ", " but "}) {
            const auto p = s.rfind(w, pos);
            if (p != std::string::npos && p + w.size() <= pos)
                start = std::max(start, p + w.size());
        }
    }
    return start;
}

enum class Tie
{
    None,
    A,
    B,
};

Tie nearest_item_before(std::string_view seg, const ItemNames& names)
{
    std::size_t best = std::string_view::npos;
    Tie tie          = Tie::None;
    auto scan        = [&](const std::vector<std::string>& list, Tie which) {
        for (const auto& n : list) {
            for (auto p = find_phrase(seg, n); p != std::string_view::npos; p = find_phrase(seg, n, true, p + 1)) {
                if (best == std::string_view::npos || p > best) {
                    best = p;
                    tie  = which;
                }
            }
        }
    };
    scan(names.item_a, Tie::A);
    scan(names.item_b, Tie::B);
    return tie;
}

Tie first_item_after(std::string_view seg, const ItemNames& names)
{
    std::size_t best = std::string_view::npos;
    Tie tie          = Tie::None;
    auto scan        = [&](const std::vector<std::string>& list, Tie which) {
        for (const auto& n : list) {
            const auto p = find_phrase(seg, n);
            if (p != std::string_view::npos && (best == std::string_view::npos || p < best)) {
                best = p;
                tie  = which;
            }
        }
    };
    scan(names.item_a, Tie::A);
    scan(names.item_b, Tie::B);
    return tie;
}

bool cue_hits(const std::string& sentence, const std::vector<Cue>& cues, const LexiconConfig& lex)
{
    for (const auto& cue : cues) {
        if (!contains_phrase(sentence, cue.phrase))
            continue;
        if (!cue.needs_decision)
            return true;
        for (const auto& w : lex.decision_words)
            if (contains_phrase(sentence, w, false))
                return true;
    }
    return false;
}

std::vector<Cue> cues(std::initializer_list<const char*> phrases)
{
    std::vector<Cue> out;
    for (const char* p : phrases)
        out.push_back({p, false});
    return out;
}

json cues_to_json(const std::vector<Cue>& list)
{
    json arr = json::array();
    for (const auto& c : list) {
        if (c.needs_decision)
            arr.push_back({{"phrase", c.phrase}, {"needs_decision", true}});
        else
            arr.push_back(c.phrase);
    }
    return arr;
}

std::vector<Cue> cues_from_json(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_array())
        throw ConfigError(std::string("lexicon: '") + key + "' must be a list");
    std::vector<Cue> out;
    for (const auto& e : j.at(key)) {
        if (e.is_string())
            out.push_back({to_lower_ascii(e.get<std::string>()), false});
        else if (e.is_object() && e.contains("phrase"))
            out.push_back({to_lower_ascii(e.at("phrase").get<std::string>()), e.value("needs_decision", false)});
        else
            throw ConfigError(std::string("lexicon: bad entry in '") + key + "'");
    }
    return out;
}

std::vector<std::string> strings_from_json(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_array())
        throw ConfigError(std::string("lexicon: '") + key + "' must be a list");
    std::vector<std::string> out;
    for (const auto& e : j.at(key))
        out.push_back(to_lower_ascii(e.get<std::string>()));
    return out;
}

} // namespace

LexiconConfig LexiconConfig::defaults()
{
    LexiconConfig l;
    l.full_cues = cues({"all the funding", "100% of the funding", "full funding", "fully funded", "all of the funding"});
    l.zero_cues = cues({"not have any funding", "not receive any funding", "not receive funding", "not get any funding",
                        "not provide any funding", "zero funding", "$0", "0 funding", "should be zero",
                        "should not be funded"});
    l.zero_cues.push_back({"no funding", true});
    l.unspecified_cues =
        cues({"cannot be determined", "cannot be definitively determined", "cannot be stated", "cannot be given",
              "not possible to determine", "no specific funding", "no specific amount", "no definitive funding",
              "funding remains unspecified", "remain unspecified", "premature to allocate", "premature to determine",
              "no funding percentage", "not allocating a specific", "wouldn't recommend a specific",
              "case-by-case basis"});
    l.partial_cues = cues({"measured funding", "some funding", "reduced funding", "partial funding", "minimal funding",
                           "reducing the funding", "portion of the funding", "portion of the budget"});
    l.implicit_cues  = cues({"the same", "remains unchanged", "remain unchanged", "no change", "unchanged"});
    l.decision_words = {"should", "will", "would", "receive", "allocat", "give", "given", "provide",
                        "recommend", "suggest", "propose", "get"};
    l.reference_markers = {"previous", "initial", "initially", "other person", "other participant", "other agent",
                           "their", "between", "average of", "midpoint of", "suggestion of", "proposal of",
                           "stance of", "opinion of", "opinion for", "remaining", "suggested", "suggests", "suggesting", "revised allocation"};
    return l;
}

LexiconConfig LexiconConfig::from_json_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("lexicon: ") + e.what());
    }
    LexiconConfig l;
    l.full_cues         = cues_from_json(j, "full");
    l.zero_cues         = cues_from_json(j, "zero");
    l.unspecified_cues  = cues_from_json(j, "unspecified");
    l.partial_cues      = cues_from_json(j, "partial");
    l.implicit_cues     = cues_from_json(j, "implicit");
    l.decision_words    = strings_from_json(j, "decision_words");
    l.reference_markers = strings_from_json(j, "reference_markers");
    l.validate();
    return l;
}

LexiconConfig LexiconConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open lexicon file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string LexiconConfig::to_json_text() const
{
    json j;
    j["version"]           = 1;
    j["full"]              = cues_to_json(full_cues);
    j["zero"]              = cues_to_json(zero_cues);
    j["unspecified"]       = cues_to_json(unspecified_cues);
    j["partial"]           = cues_to_json(partial_cues);
    j["implicit"]          = cues_to_json(implicit_cues);
    j["decision_words"]    = decision_words;
    j["reference_markers"] = reference_markers;
    return j.dump(2);
}

void LexiconConfig::validate() const
{
    std::set<std::string> seen;
    const std::pair<const char*, const std::vector<Cue>*> lists[] = {
        {"full", &full_cues},       {"zero", &zero_cues},         {"unspecified", &unspecified_cues},
        {"partial", &partial_cues}, {"implicit", &implicit_cues},
    };
    for (const auto& [name, list] : lists) {
        if (list->empty())
            throw ConfigError(std::string("lexicon: '") + name + "' must not be empty");
        for (const auto& c : *list) {
            if (c.phrase.empty())
                throw ConfigError(std::string("lexicon: empty phrase in '") + name + "'");
            if (!seen.insert(c.phrase).second)
                throw ConfigError("lexicon: phrase '" + c.phrase + "' appears in more than one list");
        }
    }
}

ItemNames ItemNames::defaults()
{
    const auto values = TextValues::defaults();
    ItemNames n;
    for (auto c : {Connotation::Positive, Connotation::Neutral, Connotation::Negative}) {
        n.item_a.push_back(to_lower_ascii(values.get(SubjectRole::ItemA, c)));
        n.item_b.push_back(to_lower_ascii(values.get(SubjectRole::ItemB, c)));
    }
    return n;
}

ItemNames ItemNames::of(std::string item_a, std::string item_b)
{
    ItemNames n;
    n.item_a.push_back(to_lower_ascii(item_a));
    n.item_b.push_back(to_lower_ascii(item_b));
    return n;
}

char to_char(OptionLabel l)
{
    return static_cast<char>('a' + static_cast<int>(l));
}

Stance stance_of(OptionLabel l)
{
    switch (l) {
    case OptionLabel::A:
        return Stance::Full;
    case OptionLabel::B:
        return Stance::Partial;
    case OptionLabel::C:
        return Stance::No;
    }
    return Stance::No;
}

OptionLabel option_for(Stance s)
{
    switch (s) {
    case Stance::Full:
        return OptionLabel::A;
    case Stance::Partial:
        return OptionLabel::B;
    case Stance::No:
        return OptionLabel::C;
    }
    return OptionLabel::C;
}

OptionParse parse_option(std::string_view raw)
{
    const std::string s = normalize(raw);
    auto label_at       = [&](std::size_t i) -> std::optional<OptionLabel> {
        if (i >= s.size() || s[i] < 'a' || s[i] > 'c')
            return std::nullopt;
        if (i + 1 < s.size() && is_word_char(s[i + 1]))
            return std::nullopt;
        return static_cast<OptionLabel>(s[i] - 'a');
    };

    auto finish = [](std::vector<OptionLabel> seen) {
        OptionParse p;
        p.seen = std::move(seen);
        if (p.seen.size() == 1)
            p.label = p.seen.front();
        return p;
    };
    auto add = [](std::vector<OptionLabel>& v, OptionLabel l) {
        if (std::find(v.begin(), v.end(), l) == v.end())
            v.push_back(l);
    };

    std::vector<OptionLabel> formatted;
    for (auto pos = s.find("option:"); pos != std::string::npos; pos = s.find("option:", pos + 1)) {
        auto i = skip_spaces(s, pos + 7);
        if (i < s.size() && (s[i] == '(' || s[i] == '['))
            i = skip_spaces(s, i + 1);
        if (auto l = label_at(i))
            add(formatted, *l);
    }
    if (!formatted.empty())
        return finish(std::move(formatted));

    std::vector<std::pair<std::size_t, OptionLabel>> loose;
    for (std::size_t i = 0; i + 2 < s.size(); ++i)
        if (s[i] == '(' && s[i + 2] == ')' && s[i + 1] >= 'a' && s[i + 1] <= 'c')
            loose.emplace_back(i, static_cast<OptionLabel>(s[i + 1] - 'a'));
    for (auto pos = find_phrase(s, "option", true); pos != std::string::npos;
         pos      = find_phrase(s, "option", true, pos + 1)) {
        const auto i = skip_spaces(s, pos + 6);
        if (i > pos + 6)
            if (auto l = label_at(i))
                loose.emplace_back(i, *l);
    }
    std::sort(loose.begin(), loose.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<OptionLabel> seen;
    for (const auto& [pos, l] : loose)
        add(seen, l);
    return finish(std::move(seen));
}

Classifier::Classifier(LexiconConfig lexicon, ItemNames names)
    : m_lexicon(std::move(lexicon))
    , m_names(std::move(names))
{
    m_lexicon.validate();
    for (auto* list : {&m_names.item_a, &m_names.item_b})
        for (auto& n : *list)
            n = normalize(n);
}

std::optional<AllocationMatch> Classifier::extract_allocation(std::string_view text,
                                                              std::vector<std::string>* anomalies) const
{
    // a value naming Item A beats one that names nothing, even from an earlier sentence
    std::optional<AllocationMatch> named, unnamed;
    for (const auto& sentence : split_sentences(normalize(text))) {
        bool took_named = false, took_unnamed = false;
        const auto matches = find_percentages(sentence);
        for (std::size_t m = 0; m < matches.size(); ++m) {
            const auto& pm = matches[m];
            if (pm.hi > 100.0) {
                if (anomalies)
                    anomalies->push_back("allocation_out_of_range");
                continue;
            }
            const auto before = std::string_view(sentence).substr(0, pm.begin);
            if (std::count(before.begin(), before.end(), '(') > std::count(before.begin(), before.end(), ')'))
                continue;
            auto cs = clause_start(sentence, pm.begin, false);
            // a list after a colon belongs to the phrase that introduced it
            if (cs > 0 && sentence[cs - 1] == ':')
                cs = clause_start(sentence, cs - 1, false);
            const auto clause = before.substr(cs);
            const bool is_reference =
                std::any_of(m_lexicon.reference_markers.begin(), m_lexicon.reference_markers.end(),
                            [&](const std::string& marker) { return contains_phrase(clause, marker); });
            if (is_reference)
                continue;

            auto back_from = clause_start(sentence, pm.begin, true);
            if (m > 0)
                back_from = std::max(back_from, matches[m - 1].end);
            Tie tie = nearest_item_before(std::string_view(sentence).substr(back_from, pm.begin - back_from), m_names);
            if (tie == Tie::None) {
                std::size_t fwd_end = m + 1 < matches.size() ? matches[m + 1].begin : sentence.size();
                for (char c : {',', ';'}) {
                    const auto p = sentence.find(c, pm.end);
                    if (p != std::string::npos)
                        fwd_end = std::min(fwd_end, p);
                }
                tie = first_item_after(std::string_view(sentence).substr(pm.end, fwd_end - pm.end), m_names);
            }
            if (tie == Tie::B)
                continue;

            AllocationMatch am;
            am.allocation = pm.is_range ? (pm.lo + pm.hi) / 2.0 : pm.lo;
            if (pm.is_range)
                am.range = AllocationRange{pm.lo, pm.hi};
            if (tie == Tie::A && !took_named) {
                named      = am;
                took_named = true;
            } else if (tie == Tie::None && !took_unnamed) {
                unnamed      = am;
                took_unnamed = true;
            }
        }
    }
    return named ? named : unnamed;
}

ClassifiedOpinion Classifier::classify(std::string_view text, Mode mode, bool strict) const
{
    ClassifiedOpinion out;
    auto unclassified = [&]() {
        if (strict)
            throw ClassificationError("cannot classify opinion: \"" + std::string(text) + "\"");
        out.unclassified = true;
        out.anomalies.push_back("unclassified");
        return out;
    };

    if (mode == Mode::ClosedForm) {
        const auto opt = parse_option(text);
        if (opt.ambiguous()) {
            out.anomalies.push_back("option_ambiguous");
            return unclassified();
        }
        out.stance = stance_of(*opt.label);
        if (out.stance == Stance::No)
            out.no_kind = NoKind::ExplicitZero;
        return out;
    }

    if (auto am = extract_allocation(text, &out.anomalies)) {
        out.allocation       = am->allocation;
        out.allocation_range = am->range;
        if (am->allocation >= 100.0) {
            out.stance = Stance::Full;
        } else if (am->allocation <= 0.0) {
            out.stance  = Stance::No;
            out.no_kind = NoKind::ExplicitZero;
        } else {
            out.stance = Stance::Partial;
        }
        return out;
    }

    for (const auto& sentence : split_sentences(normalize(text))) {
        if (cue_hits(sentence, m_lexicon.unspecified_cues, m_lexicon)) {
            out.stance  = Stance::No;
            out.no_kind = NoKind::Unspecified;
            return out;
        }
        if (cue_hits(sentence, m_lexicon.zero_cues, m_lexicon)) {
            out.stance  = Stance::No;
            out.no_kind = NoKind::ExplicitZero;
            return out;
        }
        if (cue_hits(sentence, m_lexicon.full_cues, m_lexicon)) {
            out.stance = Stance::Full;
            return out;
        }
        if (cue_hits(sentence, m_lexicon.partial_cues, m_lexicon)) {
            out.stance = Stance::Partial;
            return out;
        }
    }

    if (cue_hits(normalize(text), m_lexicon.implicit_cues, m_lexicon)) {
        out.implicit = true;
        return out;
    }
    return unclassified();
}

ClassifiedOpinion resolve_implicit(std::span<const OpinionRecord> history)
{
    if (history.empty())
        throw InternalError("resolve_implicit: empty history");
    ClassifiedOpinion current = history.back().classified;
    if (!current.implicit && !current.unclassified)
        return current;
    for (auto it = history.rbegin() + 1; it != history.rend(); ++it) {
        const auto& c = it->classified;
        if (c.implicit || c.unclassified || c.resolved_from_time)
            continue;
        current.stance             = c.stance;
        current.no_kind            = c.no_kind;
        current.allocation         = c.allocation;
        current.allocation_range   = c.allocation_range;
        current.implicit           = false;
        current.resolved_from_time = it->time;
        return current;
    }
    throw InternalError("resolve_implicit: no explicit opinion in history");
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open corpus file " + path.string());
    std::vector<CorpusEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            const auto j = json::parse(line);
            CorpusEntry e;
            e.text     = j.at("text").get<std::string>();
            e.mode     = mode_from_string(j.value("mode", "freeform"));
            e.implicit = j.value("implicit", false);
            if (!e.implicit)
                e.stance = stance_from_string(j.at("stance").get<std::string>());
            if (j.contains("no_kind") && !j.at("no_kind").is_null())
                e.no_kind = no_kind_from_string(j.at("no_kind").get<std::string>());
            if (j.contains("allocation") && !j.at("allocation").is_null())
                e.allocation = j.at("allocation").get<double>();
            e.source = j.value("source", "");
            out.push_back(std::move(e));
        } catch (const json::exception& ex) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return out;
}

bool matches(const CorpusEntry& expected, const ClassifiedOpinion& got)
{
    if (expected.implicit)
        return got.implicit;
    if (got.implicit || got.unclassified || got.stance != expected.stance)
        return false;
    if (expected.stance == Stance::No && got.no_kind != expected.no_kind.value_or(NoKind::ExplicitZero))
        return false;
    if (expected.allocation.has_value() != got.allocation.has_value())
        return false;
    return !expected.allocation || std::abs(*expected.allocation - *got.allocation) <= 1e-9;
}

CorpusReport evaluate_corpus(const Classifier& classifier, std::span<const CorpusEntry> corpus)
{
    CorpusReport r;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto got = classifier.classify(corpus[i].text, corpus[i].mode);
        ++r.total;
        if (matches(corpus[i], got))
            ++r.correct;
        else
            r.failures.push_back({i, corpus[i], got});
    }
    return r;
}

} // namespace opdyn

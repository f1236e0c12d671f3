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
#ifndef OPDYN_CLASSIFIER_HPP
#define OPDYN_CLASSIFIER_HPP

#include "opdyn/opinion.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace opdyn
{

struct Cue
{
    std::string phrase;
    /// Only counts in a sentence that also contains one of the decision words.
    bool needs_decision = false;
};

/// Phrase lists driving the rule-based classifier. All matching is
/// case-insensitive and on word boundaries.
struct LexiconConfig
{
    std::vector<Cue> full_cues;
    std::vector<Cue> zero_cues;
    std::vector<Cue> unspecified_cues;
    std::vector<Cue> partial_cues;
    std::vector<Cue> implicit_cues;
    std::vector<std::string> decision_words;
    /// A percentage whose clause contains one of these refers to someone
    /// else's (or an earlier) allocation, not the decision.
    std::vector<std::string> reference_markers;

    static LexiconConfig defaults();
    static LexiconConfig load(const std::filesystem::path& path);
    static LexiconConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
    void validate() const;
};

/// Names the classifier uses to decide which item a percentage belongs to.
struct ItemNames
{
    std::vector<std::string> item_a;
    std::vector<std::string> item_b;

    /// Every item text value from the default table.
    static ItemNames defaults();
    static ItemNames of(std::string item_a, std::string item_b);
};

struct AllocationMatch
{
    double allocation = 0.0;
    std::optional<AllocationRange> range;
};

enum class OptionLabel
{
    A,
    B,
    C,
};

char to_char(OptionLabel l);
Stance stance_of(OptionLabel l);
OptionLabel option_for(Stance s);

struct OptionParse
{
    std::optional<OptionLabel> label;
    /// Distinct labels seen, in order of first appearance.
    std::vector<OptionLabel> seen;
    bool ambiguous() const
    {
        return !label.has_value();
    }
};

/// Finds the unique option label in a closed-form reply. The explicit
/// "Option: (x)" form wins over loose "(x)" markers.
OptionParse parse_option(std::string_view text);

class Classifier
{
public:
    explicit Classifier(LexiconConfig lexicon = LexiconConfig::defaults(), ItemNames names = ItemNames::defaults());

    /// Percentage tied to Item A's funding in the last sentence that states a
    /// decision. Out-of-range values are dropped and noted in `anomalies`.
    std::optional<AllocationMatch> extract_allocation(std::string_view text,
                                                      std::vector<std::string>* anomalies = nullptr) const;

    /// Classifies one opinion. With `strict`, an unclassifiable text raises
    /// ClassificationError instead of coming back flagged.
    ClassifiedOpinion classify(std::string_view text, Mode mode, bool strict = false) const;

    const LexiconConfig& lexicon() const
    {
        return m_lexicon;
    }
    const ItemNames& names() const
    {
        return m_names;
    }

private:
    LexiconConfig m_lexicon;
    ItemNames m_names;
};

/// Resolves the last record of `history` (oldest first) when it is implicit
/// or unclassified by copying the nearest earlier explicit classification.
/// Anything else comes back unchanged.
ClassifiedOpinion resolve_implicit(std::span<const OpinionRecord> history);

struct CorpusEntry
{
    std::string text;
    Mode mode = Mode::FreeForm;
    Stance stance = Stance::No;
    std::optional<NoKind> no_kind;
    std::optional<double> allocation;
    bool implicit = false;
    std::string source;
};

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path);

struct CorpusFailure
{
    std::size_t index = 0;
    CorpusEntry expected;
    ClassifiedOpinion got;
};

struct CorpusReport
{
    std::size_t total = 0;
    std::size_t correct = 0;
    std::vector<CorpusFailure> failures;
    double accuracy() const
    {
        return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    }
};

bool matches(const CorpusEntry& expected, const ClassifiedOpinion& got);
CorpusReport evaluate_corpus(const Classifier& classifier, std::span<const CorpusEntry> corpus);

} // namespace opdyn

#endif

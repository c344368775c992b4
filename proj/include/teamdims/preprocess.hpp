#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "teamdims/corpus.hpp"
#include "teamdims/error.hpp"
#include "teamdims/hash.hpp"
#include "teamdims/text.hpp"

namespace teamdims {

// Categories run in a fixed order: name masking first (so names are not
// mangled by other rules), then abbreviation expansion, local-term
// replacement, and emotion/punctuation tagging last. Lowercasing happens
// right after masking, so roster lookup sees the original case while every
// later category matches normalized text.
enum class RuleCategory { name_mask, abbreviation, local_term, emotion_punct_tag };

inline std::string to_string(RuleCategory c) {
    switch (c) {
        case RuleCategory::name_mask: return "name_mask";
        case RuleCategory::abbreviation: return "abbreviation";
        case RuleCategory::local_term: return "local_term";
        case RuleCategory::emotion_punct_tag: return "emotion_punct_tag";
    }
    return "?";
}

inline RuleCategory rule_category_from_string(const std::string& s) {
    for (RuleCategory c : {RuleCategory::name_mask, RuleCategory::abbreviation,
                           RuleCategory::local_term, RuleCategory::emotion_punct_tag})
        if (to_string(c) == s) return c;
    throw parse_error("unknown preprocess rule category: " + s);
}

struct PreprocessRule {
    RuleCategory category;
    std::string pattern;     // single token; emotion patterns are surface forms
    std::string replacement; // plain text or one {{placeholder}}
};

class Lexicon {
public:
    Lexicon() = default;

    void add_rule(PreprocessRule rule, std::size_t lineno = 0) {
        std::string key = ascii_lower(rule.pattern);
        if (key.empty()) throw parse_error(location(lineno) + "empty rule pattern");
        if (!patterns_[static_cast<int>(rule.category)].insert(key).second)
            throw parse_error(location(lineno) + "duplicate pattern '" + rule.pattern +
                              "' in category " + to_string(rule.category));
        if (rule.replacement.find("{{") != std::string::npos &&
            !is_placeholder(rule.replacement))
            throw parse_error(location(lineno) + "replacement '" + rule.replacement +
                              "' is not a valid {{placeholder}}");
        switch (rule.category) {
            case RuleCategory::name_mask:
                roster_.push_back(rule.pattern);
                break;
            case RuleCategory::abbreviation:
                abbreviations_[key] = rule.replacement;
                break;
            case RuleCategory::local_term:
                local_terms_[key] = rule.replacement;
                break;
            case RuleCategory::emotion_punct_tag:
                emotion_rules_.push_back({key, rule.replacement});
                atomic_forms_.insert(key);
                break;
        }
        rules_.push_back(std::move(rule));
    }

    void add_roster_name(std::string name) {
        if (!name.empty()) roster_.push_back(std::move(name));
    }

    const std::vector<PreprocessRule>& rules() const { return rules_; }
    const std::vector<std::string>& roster() const { return roster_; }
    const std::unordered_set<std::string>& atomic_forms() const { return atomic_forms_; }

    bool roster_contains(std::string_view token) const {
        std::string key = ascii_lower(token);
        for (const auto& name : roster_)
            if (ascii_lower(name) == key) return true;
        return false;
    }

    const std::string* find_abbreviation(const std::string& token) const {
        auto it = abbreviations_.find(token);
        return it == abbreviations_.end() ? nullptr : &it->second;
    }

    const std::string* find_local_term(const std::string& token) const {
        auto it = local_terms_.find(token);
        return it == local_terms_.end() ? nullptr : &it->second;
    }

    // First matching rule wins, in file order. A token matches a pattern
    // exactly, or as the pattern with its final character repeated, which
    // collapses runs like "???" or ":)))" into a single tag.
    const std::string* match_emotion(const std::string& token) const {
        for (const auto& [pattern, replacement] : emotion_rules_) {
            if (token == pattern) return &replacement;
            if (token.size() > pattern.size() && token.compare(0, pattern.size(), pattern) == 0) {
                char tail = pattern.back();
                bool all_tail = true;
                for (std::size_t i = pattern.size(); i < token.size(); ++i)
                    if (token[i] != tail) { all_tail = false; break; }
                if (all_tail) return &replacement;
            }
        }
        return nullptr;
    }

    std::string serialize_tsv() const {
        std::ostringstream out;
        out << "# category\tpattern\treplacement\n";
        for (const auto& r : rules_)
            out << to_string(r.category) << '\t' << r.pattern << '\t' << r.replacement << '\n';
        // Roster names supplied outside the rule list (e.g. from a roster
        // file) must survive a save/load cycle; emit them as masking rules.
        const auto& masked = patterns_[static_cast<int>(RuleCategory::name_mask)];
        std::unordered_set<std::string> seen;
        for (const auto& name : roster_) {
            std::string key = ascii_lower(name);
            if (masked.count(key) || !seen.insert(key).second) continue;
            out << "name_mask\t" << name << "\t{{NAME}}\n";
        }
        return out.str();
    }

    // Content hash over rules and roster; stamps corpora and model artifacts.
    std::string fingerprint() const {
        std::string blob = serialize_tsv();
        blob += "\nroster:";
        std::vector<std::string> sorted = roster_;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& name : sorted) blob += "\n" + name;
        return content_hash(blob);
    }

private:
    static std::string location(std::size_t lineno) {
        return lineno ? "line " + std::to_string(lineno) + ": " : "";
    }

    std::vector<PreprocessRule> rules_;
    std::vector<std::string> roster_;
    std::array<std::unordered_set<std::string>, 4> patterns_;
    std::unordered_map<std::string, std::string> abbreviations_;
    std::unordered_map<std::string, std::string> local_terms_;
    std::vector<std::pair<std::string, std::string>> emotion_rules_;
    std::unordered_set<std::string> atomic_forms_;
};

// Lexicon file: UTF-8 TSV, columns category<TAB>pattern<TAB>replacement,
// '#' starts a comment line.
inline Lexicon parse_lexicon_tsv(std::istream& in) {
    Lexicon lexicon;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw parse_error("line " + std::to_string(lineno) +
                              ": expected category<TAB>pattern<TAB>replacement");
        PreprocessRule rule;
        rule.category = rule_category_from_string(line.substr(0, t1));
        rule.pattern = line.substr(t1 + 1, t2 - t1 - 1);
        rule.replacement = line.substr(t2 + 1);
        lexicon.add_rule(std::move(rule), lineno);
    }
    return lexicon;
}

inline Lexicon load_lexicon(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open lexicon file: " + path);
    try {
        return parse_lexicon_tsv(in);
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

inline void load_roster_file(Lexicon& lexicon, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open roster file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos || line[b] == '#') continue;
        std::size_t e = line.find_last_not_of(" \t");
        lexicon.add_roster_name(line.substr(b, e - b + 1));
    }
}

// The published rewrite examples plus a versioned default inventory of
// emoticons, textese abbreviations and Singlish terms.
inline const char* default_lexicon_tsv() {
    return R"(# category	pattern	replacement
emotion_punct_tag	?	{{question_mark}}
emotion_punct_tag	!	{{exclamation_mark}}
emotion_punct_tag	:)	{{pos_emo}}
emotion_punct_tag	:-)	{{pos_emo}}
emotion_punct_tag	(:	{{pos_emo}}
emotion_punct_tag	:d	{{pos_emo}}
emotion_punct_tag	:-d	{{pos_emo}}
emotion_punct_tag	:p	{{pos_emo}}
emotion_punct_tag	;)	{{pos_emo}}
emotion_punct_tag	^^	{{pos_emo}}
emotion_punct_tag	^_^	{{pos_emo}}
emotion_punct_tag	xd	{{pos_emo}}
emotion_punct_tag	<3	{{pos_emo}}
emotion_punct_tag	:(	{{neg_emo}}
emotion_punct_tag	:-(	{{neg_emo}}
emotion_punct_tag	):	{{neg_emo}}
emotion_punct_tag	:'(	{{neg_emo}}
emotion_punct_tag	t_t	{{neg_emo}}
emotion_punct_tag	;_;	{{neg_emo}}
emotion_punct_tag	</3	{{neg_emo}}
abbreviation	ikr	i know right
abbreviation	omg	oh my goodness
abbreviation	idk	i do not know
abbreviation	btw	by the way
abbreviation	brb	be right back
abbreviation	thx	thanks
abbreviation	pls	please
abbreviation	plz	please
abbreviation	u	you
abbreviation	ur	your
abbreviation	r	are
abbreviation	im	i am
abbreviation	ive	i have
abbreviation	dont	do not
abbreviation	cant	cannot
abbreviation	wont	will not
abbreviation	gonna	going to
abbreviation	wanna	want to
abbreviation	msg	message
abbreviation	tmr	tomorrow
abbreviation	nvm	never mind
abbreviation	asap	as soon as possible
local_term	macam	similar
local_term	chim	difficult
local_term	sian	boring
local_term	paiseh	embarrassed
local_term	shiok	great
local_term	walao	oh no
local_term	kiasu	afraid to lose
local_term	jialat	very bad
local_term	liao	already
)";
}

inline Lexicon default_lexicon() {
    std::istringstream in(default_lexicon_tsv());
    return parse_lexicon_tsv(in);
}

namespace detail {

inline void splice_replacement(std::vector<std::string>& out, const std::string& replacement) {
    for (auto& piece : whitespace_tokens(replacement)) out.push_back(std::move(piece));
}

} // namespace detail

// Deterministic total rewrite of one message. Placeholders emitted by any
// step are opaque to all later steps, which also makes a second pass a no-op.
inline std::string preprocess_message(std::string_view text, const Lexicon& lexicon) {
    std::vector<std::string> tokens = chat_tokens(text, &lexicon.atomic_forms());

    // name masking on the original case
    for (auto& token : tokens) {
        if (is_placeholder(token)) continue;
        if (lexicon.roster_contains(token)) token = "{{NAME}}";
    }
    for (auto& token : tokens)
        if (!is_placeholder(token)) token = ascii_lower(token);

    // abbreviation expansion, then local terms
    for (auto lookup : {&Lexicon::find_abbreviation, &Lexicon::find_local_term}) {
        std::vector<std::string> next;
        next.reserve(tokens.size());
        for (auto& token : tokens) {
            const std::string* replacement =
                is_placeholder(token) ? nullptr : (lexicon.*lookup)(token);
            if (replacement) detail::splice_replacement(next, *replacement);
            else next.push_back(std::move(token));
        }
        tokens = std::move(next);
    }

    // emotion and punctuation tagging
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (auto& token : tokens) {
        if (is_placeholder(token)) {
            out.push_back(std::move(token));
            continue;
        }
        if (const std::string* tag = lexicon.match_emotion(token)) {
            out.push_back(*tag);
            continue;
        }
        if (is_punct_only(token)) {
            for (const auto& run : same_char_runs(token)) {
                const std::string* tag = lexicon.match_emotion(run);
                out.push_back(tag ? *tag : run);
            }
            continue;
        }
        out.push_back(std::move(token));
    }
    return join_tokens(out);
}

inline Corpus preprocess_corpus(const Corpus& corpus, const Lexicon& lexicon) {
    Corpus out = corpus;
    for (auto& m : out.messages) m.text = preprocess_message(m.text, lexicon);
    out.meta["preprocessed"] = "true";
    out.meta["lexicon_fingerprint"] = lexicon.fingerprint();
    return out;
}

} // namespace teamdims

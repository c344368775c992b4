#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "teamdims/corpus.hpp"
#include "teamdims/error.hpp"
#include "teamdims/hash.hpp"
#include "teamdims/postag.hpp"
#include "teamdims/text.hpp"

namespace teamdims {

enum class FeatureName : std::uint8_t {
    F_TIME,
    F_INSTRUCTION,
    F_PROGRESS,
    F_ELABORATION,
    F_GREETING,
    F_POSEMO,
    F_AGREEMENT,
};

inline constexpr std::array<FeatureName, 7> kFeatureNames = {
    FeatureName::F_TIME,      FeatureName::F_INSTRUCTION, FeatureName::F_PROGRESS,
    FeatureName::F_ELABORATION, FeatureName::F_GREETING,  FeatureName::F_POSEMO,
    FeatureName::F_AGREEMENT,
};
inline constexpr std::size_t kNumFeatures = kFeatureNames.size();

inline std::string to_string(FeatureName f) {
    switch (f) {
        case FeatureName::F_TIME: return "F_TIME";
        case FeatureName::F_INSTRUCTION: return "F_INSTRUCTION";
        case FeatureName::F_PROGRESS: return "F_PROGRESS";
        case FeatureName::F_ELABORATION: return "F_ELABORATION";
        case FeatureName::F_GREETING: return "F_GREETING";
        case FeatureName::F_POSEMO: return "F_POSEMO";
        case FeatureName::F_AGREEMENT: return "F_AGREEMENT";
    }
    return "?";
}

inline FeatureName feature_from_string(const std::string& s) {
    for (FeatureName f : kFeatureNames)
        if (to_string(f) == s) return f;
    throw parse_error("unknown feature name: " + s);
}

// Placeholder appended to the text for a set bit, e.g. F_TIME -> {{f_time}}.
inline std::string feature_placeholder(FeatureName f) {
    std::string s = to_string(f);
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return "{{" + s + "}}";
}

struct FeatureVector {
    std::array<std::uint8_t, kNumFeatures> bits{};

    bool get(FeatureName f) const { return bits[static_cast<std::size_t>(f)] != 0; }
    void set(FeatureName f, bool v = true) { bits[static_cast<std::size_t>(f)] = v ? 1 : 0; }
    bool any() const {
        for (auto b : bits)
            if (b) return true;
        return false;
    }
    bool operator==(const FeatureVector&) const = default;

    std::string to_bitstring() const {
        std::string s(kNumFeatures, '0');
        for (std::size_t i = 0; i < kNumFeatures; ++i)
            if (bits[i]) s[i] = '1';
        return s;
    }
    static FeatureVector from_bitstring(const std::string& s) {
        if (s.size() != kNumFeatures)
            throw parse_error("feature bitstring must have " + std::to_string(kNumFeatures) +
                              " characters, got " + std::to_string(s.size()));
        FeatureVector fv;
        for (std::size_t i = 0; i < kNumFeatures; ++i) {
            if (s[i] != '0' && s[i] != '1')
                throw parse_error("feature bitstring must be binary: " + s);
            fv.bits[i] = s[i] == '1' ? 1 : 0;
        }
        return fv;
    }
};

// `term`: case-insensitive token-sequence match at token boundaries.
// `regex`: case-insensitive search anywhere in the whitespace-normalized text.
// `pos_pattern`: contiguous coarse-tag subsequence.
// `elaboration`: structural rule — at least min_tokens tokens, contains a
//   verb, and none of the pack's other rules (snapshotted when the pack is
//   frozen) matches. The snapshot keeps extraction monotonic under with_rule.
enum class FeatureRuleKind { term, regex, pos_pattern, elaboration };

inline std::string to_string(FeatureRuleKind k) {
    switch (k) {
        case FeatureRuleKind::term: return "term";
        case FeatureRuleKind::regex: return "regex";
        case FeatureRuleKind::pos_pattern: return "pos_pattern";
        case FeatureRuleKind::elaboration: return "elaboration";
    }
    return "?";
}

inline FeatureRuleKind feature_rule_kind_from_string(const std::string& s) {
    for (FeatureRuleKind k : {FeatureRuleKind::term, FeatureRuleKind::regex,
                              FeatureRuleKind::pos_pattern, FeatureRuleKind::elaboration})
        if (to_string(k) == s) return k;
    throw parse_error("unknown feature rule kind: " + s);
}

struct FeatureRule {
    FeatureName feature;
    FeatureRuleKind kind;
    std::string pattern;
    int priority = 0;
};

namespace detail {

struct CompiledRule {
    FeatureRule rule;
    std::vector<std::string> term_tokens;      // term
    std::optional<std::regex> re;              // regex
    std::vector<PosTag> tag_seq;               // pos_pattern
    std::size_t min_tokens = 0;                // elaboration
};

struct MessageView {
    std::vector<std::string> tokens; // lowercased, placeholders intact
    std::string normalized;          // tokens rejoined with single spaces
    std::vector<PosTag> tags;
};

template <typename T>
inline bool subsequence_at(const std::vector<T>& hay, const std::vector<T>& needle,
                           std::size_t start) {
    if (start + needle.size() > hay.size()) return false;
    for (std::size_t i = 0; i < needle.size(); ++i)
        if (!(hay[start + i] == needle[i])) return false;
    return true;
}

template <typename T>
inline bool contains_subsequence(const std::vector<T>& hay, const std::vector<T>& needle) {
    if (needle.empty() || needle.size() > hay.size()) return false;
    for (std::size_t s = 0; s + needle.size() <= hay.size(); ++s)
        if (subsequence_at(hay, needle, s)) return true;
    return false;
}

inline bool rule_matches(const CompiledRule& cr, const MessageView& mv) {
    switch (cr.rule.kind) {
        case FeatureRuleKind::term: {
            // placeholders are opaque: a term sequence containing or aligned
            // over a {{...}} token can never match
            for (std::size_t s = 0; s + cr.term_tokens.size() <= mv.tokens.size(); ++s) {
                bool ok = true;
                for (std::size_t i = 0; i < cr.term_tokens.size(); ++i) {
                    const std::string& tok = mv.tokens[s + i];
                    if (is_placeholder(tok) || tok != cr.term_tokens[i]) { ok = false; break; }
                }
                if (ok) return true;
            }
            return false;
        }
        case FeatureRuleKind::regex:
            return std::regex_search(mv.normalized, *cr.re);
        case FeatureRuleKind::pos_pattern:
            // mask tags (placeholders) never equal a public tag, so opacity
            // falls out of plain equality
            return contains_subsequence(mv.tags, cr.tag_seq);
        case FeatureRuleKind::elaboration:
            return false; // handled by the pack, needs the exclusion snapshot
    }
    return false;
}

} // namespace detail

class FeaturePack {
public:
    FeaturePack() = default;

    void add_rule(const FeatureRule& rule, std::size_t lineno = 0) {
        detail::CompiledRule cr;
        cr.rule = rule;
        if (rule.pattern.empty())
            throw parse_error(location(lineno) + "empty pattern for " + to_string(rule.feature));
        switch (rule.kind) {
            case FeatureRuleKind::term:
                cr.term_tokens = whitespace_tokens(ascii_lower(rule.pattern));
                if (cr.term_tokens.empty())
                    throw parse_error(location(lineno) + "term pattern has no tokens");
                break;
            case FeatureRuleKind::regex:
                try {
                    cr.re.emplace(rule.pattern,
                                  std::regex::ECMAScript | std::regex::icase);
                } catch (const std::regex_error& e) {
                    throw parse_error(location(lineno) + "invalid regex '" + rule.pattern +
                                      "': " + e.what());
                }
                break;
            case FeatureRuleKind::pos_pattern:
                for (const auto& name : whitespace_tokens(rule.pattern))
                    cr.tag_seq.push_back(pos_tag_from_string(name));
                if (cr.tag_seq.empty())
                    throw parse_error(location(lineno) + "pos_pattern has no tags");
                break;
            case FeatureRuleKind::elaboration:
                cr.min_tokens = parse_min_tokens(rule.pattern, lineno);
                break;
        }
        compiled_.push_back(std::move(cr));
    }

    // Captures the current non-elaboration rules as the exclusion set for
    // elaboration rules. Loaders freeze after reading a file; rules added
    // afterwards (with_rule) do not join the snapshot, so adding a rule can
    // only ever set more bits.
    void freeze_exclusions() {
        exclusion_snapshot_.clear();
        for (std::size_t i = 0; i < compiled_.size(); ++i)
            if (compiled_[i].rule.kind != FeatureRuleKind::elaboration)
                exclusion_snapshot_.push_back(i);
        frozen_ = true;
    }

    FeaturePack with_rule(const FeatureRule& rule) const {
        FeaturePack out = *this;
        out.add_rule(rule);
        if (!out.frozen_) out.freeze_exclusions();
        return out;
    }

    std::size_t size() const { return compiled_.size(); }
    bool empty() const { return compiled_.empty(); }

    std::vector<FeatureRule> rules() const {
        std::vector<FeatureRule> out;
        out.reserve(compiled_.size());
        for (const auto& cr : compiled_) out.push_back(cr.rule);
        return out;
    }

    std::vector<FeatureRule> rules_for(FeatureName f) const {
        std::vector<FeatureRule> out;
        for (const auto& cr : compiled_)
            if (cr.rule.feature == f) out.push_back(cr.rule);
        return out;
    }

    FeatureVector extract(std::string_view text, const PosTagger& tagger) const {
        detail::MessageView mv;
        for (auto& tok : whitespace_tokens(text))
            mv.tokens.push_back(is_placeholder(tok) ? tok : ascii_lower(tok));
        mv.normalized = join_tokens(mv.tokens);
        mv.tags = tagger.tag(mv.tokens);

        FeatureVector fv;
        for (const auto& cr : compiled_)
            if (cr.rule.kind != FeatureRuleKind::elaboration && detail::rule_matches(cr, mv))
                fv.set(cr.rule.feature);

        std::size_t word_count = 0; // placeholders are not words
        for (const auto& tok : mv.tokens)
            if (!is_placeholder(tok)) ++word_count;

        for (const auto& cr : compiled_) {
            if (cr.rule.kind != FeatureRuleKind::elaboration) continue;
            if (fv.get(cr.rule.feature)) continue;
            if (word_count < cr.min_tokens) continue;
            bool has_verb = false;
            for (PosTag t : mv.tags)
                if (t == PosTag::verb) { has_verb = true; break; }
            if (!has_verb) continue;
            if (excluded(mv)) continue;
            fv.set(cr.rule.feature);
        }
        return fv;
    }

    std::string serialize_tsv() const {
        std::ostringstream out;
        out << "# feature\tkind\tpattern\n";
        for (const auto& cr : compiled_)
            out << to_string(cr.rule.feature) << '\t' << to_string(cr.rule.kind) << '\t'
                << cr.rule.pattern << '\n';
        return out.str();
    }

    std::string fingerprint() const { return content_hash(serialize_tsv()); }

private:
    static std::string location(std::size_t lineno) {
        return lineno ? "line " + std::to_string(lineno) + ": " : "";
    }

    static std::size_t parse_min_tokens(const std::string& pattern, std::size_t lineno) {
        const std::string prefix = "min_tokens=";
        if (pattern.rfind(prefix, 0) != 0)
            throw parse_error(location(lineno) +
                              "elaboration pattern must be min_tokens=<N>, got '" + pattern + "'");
        std::size_t n = 0;
        const char* p = pattern.c_str() + prefix.size();
        if (*p == '\0') throw parse_error(location(lineno) + "min_tokens needs a value");
        for (; *p; ++p) {
            if (*p < '0' || *p > '9')
                throw parse_error(location(lineno) + "min_tokens must be an integer");
            n = n * 10 + static_cast<std::size_t>(*p - '0');
        }
        return n;
    }

    bool excluded(const detail::MessageView& mv) const {
        if (frozen_) {
            for (std::size_t i : exclusion_snapshot_)
                if (detail::rule_matches(compiled_[i], mv)) return true;
            return false;
        }
        for (const auto& cr : compiled_)
            if (cr.rule.kind != FeatureRuleKind::elaboration && detail::rule_matches(cr, mv))
                return true;
        return false;
    }

    std::vector<detail::CompiledRule> compiled_;
    std::vector<std::size_t> exclusion_snapshot_;
    bool frozen_ = false;
};

// Rule file: UTF-8 TSV, columns feature<TAB>kind<TAB>pattern[<TAB>priority],
// '#' comments.
inline FeaturePack parse_feature_rules_tsv(std::istream& in) {
    FeaturePack pack;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            cols.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (cols.size() < 3 || cols.size() > 4)
            throw parse_error("line " + std::to_string(lineno) +
                              ": expected feature<TAB>kind<TAB>pattern[<TAB>priority]");
        FeatureRule rule;
        try {
            rule.feature = feature_from_string(cols[0]);
            rule.kind = feature_rule_kind_from_string(cols[1]);
        } catch (const parse_error& e) {
            throw parse_error("line " + std::to_string(lineno) + ": " + e.what());
        }
        rule.pattern = cols[2];
        if (cols.size() == 4) {
            try {
                rule.priority = std::stoi(cols[3]);
            } catch (const std::exception&) {
                throw parse_error("line " + std::to_string(lineno) +
                                  ": priority must be an integer, got '" + cols[3] + "'");
            }
        }
        pack.add_rule(rule, lineno);
    }
    pack.freeze_exclusions();
    return pack;
}

inline FeaturePack load_feature_rules(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open feature rule file: " + path);
    try {
        return parse_feature_rules_tsv(in);
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

// Hand-audited defaults: every published example message trips exactly the
// feature of its own row, before or after text normalization.
inline const char* default_feature_rules_tsv() {
    return R"(# feature	kind	pattern
F_TIME	term	faster
F_TIME	term	hurry
F_TIME	term	quick
F_TIME	term	quickly
F_TIME	term	no time
F_TIME	term	time limit
F_TIME	term	running out of time
F_TIME	regex	[0-9]+ ?(min|mins|minutes|sec|secs|seconds|hour|hours|hr|hrs)\b
F_INSTRUCTION	term	see the
F_INSTRUCTION	term	look at
F_INSTRUCTION	term	check the
F_INSTRUCTION	term	click
F_INSTRUCTION	term	discuss
F_INSTRUCTION	term	let us
F_INSTRUCTION	term	lets
F_INSTRUCTION	pos_pattern	verb pronoun
F_PROGRESS	term	done
F_PROGRESS	term	completed
F_PROGRESS	term	complete
F_PROGRESS	term	finished
F_PROGRESS	term	finish
F_PROGRESS	term	submitted
F_ELABORATION	elaboration	min_tokens=4
F_GREETING	term	sup
F_GREETING	term	hello
F_GREETING	term	hi
F_GREETING	term	hey
F_GREETING	term	good morning
F_GREETING	term	good afternoon
F_GREETING	term	good evening
F_GREETING	term	greetings
F_POSEMO	term	lol
F_POSEMO	term	lmao
F_POSEMO	term	rofl
F_POSEMO	term	haha
F_POSEMO	term	hehe
F_POSEMO	term	just kidding
F_POSEMO	term	kidding
F_POSEMO	term	jk
F_POSEMO	regex	\{\{pos_emo\}\}
F_AGREEMENT	term	yes
F_AGREEMENT	term	yeah
F_AGREEMENT	term	yup
F_AGREEMENT	term	ok
F_AGREEMENT	term	okay
F_AGREEMENT	term	agree
F_AGREEMENT	term	agreed
F_AGREEMENT	term	sure
F_AGREEMENT	term	alright
)";
}

inline FeaturePack default_feature_pack() {
    std::istringstream in(default_feature_rules_tsv());
    return parse_feature_rules_tsv(in);
}

inline FeatureVector extract_features(std::string_view text, const FeaturePack& pack,
                                      const PosTagger& tagger) {
    return pack.extract(text, tagger);
}

// Appends one placeholder per set bit in canonical order. A placeholder
// already present as a token is not appended again, so re-featurizing an
// augmented text is a no-op.
inline std::string inject_features(std::string_view text, const FeatureVector& fv) {
    std::vector<std::string> existing = whitespace_tokens(text);
    std::string out(text);
    for (FeatureName f : kFeatureNames) {
        if (!fv.get(f)) continue;
        std::string token = feature_placeholder(f);
        bool present = false;
        for (const auto& t : existing)
            if (t == token) { present = true; break; }
        if (present) continue;
        if (!out.empty()) out += ' ';
        out += token;
    }
    return out;
}

inline Corpus featurize_corpus(const Corpus& corpus, const FeaturePack& pack,
                               const PosTagger& tagger) {
    Corpus out = corpus;
    for (auto& m : out.messages) {
        FeatureVector fv = pack.extract(m.text, tagger);
        m.feature_bits = fv.to_bitstring();
        m.text = inject_features(m.text, fv);
    }
    out.meta["featurized"] = "true";
    out.meta["feature_rules_fingerprint"] = pack.fingerprint();
    return out;
}

} // namespace teamdims

#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "teamdims/error.hpp"
#include "teamdims/text.hpp"

namespace teamdims {

// Coarse tag set used by pos_pattern feature rules. `mask` is internal: it
// marks {{...}} placeholder tokens and is not addressable from rule files,
// which is what keeps placeholders opaque to tag-sequence matching.
enum class PosTag : std::uint8_t {
    noun,
    verb,
    adjective,
    adverb,
    pronoun,
    interjection,
    number,
    other,
    mask,
};

inline std::string to_string(PosTag t) {
    switch (t) {
        case PosTag::noun: return "noun";
        case PosTag::verb: return "verb";
        case PosTag::adjective: return "adjective";
        case PosTag::adverb: return "adverb";
        case PosTag::pronoun: return "pronoun";
        case PosTag::interjection: return "interjection";
        case PosTag::number: return "number";
        case PosTag::other: return "other";
        case PosTag::mask: return "mask";
    }
    return "?";
}

// Public tag names accepted in rule files (mask excluded by design).
inline PosTag pos_tag_from_string(const std::string& s) {
    for (PosTag t : {PosTag::noun, PosTag::verb, PosTag::adjective, PosTag::adverb,
                     PosTag::pronoun, PosTag::interjection, PosTag::number, PosTag::other})
        if (to_string(t) == s) return t;
    throw parse_error("unknown part-of-speech tag: " + s);
}

// Contract: one tag per input token, deterministic.
class PosTagger {
public:
    virtual ~PosTagger() = default;
    virtual std::vector<PosTag> tag(const std::vector<std::string>& tokens) const = 0;
};

// Deterministic lexicon+suffix tagger. Closed-class words come from small
// built-in lists; open-class fallbacks use derivational suffixes; the final
// default is noun, the most common open class in chat about shared tasks.
class DefaultPosTagger final : public PosTagger {
public:
    DefaultPosTagger() {
        add(PosTag::pronoun,
            {"i", "me", "my", "mine", "you", "your", "yours", "u", "ur", "he", "him",
             "his", "she", "her", "hers", "it", "its", "we", "us", "our", "ours",
             "they", "them", "their", "theirs", "this", "that", "these", "those",
             "thats", "who", "whom", "what", "which", "anyone", "everyone", "someone",
             "something", "anything", "everything", "nothing", "myself", "yourself",
             "ourselves"});
        add(PosTag::verb,
            {"be", "am", "is", "are", "was", "were", "been", "being", "r", "do",
             "does", "did", "dont", "doesnt", "didnt", "have", "has", "had", "havent",
             "hasnt", "can", "could", "cant", "cannot", "will", "would", "wont",
             "shall", "should", "shouldnt", "may", "might", "must", "go", "goes",
             "went", "gone", "get", "gets", "got", "make", "makes", "made", "see",
             "saw", "seen", "look", "check", "click", "send", "sent", "discuss",
             "think", "thought", "know", "knew", "need", "needs", "want", "wants",
             "try", "use", "help", "work", "works", "finish", "complete", "done",
             "left", "reduce", "say", "said", "says", "tell", "told", "ask", "put",
             "let", "add", "write", "wrote", "read", "find", "found", "give", "gave",
             "take", "took", "come", "came", "start", "stop", "hurry", "wait",
             "agree", "feel", "felt", "mean", "means", "submit", "type", "move",
             "choose", "chose", "keep", "kept"});
        add(PosTag::adjective,
            {"good", "nice", "great", "best", "better", "bad", "worse", "worst",
             "possible", "impossible", "difficult", "easy", "hard", "similar",
             "different", "wrong", "correct", "kind", "happy", "sad", "sure",
             "ready", "free", "busy", "boring", "embarrassed", "afraid", "new",
             "old", "big", "small", "last", "next", "same", "whole", "other"});
        add(PosTag::adverb,
            {"not", "now", "very", "really", "just", "too", "also", "here", "there",
             "still", "already", "faster", "fast", "soon", "never", "always",
             "maybe", "perhaps", "again", "only", "even", "later", "together",
             "almost", "away", "back", "instead", "anyway", "please"});
        add(PosTag::interjection,
            {"yes", "yeah", "yup", "yo", "ok", "okay", "oh", "wow", "hey", "hi",
             "hello", "sup", "lol", "haha", "hehe", "lah", "leh", "lor", "meh",
             "sia", "hmm", "huh", "ah", "eh", "oops", "yay", "no", "nope", "wah",
             "aiyo", "bye", "thanks", "sorry"});
        add(PosTag::noun,
            {"morning", "afternoon", "evening", "time", "team", "task", "url",
             "link", "question", "answer", "idea", "plan", "min", "mins", "minute",
             "minutes", "guys", "everybody", "thing", "things", "way", "part",
             "page", "thinking", "meeting"});
        add(PosTag::other,
            {"the", "a", "an", "of", "to", "in", "on", "at", "for", "with", "and",
             "or", "but", "if", "so", "because", "like", "about", "from", "as",
             "than", "then", "when", "where", "how", "why", "all", "some", "any",
             "each", "both", "more", "most", "much", "many"});
    }

    std::vector<PosTag> tag(const std::vector<std::string>& tokens) const override {
        std::vector<PosTag> tags;
        tags.reserve(tokens.size());
        for (const auto& token : tokens) tags.push_back(tag_one(token));
        return tags;
    }

    PosTag tag_one(std::string_view token) const {
        if (is_placeholder(token)) return PosTag::mask;
        std::string w = ascii_lower(token);
        if (w.empty()) return PosTag::other;
        if (is_number_token(w)) return PosTag::number;
        if (auto it = lexicon_.find(w); it != lexicon_.end()) return it->second;
        if (is_punct_only(w)) return PosTag::other;
        return suffix_tag(w);
    }

private:
    void add(PosTag tag, std::initializer_list<const char*> words) {
        for (const char* w : words) lexicon_.emplace(w, tag);
    }

    static bool is_number_token(std::string_view w) {
        bool digit = false;
        for (std::size_t i = 0; i < w.size(); ++i) {
            char c = w[i];
            if (c >= '0' && c <= '9') { digit = true; continue; }
            if ((c == '.' || c == ',') && i > 0 && i + 1 < w.size()) continue;
            return false;
        }
        return digit;
    }

    static bool ends_with(std::string_view w, std::string_view suffix) {
        return w.size() > suffix.size() &&
               w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
    }

    static PosTag suffix_tag(std::string_view w) {
        if (ends_with(w, "ing") || ends_with(w, "ed")) return PosTag::verb;
        if (ends_with(w, "ly")) return PosTag::adverb;
        for (const char* s : {"tion", "sion", "ment", "ness", "ity"})
            if (ends_with(w, s)) return PosTag::noun;
        for (const char* s : {"ous", "ful", "ive", "able", "ible"})
            if (ends_with(w, s)) return PosTag::adjective;
        return PosTag::noun;
    }

    std::unordered_map<std::string, PosTag> lexicon_;
};

inline const DefaultPosTagger& default_pos_tagger() {
    static const DefaultPosTagger tagger;
    return tagger;
}

} // namespace teamdims

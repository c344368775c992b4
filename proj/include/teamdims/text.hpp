#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace teamdims {

// {{placeholder}} tokens are opaque: once emitted by a rewrite rule (or
// present in the input) they are never split, lowercased or matched again.
inline bool is_placeholder(std::string_view token) {
    if (token.size() < 5) return false;
    if (token.substr(0, 2) != "{{" || token.substr(token.size() - 2) != "}}") return false;
    for (char c : token.substr(2, token.size() - 4))
        if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

// Word characters for chat tokenization. Apostrophes and underscores stay
// inside tokens; bytes >= 0x80 are treated as letters so UTF-8 sequences are
// never split.
inline bool is_word_char(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u) || c == '_' || c == '\'';
}

inline bool is_punct_only(std::string_view token) {
    for (char c : token)
        if (is_word_char(c)) return false;
    return !token.empty();
}

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (static_cast<unsigned char>(c) < 0x80)
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Maximal same-character runs of a punctuation-only token: "?!!" -> "?", "!!".
inline std::vector<std::string> same_char_runs(std::string_view token) {
    std::vector<std::string> runs;
    std::size_t i = 0;
    while (i < token.size()) {
        std::size_t j = i;
        while (j < token.size() && token[j] == token[i]) ++j;
        runs.emplace_back(token.substr(i, j - i));
        i = j;
    }
    return runs;
}

// Whitespace split with leading/trailing punctuation separated into its own
// tokens, so "token boundary" is well defined for textese. Placeholders are
// atomic. `atomic_forms` (lowercased surface forms, e.g. emoticons like ":)"
// or "^_^") are kept whole even when they mix word and punctuation chars.
inline std::vector<std::string> chat_tokens(
    std::string_view text, const std::unordered_set<std::string>* atomic_forms = nullptr) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    auto is_space = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    };
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        if (i >= text.size()) break;
        std::size_t j = i;
        while (j < text.size() && !is_space(text[j])) ++j;
        std::string_view chunk = text.substr(i, j - i);
        i = j;

        if (is_placeholder(chunk) ||
            (atomic_forms && atomic_forms->count(ascii_lower(chunk)) > 0)) {
            tokens.emplace_back(chunk);
            continue;
        }
        std::size_t begin = 0, end = chunk.size();
        while (begin < end && !is_word_char(chunk[begin])) ++begin;
        while (end > begin && !is_word_char(chunk[end - 1])) --end;
        if (begin == end) { // punctuation only
            tokens.emplace_back(chunk);
            continue;
        }
        if (begin > 0) tokens.emplace_back(chunk.substr(0, begin));
        tokens.emplace_back(chunk.substr(begin, end - begin));
        if (end < chunk.size()) tokens.emplace_back(chunk.substr(end));
    }
    return tokens;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

// Plain whitespace tokens; the vectorizer-facing notion of a token.
inline std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) tokens.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return tokens;
}

} // namespace teamdims

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "teamdims/error.hpp"
#include "teamdims/fs.hpp"
#include "teamdims/text.hpp"

namespace teamdims {

// Greedy longest-match-first subword tokenizer. The base vocabulary covers
// every printable ASCII character (plus its "##" continuation form), so any
// ASCII word can always be spelled out; [UNK] appears only for words with
// bytes outside that range. Corpus words are added whole, most frequent
// first, which keeps common chat tokens as single pieces.
class WordPieceTokenizer {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kCls = 2;
    static constexpr int kSep = 3;
    static constexpr int kMask = 4;

    WordPieceTokenizer() = default;

    static WordPieceTokenizer fit(const std::vector<std::string>& texts,
                                  std::size_t max_vocab = 4096, std::size_t min_freq = 1) {
        WordPieceTokenizer tok = base();
        std::map<std::string, std::size_t> freq; // ordered map: deterministic ties
        for (const auto& text : texts)
            for (const auto& word : whitespace_tokens(text)) ++freq[word];

        std::vector<std::pair<std::string, std::size_t>> words(freq.begin(), freq.end());
        std::stable_sort(words.begin(), words.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        for (const auto& [word, count] : words) {
            if (tok.vocab_.size() >= max_vocab) break;
            if (count < min_freq) continue;
            if (word.size() < 2) continue; // single chars are in the base vocab
            tok.add(word);
        }
        return tok;
    }

    // Pieces for one whitespace-delimited word; {"[UNK]"} when any position
    // fails to match (non-ASCII bytes).
    std::vector<std::string> pieces(std::string_view word) const {
        std::vector<std::string> out;
        std::size_t at = 0;
        while (at < word.size()) {
            std::size_t best_len = 0;
            std::string best;
            std::string candidate = at == 0 ? "" : "##";
            for (std::size_t len = 1; len <= word.size() - at; ++len) {
                candidate.resize(at == 0 ? 0 : 2);
                candidate.append(word.substr(at, len));
                if (index_.count(candidate)) {
                    best_len = len;
                    best = candidate;
                }
            }
            if (best_len == 0) return {"[UNK]"};
            out.push_back(std::move(best));
            at += best_len;
        }
        return out;
    }

    // [CLS] + pieces + [SEP]; truncation keeps the leading pieces so the
    // result is exactly min(2 + n_pieces, max_len) ids.
    std::vector<int> encode(std::string_view text, std::size_t max_len) const {
        if (max_len < 2) throw validation_error("encode: max_len must be >= 2");
        std::vector<int> ids = {kCls};
        for (const auto& word : whitespace_tokens(text)) {
            for (const auto& piece : pieces(word)) {
                if (ids.size() == max_len - 1) break;
                ids.push_back(index_.at(piece));
            }
            if (ids.size() == max_len - 1) break;
        }
        ids.push_back(kSep);
        return ids;
    }

    std::size_t vocab_size() const { return vocab_.size(); }
    const std::vector<std::string>& vocabulary() const { return vocab_; }

    int id_of(const std::string& piece) const {
        auto it = index_.find(piece);
        return it == index_.end() ? kUnk : it->second;
    }

    void save(const std::filesystem::path& path) const {
        std::string out;
        for (const auto& piece : vocab_) {
            out += piece;
            out += '\n';
        }
        write_text_file(path, out);
    }

    static WordPieceTokenizer load(const std::filesystem::path& path) {
        WordPieceTokenizer tok;
        std::string content = read_text_file(path);
        std::size_t start = 0;
        while (start < content.size()) {
            std::size_t end = content.find('\n', start);
            if (end == std::string::npos) end = content.size();
            std::string line = content.substr(start, end - start);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) tok.add(line);
            start = end + 1;
        }
        if (tok.vocab_.size() < 5 || tok.vocab_[0] != "[PAD]" || tok.vocab_[1] != "[UNK]" ||
            tok.vocab_[2] != "[CLS]" || tok.vocab_[3] != "[SEP]" || tok.vocab_[4] != "[MASK]")
            throw parse_error("vocab file " + path.string() +
                              ": first five entries must be [PAD] [UNK] [CLS] [SEP] [MASK]");
        return tok;
    }

private:
    static WordPieceTokenizer base() {
        WordPieceTokenizer tok;
        for (const char* special : {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"})
            tok.add(special);
        for (char c = '!'; c <= '~'; ++c) tok.add(std::string(1, c));
        for (char c = '!'; c <= '~'; ++c) tok.add("##" + std::string(1, c));
        return tok;
    }

    void add(const std::string& piece) {
        if (index_.count(piece)) return;
        index_[piece] = static_cast<int>(vocab_.size());
        vocab_.push_back(piece);
    }

    std::vector<std::string> vocab_;
    std::unordered_map<std::string, int> index_;
};

} // namespace teamdims

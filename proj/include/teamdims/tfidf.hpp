#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "teamdims/corpus.hpp"
#include "teamdims/error.hpp"
#include "teamdims/text.hpp"

namespace teamdims {

// Sparse row: (column, weight) pairs sorted by column.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

// Pinned variant: whitespace tokens, raw counts, idf(t) = ln((1+N)/(1+df)) + 1,
// rows L2-normalized. Vocabulary indices are assigned in lexicographic token
// order so the matrix layout is reproducible across implementations.
class TfidfModel {
public:
    TfidfModel() = default;

    static TfidfModel fit(const Corpus& corpus) {
        if (corpus.empty()) throw validation_error("fit_tfidf: empty corpus");
        TfidfModel model;
        model.doc_count_ = corpus.size();
        std::map<std::string, std::size_t> df; // ordered: gives sorted vocab for free
        for (const auto& m : corpus.messages) {
            auto tokens = whitespace_tokens(m.text);
            std::sort(tokens.begin(), tokens.end());
            tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
            for (const auto& t : tokens) ++df[t];
        }
        model.vocab_.reserve(df.size());
        model.idf_.reserve(df.size());
        double n = static_cast<double>(model.doc_count_);
        for (const auto& [token, count] : df) {
            model.index_[token] = model.vocab_.size();
            model.vocab_.push_back(token);
            model.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
        }
        return model;
    }

    // L2-normalized tf·idf; out-of-vocabulary tokens contribute nothing. A
    // document sharing no token with the vocabulary yields the zero vector.
    SparseVector transform(std::string_view text) const {
        std::map<std::size_t, double> counts;
        for (const auto& token : whitespace_tokens(text)) {
            auto it = index_.find(token);
            if (it != index_.end()) counts[it->second] += 1.0;
        }
        SparseVector row;
        row.reserve(counts.size());
        double norm_sq = 0.0;
        for (const auto& [col, tf] : counts) {
            double w = tf * idf_[col];
            row.emplace_back(col, w);
            norm_sq += w * w;
        }
        if (norm_sq > 0.0) {
            double inv = 1.0 / std::sqrt(norm_sq);
            for (auto& [col, w] : row) w *= inv;
        }
        return row;
    }

    std::vector<SparseVector> transform_corpus(const Corpus& corpus) const {
        std::vector<SparseVector> rows;
        rows.reserve(corpus.size());
        for (const auto& m : corpus.messages) rows.push_back(transform(m.text));
        return rows;
    }

    std::size_t vocab_size() const { return vocab_.size(); }
    std::size_t doc_count() const { return doc_count_; }
    const std::vector<std::string>& vocabulary() const { return vocab_; }
    const std::vector<double>& idf() const { return idf_; }

    nlohmann::json to_json() const {
        return {{"vocabulary", vocab_}, {"idf", idf_}, {"doc_count", doc_count_}};
    }

    static TfidfModel from_json(const nlohmann::json& obj) {
        TfidfModel model;
        model.vocab_ = obj.at("vocabulary").get<std::vector<std::string>>();
        model.idf_ = obj.at("idf").get<std::vector<double>>();
        model.doc_count_ = obj.at("doc_count").get<std::size_t>();
        if (model.vocab_.size() != model.idf_.size())
            throw parse_error("tfidf model: vocabulary/idf length mismatch");
        for (std::size_t i = 0; i < model.vocab_.size(); ++i)
            model.index_[model.vocab_[i]] = i;
        if (model.index_.size() != model.vocab_.size())
            throw parse_error("tfidf model: duplicate vocabulary entries");
        return model;
    }

private:
    std::vector<std::string> vocab_;
    std::vector<double> idf_;
    std::map<std::string, std::size_t> index_;
    std::size_t doc_count_ = 0;
};

inline TfidfModel fit_tfidf(const Corpus& corpus) { return TfidfModel::fit(corpus); }

} // namespace teamdims

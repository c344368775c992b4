#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "teamdims/corpus.hpp"
#include "teamdims/csv.hpp"
#include "teamdims/error.hpp"

namespace teamdims {

enum class CorpusFormat { jsonl, csv };

inline CorpusFormat corpus_format_from_path(const std::string& path) {
    auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".csv") return CorpusFormat::csv;
    return CorpusFormat::jsonl;
}

namespace detail {

inline std::string meta_sidecar_path(const std::string& path) {
    return path + ".meta.json";
}

inline std::uint8_t parse_label_bit(const nlohmann::json& v, std::size_t line,
                                    std::string_view key) {
    if (v.is_number_integer()) {
        auto n = v.get<long long>();
        if (n == 0 || n == 1) return static_cast<std::uint8_t>(n);
    }
    throw parse_error("line " + std::to_string(line) + ": label " + std::string(key) +
                      " must be 0 or 1");
}

inline LabelVector parse_label_object(const nlohmann::json& obj, std::size_t line) {
    if (!obj.is_object())
        throw parse_error("line " + std::to_string(line) + ": labels must be an object");
    LabelVector v;
    for (Dimension d : kDimensions) {
        std::string key(to_string(d));
        if (!obj.contains(key))
            throw parse_error("line " + std::to_string(line) + ": labels missing key " + key);
        v[d] = parse_label_bit(obj.at(key), line, key);
    }
    return v;
}

inline nlohmann::json label_object(const LabelVector& v) {
    nlohmann::json obj = nlohmann::json::object();
    for (Dimension d : kDimensions) obj[std::string(to_string(d))] = static_cast<int>(v[d]);
    return obj;
}

inline Corpus load_jsonl(std::istream& in) {
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw parse_error("line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
        }
        AnnotatedMessage m;
        for (const char* key : {"id", "team_id", "user", "text"})
            if (!obj.contains(key))
                throw parse_error("line " + std::to_string(lineno) + ": missing key " + key);
        m.id = obj.at("id").get<std::string>();
        m.team_id = obj.at("team_id").get<std::string>();
        m.user = obj.at("user").get<std::string>();
        m.text = obj.at("text").get<std::string>();
        if (!obj.contains("labels"))
            throw parse_error("line " + std::to_string(lineno) + ": missing key labels");
        m.labels = parse_label_object(obj.at("labels"), lineno);
        if (obj.contains("labels_b")) m.labels_b = parse_label_object(obj.at("labels_b"), lineno);
        if (obj.contains("features")) m.feature_bits = obj.at("features").get<std::string>();
        corpus.messages.push_back(std::move(m));
    }
    return corpus;
}

inline void save_jsonl(const Corpus& corpus, std::ostream& out) {
    for (const auto& m : corpus.messages) {
        nlohmann::json obj;
        obj["id"] = m.id;
        obj["team_id"] = m.team_id;
        obj["user"] = m.user;
        obj["text"] = m.text;
        obj["labels"] = label_object(m.labels);
        if (m.labels_b) obj["labels_b"] = label_object(*m.labels_b);
        if (m.feature_bits) obj["features"] = *m.feature_bits;
        out << obj.dump() << '\n';
    }
}

inline std::uint8_t parse_csv_bit(const std::string& field, std::size_t line,
                                  const std::string& column) {
    if (field == "0") return 0;
    if (field == "1") return 1;
    throw parse_error("line " + std::to_string(line) + ": column " + column +
                      ": label must be 0 or 1, got '" + field + "'");
}

inline Corpus load_csv(std::istream& in) {
    Corpus corpus;
    CsvReader reader(in);
    std::vector<std::string> header;
    if (!reader.next(header)) return corpus; // empty file, empty corpus

    auto lower = [](std::string s) {
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    std::map<std::string, std::size_t> cols;
    for (std::size_t i = 0; i < header.size(); ++i) cols[lower(header[i])] = i;
    auto col = [&](std::initializer_list<const char*> names) -> long {
        for (const char* n : names) {
            auto it = cols.find(n);
            if (it != cols.end()) return static_cast<long>(it->second);
        }
        return -1;
    };

    // Full layout is id,team_id,user,text,COD..TES[,COD_b..TES_b][,features].
    // The minimal annotated-table layout (user,message,COD..TES) is also
    // accepted; ids are synthesized for it.
    long c_user = col({"user"});
    long c_text = col({"text", "message"});
    std::array<long, 4> c_dim{}, c_dim_b{};
    for (std::size_t i = 0; i < 4; ++i) {
        std::string name = lower(std::string(to_string(kDimensions[i])));
        c_dim[i] = col({name.c_str()});
        std::string name_b = name + "_b";
        c_dim_b[i] = col({name_b.c_str()});
    }
    if (c_user < 0) throw parse_error("CSV header: missing required column user");
    if (c_text < 0) throw parse_error("CSV header: missing required column text");
    for (std::size_t i = 0; i < 4; ++i)
        if (c_dim[i] < 0)
            throw parse_error("CSV header: missing required column " +
                              std::string(to_string(kDimensions[i])));
    long c_id = col({"id"});
    long c_team = col({"team_id"});
    long c_feat = col({"features"});
    bool has_b = c_dim_b[0] >= 0 && c_dim_b[1] >= 0 && c_dim_b[2] >= 0 && c_dim_b[3] >= 0;

    std::vector<std::string> row;
    std::size_t record = 0;
    while (reader.next(row)) {
        ++record;
        std::size_t line = reader.line();
        auto field = [&](long c) -> const std::string& {
            static const std::string empty;
            if (c < 0 || static_cast<std::size_t>(c) >= row.size()) return empty;
            return row[static_cast<std::size_t>(c)];
        };
        if (row.size() <= static_cast<std::size_t>(c_text))
            throw parse_error("line " + std::to_string(line) + ": too few columns");
        AnnotatedMessage m;
        m.id = c_id >= 0 ? field(c_id) : "row" + std::to_string(record);
        m.team_id = field(c_team);
        m.user = field(c_user);
        m.text = field(c_text);
        for (std::size_t i = 0; i < 4; ++i)
            m.labels.bits[i] =
                parse_csv_bit(field(c_dim[i]), line, std::string(to_string(kDimensions[i])));
        if (has_b) {
            LabelVector b;
            for (std::size_t i = 0; i < 4; ++i)
                b.bits[i] = parse_csv_bit(field(c_dim_b[i]), line,
                                          std::string(to_string(kDimensions[i])) + "_b");
            m.labels_b = b;
        }
        if (c_feat >= 0 && !field(c_feat).empty()) m.feature_bits = field(c_feat);
        corpus.messages.push_back(std::move(m));
    }
    return corpus;
}

inline void save_csv(const Corpus& corpus, std::ostream& out) {
    bool any_b = false, any_feat = false;
    for (const auto& m : corpus.messages) {
        any_b = any_b || m.labels_b.has_value();
        any_feat = any_feat || m.feature_bits.has_value();
    }
    std::vector<std::string> header = {"id", "team_id", "user", "text"};
    for (Dimension d : kDimensions) header.emplace_back(to_string(d));
    if (any_b)
        for (Dimension d : kDimensions) header.emplace_back(std::string(to_string(d)) + "_b");
    if (any_feat) header.emplace_back("features");
    write_csv_row(out, header);

    for (const auto& m : corpus.messages) {
        std::vector<std::string> row = {m.id, m.team_id, m.user, m.text};
        for (std::size_t i = 0; i < 4; ++i) row.emplace_back(m.labels.bits[i] ? "1" : "0");
        if (any_b) {
            LabelVector b = m.labels_b.value_or(LabelVector{});
            for (std::size_t i = 0; i < 4; ++i) row.emplace_back(b.bits[i] ? "1" : "0");
        }
        if (any_feat) row.emplace_back(m.feature_bits.value_or(""));
        write_csv_row(out, row);
    }
}

} // namespace detail

inline Corpus load_corpus_stream(std::istream& in, CorpusFormat format) {
    Corpus corpus =
        format == CorpusFormat::jsonl ? detail::load_jsonl(in) : detail::load_csv(in);
    validate_corpus(corpus);
    return corpus;
}

// Corpus meta travels in a `<path>.meta.json` sidecar: the record formats
// themselves are pinned to message fields only, but preprocessing and
// featurization fingerprints have to survive the trip between pipeline
// stages.
inline Corpus load_corpus(const std::string& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open corpus file: " + path);
    Corpus corpus = load_corpus_stream(in, format);
    std::ifstream meta_in(detail::meta_sidecar_path(path), std::ios::binary);
    if (meta_in) {
        try {
            nlohmann::json obj = nlohmann::json::parse(meta_in);
            for (auto& [k, v] : obj.items()) corpus.meta[k] = v.get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(detail::meta_sidecar_path(path) + ": " + e.what());
        }
    }
    return corpus;
}

inline Corpus load_corpus(const std::string& path) {
    return load_corpus(path, corpus_format_from_path(path));
}

inline void save_corpus(const Corpus& corpus, const std::string& path, CorpusFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open corpus file for writing: " + path);
    if (format == CorpusFormat::jsonl) detail::save_jsonl(corpus, out);
    else detail::save_csv(corpus, out);
    if (!out) throw io_error("write failure on " + path);
    if (!corpus.meta.empty()) {
        nlohmann::json obj(corpus.meta);
        std::ofstream meta_out(detail::meta_sidecar_path(path), std::ios::binary);
        if (!meta_out) throw io_error("cannot write " + detail::meta_sidecar_path(path));
        meta_out << obj.dump(2) << '\n';
    }
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
    save_corpus(corpus, path, corpus_format_from_path(path));
}

} // namespace teamdims

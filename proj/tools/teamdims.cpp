// teamdims: classify chat messages into four teamwork dimensions.
//
// Subcommands cover the whole workflow: synthesize a corpus, normalize and
// featurize its text, split it, train either model family, then evaluate,
// compare or predict from the saved artifacts. Mutating commands write a
// provenance manifest next to (or inside) whatever they produce and never
// modify their inputs.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "teamdims/teamdims.hpp"

using namespace teamdims;
namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
    bool quiet = false;
    bool verbose = false;
    bool json = false;
};

void note(const GlobalOpts& g, const std::string& line) {
    if (!g.quiet) std::cerr << line << '\n';
}

void detail_note(const GlobalOpts& g, const std::string& line) {
    if (g.verbose && !g.quiet) std::cerr << line << '\n';
}

std::size_t parse_count(const std::string& text, const std::string& what) {
    try {
        if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
        std::size_t pos = 0;
        unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing junk");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw validation_error("bad " + what + " '" + text + "': expected a non-negative integer");
    }
}

double parse_ratio(const std::string& text) {
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw validation_error("bad ratio '" + text + "'");
    }
}

std::vector<std::string> split_on_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

// "COD=50,MPM=50,CCF=50,TES=50,NONE=50"; unnamed keys default to zero.
void apply_synth_spec(SynthSpec& spec, const std::string& text) {
    for (const std::string& item : split_on_commas(text)) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw validation_error("synth spec entry '" + item + "' is not KEY=COUNT");
        std::string key = item.substr(0, eq);
        std::size_t n = parse_count(item.substr(eq + 1), "count for " + key);
        if (key == "NONE") {
            spec.none_count = n;
        } else {
            Dimension d = dimension_from_string(key); // throws on unknown keys
            spec.counts[static_cast<std::size_t>(d)] = n;
        }
    }
}

void add_corpus_input(RunManifest& m, const std::string& path) {
    m.add_input(path);
    std::string sidecar = path + ".meta.json";
    if (fs::exists(sidecar)) m.add_input(sidecar);
}

void add_corpus_output(RunManifest& m, const std::string& path) {
    m.add_output(path);
    std::string sidecar = path + ".meta.json";
    if (fs::exists(sidecar)) m.add_output(sidecar);
}

Lexicon build_lexicon(const std::string& lexicon_path, const std::string& roster_path) {
    Lexicon lex = lexicon_path.empty() ? default_lexicon() : load_lexicon(lexicon_path);
    if (!roster_path.empty()) load_roster_file(lex, roster_path);
    return lex;
}

FeaturePack build_feature_pack(const std::string& rules_path) {
    return rules_path.empty() ? default_feature_pack() : load_feature_rules(rules_path);
}

std::string render_metrics(const MetricsReport& r) {
    char buf[128];
    std::string out;
    std::snprintf(buf, sizeof buf, "macro_precision %.4f\nmacro_recall    %.4f\n", r.macro_precision,
                  r.macro_recall);
    out += buf;
    std::snprintf(buf, sizeof buf, "macro_f1        %.4f\nhamming_loss    %.4f\n", r.macro_f1,
                  r.hamming_loss);
    out += buf;
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
        const auto& m = r.per_dimension[d];
        std::snprintf(buf, sizeof buf, "%s  precision %.4f  recall %.4f  f1 %.4f%s\n",
                      std::string(to_string(kDimensions[d])).c_str(), m.precision, m.recall, m.f1,
                      m.degenerate ? "  (degenerate)" : "");
        out += buf;
    }
    return out;
}

std::vector<LabelVector> gold_labels(const Corpus& corpus) {
    std::vector<LabelVector> out;
    out.reserve(corpus.size());
    for (const auto& m : corpus.messages) out.push_back(m.labels);
    return out;
}

std::vector<LabelVector> predict_with_artifact(ModelKind kind, const std::string& dir,
                                               const Corpus& prepared) {
    if (kind == ModelKind::rf) return BaselineModel::load(dir).predict_corpus(prepared);
    return TransformerModel::load(dir).predict_corpus(prepared);
}

// ---- synth ----------------------------------------------------------------

struct SynthOpts {
    std::string spec = "COD=50,MPM=50,CCF=50,TES=50,NONE=50";
    std::uint64_t seed = 0;
    std::size_t team_size = 25;
    double flip = 0.0;
    std::string out;
    std::string roster_out;
};

void run_synth(const SynthOpts& o, const GlobalOpts& g) {
    SynthSpec spec;
    spec.seed = o.seed;
    spec.team_size = o.team_size;
    apply_synth_spec(spec, o.spec);
    if (o.flip < 0.0 || o.flip > 1.0)
        throw validation_error("--flip must be a probability in [0, 1]");

    Corpus corpus = generate_synthetic_corpus(spec);
    if (o.flip > 0.0)
        corpus = with_flipped_annotator(corpus, o.flip, substream_seed(o.seed, 13));
    save_corpus(corpus, o.out);

    std::vector<std::string> outputs = {o.out};
    if (!o.roster_out.empty()) {
        std::string lines;
        for (const auto& name : synth_roster()) lines += name + '\n';
        write_text_file(o.roster_out, lines);
        outputs.push_back(o.roster_out);
    }

    RunManifest m;
    m.command = "synth";
    m.set_config(
        {{"spec", o.spec}, {"seed", o.seed}, {"team_size", o.team_size}, {"flip", o.flip}});
    for (const auto& path : outputs) add_corpus_output(m, path);
    m.write(manifest_path_for(o.out, false));

    note(g, "synth: wrote " + std::to_string(corpus.size()) + " messages to " + o.out);
}

// ---- preprocess -----------------------------------------------------------

struct PreprocessOpts {
    std::string in, out, lexicon, roster;
};

void run_preprocess(const PreprocessOpts& o, const GlobalOpts& g) {
    Corpus corpus = load_corpus(o.in);
    Lexicon lex = build_lexicon(o.lexicon, o.roster);

    auto stamped = corpus.meta.find("lexicon_fingerprint");
    if (stamped != corpus.meta.end() && stamped->second != lex.fingerprint())
        throw validation_error(o.in + " was already normalized with a different lexicon");

    Corpus out = preprocess_corpus(corpus, lex);
    save_corpus(out, o.out);

    RunManifest m;
    m.command = "preprocess";
    m.set_config({{"lexicon", o.lexicon}, {"roster", o.roster},
                  {"lexicon_fingerprint", lex.fingerprint()}});
    add_corpus_input(m, o.in);
    if (!o.lexicon.empty()) m.add_input(o.lexicon);
    if (!o.roster.empty()) m.add_input(o.roster);
    add_corpus_output(m, o.out);
    m.write(manifest_path_for(o.out, false));

    note(g, "preprocess: wrote " + std::to_string(out.size()) + " messages to " + o.out);
}

// ---- featurize ------------------------------------------------------------

struct FeaturizeOpts {
    std::string in, out, rules;
};

void run_featurize(const FeaturizeOpts& o, const GlobalOpts& g) {
    Corpus corpus = load_corpus(o.in);
    auto pre = corpus.meta.find("preprocessed");
    if (pre == corpus.meta.end() || pre->second != "true")
        throw validation_error(o.in + " is not normalized; run preprocess first");

    FeaturePack pack = build_feature_pack(o.rules);
    auto stamped = corpus.meta.find("feature_rules_fingerprint");
    if (stamped != corpus.meta.end() && stamped->second != pack.fingerprint())
        throw validation_error(o.in + " was already featurized with a different rule pack");

    Corpus out = featurize_corpus(corpus, pack, default_pos_tagger());
    save_corpus(out, o.out);

    RunManifest m;
    m.command = "featurize";
    m.set_config({{"rules", o.rules}, {"feature_rules_fingerprint", pack.fingerprint()}});
    add_corpus_input(m, o.in);
    if (!o.rules.empty()) m.add_input(o.rules);
    add_corpus_output(m, o.out);
    m.write(manifest_path_for(o.out, false));

    note(g, "featurize: wrote " + std::to_string(out.size()) + " messages to " + o.out);
}

// ---- split ----------------------------------------------------------------

struct SplitOpts {
    std::string in;
    std::uint64_t seed = 0;
    std::string unit = "message";
    std::string ratios = "0.6,0.2,0.2";
    std::string out_dir;
};

void run_split(const SplitOpts& o, const GlobalOpts& g) {
    Corpus corpus = load_corpus(o.in);

    SplitSpec spec;
    spec.seed = o.seed;
    spec.unit = o.unit == "team" ? SplitUnit::team : SplitUnit::message;
    std::vector<std::string> parts = split_on_commas(o.ratios);
    if (parts.size() != 3)
        throw validation_error("expected three comma-separated ratios, got '" + o.ratios + "'");
    for (std::size_t i = 0; i < 3; ++i) spec.ratios[i] = parse_ratio(parts[i]);
    spec.validate();

    SplitResult result = split_corpus(corpus, spec);

    fs::path in_path(o.in);
    fs::path dir = o.out_dir.empty()
                       ? (in_path.has_parent_path() ? in_path.parent_path() : fs::path("."))
                       : fs::path(o.out_dir);
    if (!o.out_dir.empty()) fs::create_directories(dir);
    std::string stem = in_path.stem().string();
    std::string ext = in_path.extension().string();

    struct Part {
        const char* tag;
        const Corpus* corpus;
        std::string path;
    };
    std::array<Part, 3> outs = {Part{"train", &result.train, {}}, Part{"val", &result.val, {}},
                                Part{"test", &result.test, {}}};
    for (auto& p : outs) {
        p.path = (dir / (stem + "_" + p.tag + ext)).string();
        save_corpus(*p.corpus, p.path);
    }

    RunManifest m;
    m.command = "split";
    m.set_config({{"seed", o.seed}, {"unit", o.unit}, {"ratios", o.ratios}});
    add_corpus_input(m, o.in);
    for (const auto& p : outs) add_corpus_output(m, p.path);
    for (const auto& p : outs) m.write(manifest_path_for(p.path, false));

    note(g, "split: " + std::to_string(result.train.size()) + "/" +
                std::to_string(result.val.size()) + "/" + std::to_string(result.test.size()) +
                " messages into " + dir.string());
}

// ---- train ----------------------------------------------------------------

struct TrainOpts {
    std::string model; // rf | transformer
    std::string in, val, out;
    std::string features = "off";
    std::uint64_t seed = 0;
    double threshold = 0.5;
    std::string lexicon, roster, rules;
    // rf
    std::size_t trees = 100, depth = 0, min_leaf = 1;
    // transformer
    std::string encoder = "mini-cased";
    std::size_t epochs = 30, batch = 8, patience = 5, vocab_budget = 4096;
    double lr = 2e-3, warmup = 1.0 / 3.0;
    std::string schedule = "linear_decay";
};

void run_train(const TrainOpts& o, const GlobalOpts& g) {
    bool features_on = o.features == "on";
    TextPipeline pipeline(build_lexicon(o.lexicon, o.roster), build_feature_pack(o.rules),
                          features_on);

    Corpus train = pipeline.prepare(load_corpus(o.in));
    Corpus val;
    bool have_val = !o.val.empty();
    if (have_val) val = pipeline.prepare(load_corpus(o.val));

    DirLock lock(o.out);
    PipelineFingerprint fp = pipeline.fingerprint();
    nlohmann::json config = {{"model", o.model},       {"features", o.features},
                             {"seed", o.seed},         {"threshold", o.threshold},
                             {"lexicon", o.lexicon},   {"roster", o.roster},
                             {"rules", o.rules}};

    if (o.model == "rf") {
        BaselineConfig cfg;
        cfg.n_trees = o.trees;
        cfg.max_depth = o.depth;
        cfg.min_leaf = o.min_leaf;
        cfg.seed = o.seed;
        cfg.threshold = o.threshold;
        config.update({{"trees", o.trees}, {"depth", o.depth}, {"min_leaf", o.min_leaf}});

        BaselineModel model = BaselineModel::train(train, cfg, fp);
        model.save(o.out);
        if (have_val) {
            MetricsReport r = evaluate(model.predict_corpus(val), gold_labels(val));
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.4f", r.macro_f1);
            note(g, "train: rf val macro_f1 " + std::string(buf));
        }
    } else {
        if (!have_val) throw validation_error("transformer training requires --val");
        TrainConfig cfg;
        cfg.peak_lr = o.lr;
        cfg.warmup = o.warmup;
        cfg.schedule = schedule_from_string(o.schedule);
        cfg.max_epochs = o.epochs;
        cfg.batch_size = o.batch;
        cfg.seed = o.seed;
        cfg.threshold = o.threshold;
        cfg.early_stop_patience = o.patience;
        cfg.vocab_budget = o.vocab_budget;
        config.update({{"encoder", o.encoder},
                       {"epochs", o.epochs},
                       {"batch", o.batch},
                       {"lr", o.lr},
                       {"warmup", o.warmup},
                       {"schedule", o.schedule},
                       {"patience", o.patience},
                       {"vocab_budget", o.vocab_budget}});

        TransformerModel model = TransformerModel::train(train, val, cfg, o.encoder, fp);
        model.save(o.out);
        if (!model.log().empty()) {
            const auto& last = model.log().back();
            char buf[96];
            std::snprintf(buf, sizeof buf, "epoch %zu val_loss %.4f val_macro_f1 %.4f", last.epoch,
                          last.val_loss, last.val_macro_f1);
            note(g, "train: transformer stopped at " + std::string(buf));
        }
    }
    pipeline.save(o.out);

    RunManifest m;
    m.command = "train";
    m.set_config(config);
    add_corpus_input(m, o.in);
    if (have_val) add_corpus_input(m, o.val);
    for (const std::string& path : {o.lexicon, o.roster, o.rules})
        if (!path.empty()) m.add_input(path);
    std::vector<std::string> artifact_files;
    for (const auto& entry : fs::directory_iterator(o.out)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name == ".lock" || name == "run_manifest.json") continue;
        artifact_files.push_back(entry.path().string());
    }
    std::sort(artifact_files.begin(), artifact_files.end());
    for (const auto& path : artifact_files) m.add_output(path);
    m.write(manifest_path_for(o.out, true));

    note(g, "train: saved " + o.model + " artifact to " + o.out);
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateOpts {
    std::string model_dir, test, out;
};

void run_evaluate(const EvaluateOpts& o, const GlobalOpts& g) {
    ModelKind kind = detect_model_kind(o.model_dir);
    TextPipeline pipeline = TextPipeline::load(o.model_dir);
    Corpus prepared = pipeline.prepare(load_corpus(o.test));
    detail_note(g, "evaluate: " + std::to_string(prepared.size()) + " messages, model kind " +
                       std::string(to_string(kind)));

    MetricsReport r = evaluate(predict_with_artifact(kind, o.model_dir, prepared),
                               gold_labels(prepared));
    nlohmann::json report = {{"model", o.model_dir},
                             {"model_kind", std::string(to_string(kind))},
                             {"test_path", o.test},
                             {"test_hash", file_hash(o.test)},
                             {"metrics", to_json(r)}};

    if (g.json) std::cout << report.dump(2) << '\n';
    else std::cout << render_metrics(r);

    if (!o.out.empty()) {
        write_text_file(o.out, report.dump(2) + "\n");
        RunManifest m;
        m.command = "evaluate";
        m.set_config({{"model", o.model_dir}, {"test", o.test}});
        add_corpus_input(m, o.test);
        m.add_input(o.model_dir + "/config.json");
        m.add_output(o.out);
        m.write(manifest_path_for(o.out, false));
    }
}

// ---- compare ----------------------------------------------------------------

struct CompareOpts {
    std::string test, out;
    std::vector<std::string> models; // label=artifact_dir
};

void run_compare(const CompareOpts& o, const GlobalOpts& g) {
    Corpus raw = load_corpus(o.test);

    ComparisonReport report;
    report.test_path = o.test;
    report.test_hash = file_hash(o.test);
    for (const std::string& entry : o.models) {
        auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw validation_error("--model entry '" + entry + "' is not LABEL=DIR");
        ComparisonCell cell;
        cell.label = entry.substr(0, eq);
        cell.artifact = entry.substr(eq + 1);

        ModelKind kind = detect_model_kind(cell.artifact);
        TextPipeline pipeline = TextPipeline::load(cell.artifact);
        Corpus prepared = pipeline.prepare(raw);
        cell.metrics = evaluate(predict_with_artifact(kind, cell.artifact, prepared),
                                gold_labels(prepared));
        detail_note(g, "compare: scored " + cell.label + " from " + cell.artifact);
        report.cells.push_back(std::move(cell));
    }

    if (g.json) std::cout << report.to_json().dump(2) << '\n';
    else std::cout << report.render_table();

    if (!o.out.empty()) {
        write_text_file(o.out, report.to_json().dump(2) + "\n");
        RunManifest m;
        m.command = "compare";
        m.set_config({{"test", o.test}, {"models", o.models}});
        add_corpus_input(m, o.test);
        for (const auto& c : report.cells) m.add_input(c.artifact + "/config.json");
        m.add_output(o.out);
        m.write(manifest_path_for(o.out, false));
    }
}

// ---- predict ----------------------------------------------------------------

struct PredictOpts {
    std::string model_dir, text;
};

void run_predict(const PredictOpts& o, const GlobalOpts&) {
    ModelKind kind = detect_model_kind(o.model_dir);
    TextPipeline pipeline = TextPipeline::load(o.model_dir);
    std::string prepared = pipeline.prepare_text(o.text);

    std::array<double, kNumDimensions> scores{};
    LabelVector labels;
    if (kind == ModelKind::rf) {
        BaselineModel model = BaselineModel::load(o.model_dir);
        scores = model.predict_scores(prepared);
        labels = model.predict(prepared);
    } else {
        TransformerModel model = TransformerModel::load(o.model_dir);
        scores = model.predict_probs(prepared);
        labels = model.predict(prepared);
    }

    nlohmann::json score_obj = nlohmann::json::object(), label_obj = nlohmann::json::object();
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
        std::string key(to_string(kDimensions[d]));
        score_obj[key] = scores[d];
        label_obj[key] = static_cast<int>(labels.bits[d]);
    }
    nlohmann::json out = {{"model", o.model_dir},
                          {"model_kind", std::string(to_string(kind))},
                          {"text", o.text},
                          {"prepared", prepared},
                          {"scores", score_obj},
                          {"labels", label_obj}};
    std::cout << out.dump(2) << '\n';
}

// ---- agreement ---------------------------------------------------------------

struct AgreementOpts {
    std::string in, model_dir, out;
};

void run_agreement(const AgreementOpts& o, const GlobalOpts& g) {
    Corpus corpus = load_corpus(o.in);

    AgreementReport rep;
    nlohmann::json report;
    if (o.model_dir.empty()) {
        rep = agreement_report(corpus);
        report = to_json(rep);
        report["mode"] = "annotators";
    } else {
        ModelKind kind = detect_model_kind(o.model_dir);
        TextPipeline pipeline = TextPipeline::load(o.model_dir);
        Corpus prepared = pipeline.prepare(corpus);
        rep = agreement_report(prepared, predict_with_artifact(kind, o.model_dir, prepared));
        report = to_json(rep);
        report["mode"] = "model_vs_gold";
        report["model"] = o.model_dir;
    }
    report["corpus"] = o.in;
    report["corpus_hash"] = file_hash(o.in);
    report["n_messages"] = corpus.size();

    if (g.json) {
        std::cout << report.dump(2) << '\n';
    } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "pooled kappa %.4f%s", rep.pooled.value,
                      rep.pooled.degenerate ? " (degenerate)" : "");
        std::string line(buf);
        for (std::size_t d = 0; d < kNumDimensions; ++d) {
            std::snprintf(buf, sizeof buf, "  %s %.4f", std::string(to_string(kDimensions[d])).c_str(),
                          rep.per_dimension[d].value);
            line += buf;
        }
        std::cout << line << '\n';
    }

    if (!o.out.empty()) {
        write_text_file(o.out, report.dump(2) + "\n");
        RunManifest m;
        m.command = "agreement";
        m.set_config({{"in", o.in}, {"model", o.model_dir}});
        add_corpus_input(m, o.in);
        if (!o.model_dir.empty()) m.add_input(o.model_dir + "/config.json");
        m.add_output(o.out);
        m.write(manifest_path_for(o.out, false));
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"teamdims: teamwork-dimension classification over chat messages"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "read option defaults from an INI/TOML file");
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_flag("--quiet,-q", g.quiet, "suppress progress notes");
    app.add_flag("--verbose,-v", g.verbose, "extra progress notes");
    app.add_flag("--json", g.json, "machine-readable stdout");

    SynthOpts synth_opts;
    CLI::App* synth = app.add_subcommand("synth", "generate a labeled synthetic corpus");
    synth->add_option("--spec", synth_opts.spec, "per-dimension counts, e.g. COD=50,...,NONE=50");
    synth->add_option("--seed", synth_opts.seed, "generator seed");
    synth->add_option("--team-size", synth_opts.team_size, "messages per synthetic team");
    synth->add_option("--flip", synth_opts.flip,
                      "simulate a second annotator by flipping each label with this probability");
    synth->add_option("--out", synth_opts.out, "output corpus (.jsonl or .csv)")->required();
    synth->add_option("--roster-out", synth_opts.roster_out, "also write the masking roster here");

    PreprocessOpts pre_opts;
    CLI::App* pre = app.add_subcommand("preprocess", "normalize corpus text");
    pre->add_option("--in", pre_opts.in, "input corpus")->required();
    pre->add_option("--out", pre_opts.out, "output corpus")->required();
    pre->add_option("--lexicon", pre_opts.lexicon, "normalization lexicon TSV (default: built-in)");
    pre->add_option("--roster", pre_opts.roster, "participant names to mask, one per line");

    FeaturizeOpts feat_opts;
    CLI::App* feat = app.add_subcommand("featurize", "inject rule-based feature placeholders");
    feat->add_option("--in", feat_opts.in, "normalized input corpus")->required();
    feat->add_option("--out", feat_opts.out, "output corpus")->required();
    feat->add_option("--rules", feat_opts.rules, "feature rule TSV (default: built-in)");

    SplitOpts split_opts;
    CLI::App* split = app.add_subcommand("split", "partition a corpus into train/val/test");
    split->add_option("--in", split_opts.in, "input corpus")->required();
    split->add_option("--seed", split_opts.seed, "shuffle seed");
    split->add_option("--unit", split_opts.unit, "split unit")
        ->check(CLI::IsMember({"message", "team"}));
    split->add_option("--ratios", split_opts.ratios, "train,val,test ratios (default 0.6,0.2,0.2)");
    split->add_option("--out-dir", split_opts.out_dir, "output directory (default: beside input)");

    TrainOpts train_opts;
    CLI::App* train = app.add_subcommand("train", "train a model and save an artifact directory");
    train->add_option("--model", train_opts.model, "model family")
        ->required()
        ->check(CLI::IsMember({"rf", "transformer"}));
    train->add_option("--in", train_opts.in, "training corpus")->required();
    train->add_option("--val", train_opts.val, "validation corpus (required for transformer)");
    train->add_option("--out", train_opts.out, "artifact directory")->required();
    train->add_option("--features", train_opts.features, "inject feature placeholders")
        ->check(CLI::IsMember({"on", "off"}));
    train->add_option("--seed", train_opts.seed, "training seed");
    train->add_option("--threshold", train_opts.threshold, "decision threshold");
    train->add_option("--lexicon", train_opts.lexicon, "normalization lexicon TSV");
    train->add_option("--roster", train_opts.roster, "participant names to mask");
    train->add_option("--rules", train_opts.rules, "feature rule TSV");
    train->add_option("--trees", train_opts.trees, "rf: number of trees");
    train->add_option("--depth", train_opts.depth, "rf: max tree depth (0 = unlimited)");
    train->add_option("--min-leaf", train_opts.min_leaf, "rf: min samples per leaf");
    train->add_option("--encoder", train_opts.encoder, "transformer: encoder id or checkpoint dir");
    train->add_option("--epochs", train_opts.epochs, "transformer: max epochs");
    train->add_option("--batch", train_opts.batch, "transformer: batch size");
    train->add_option("--lr", train_opts.lr, "transformer: peak learning rate");
    train->add_option("--warmup", train_opts.warmup, "transformer: warmup fraction of an epoch");
    train->add_option("--schedule", train_opts.schedule, "transformer: lr schedule")
        ->check(CLI::IsMember({"linear_decay", "constant"}));
    train->add_option("--patience", train_opts.patience, "transformer: early-stop patience");
    train->add_option("--vocab-budget", train_opts.vocab_budget, "transformer: max vocab size");

    EvaluateOpts eval_opts;
    CLI::App* eval = app.add_subcommand("evaluate", "score an artifact on a labeled corpus");
    eval->add_option("--model", eval_opts.model_dir, "artifact directory")->required();
    eval->add_option("--test", eval_opts.test, "labeled test corpus")->required();
    eval->add_option("--out", eval_opts.out, "write the JSON report here");

    CompareOpts cmp_opts;
    CLI::App* cmp = app.add_subcommand("compare", "score several artifacts on one test corpus");
    cmp->add_option("--test", cmp_opts.test, "labeled test corpus")->required();
    cmp->add_option("--model", cmp_opts.models, "LABEL=DIR, repeatable")
        ->required()
        ->take_all();
    cmp->add_option("--out", cmp_opts.out, "write the JSON report here");

    PredictOpts pred_opts;
    CLI::App* pred = app.add_subcommand("predict", "classify a single message");
    pred->add_option("--model", pred_opts.model_dir, "artifact directory")->required();
    pred->add_option("--text", pred_opts.text, "raw message text")->required();

    AgreementOpts agr_opts;
    CLI::App* agr = app.add_subcommand("agreement", "annotator or model-vs-gold agreement");
    agr->add_option("--in", agr_opts.in, "labeled corpus")->required();
    agr->add_option("--model", agr_opts.model_dir,
                    "artifact directory (default: compare the corpus's two annotations)");
    agr->add_option("--out", agr_opts.out, "write the JSON report here");

    for (CLI::App* sub : {synth, pre, feat, split, train, eval, cmp, pred, agr})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
        if (*synth) run_synth(synth_opts, g);
        else if (*pre) run_preprocess(pre_opts, g);
        else if (*feat) run_featurize(feat_opts, g);
        else if (*split) run_split(split_opts, g);
        else if (*train) run_train(train_opts, g);
        else if (*eval) run_evaluate(eval_opts, g);
        else if (*cmp) run_compare(cmp_opts, g);
        else if (*pred) run_predict(pred_opts, g);
        else if (*agr) run_agreement(agr_opts, g);
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}

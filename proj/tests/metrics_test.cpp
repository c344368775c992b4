#include <gtest/gtest.h>

#include <array>
#include <vector>

#include "teamdims/label.hpp"
#include "teamdims/metrics.hpp"
#include "teamdims/rng.hpp"

using namespace teamdims;

namespace {

LabelVector lv(int cod, int mpm, int ccf, int tes) {
    return make_labels(cod != 0, mpm != 0, ccf != 0, tes != 0);
}

// Independent recomputation used as the oracle: counts derived from compact()
// strings, scores assembled with the same 0/0 -> 0 convention.
struct OracleDim {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double p = 0, r = 0, f1 = 0;
    bool degenerate = false;
};

struct Oracle {
    std::array<OracleDim, 4> dims;
    double macro_p = 0, macro_r = 0, macro_f1 = 0, hamming = 0;
};

Oracle brute_force(const std::vector<LabelVector>& preds, const std::vector<LabelVector>& golds) {
    Oracle o;
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        std::string p = preds[i].compact(), g = golds[i].compact();
        for (std::size_t d = 0; d < 4; ++d) {
            if (p[d] == '1' && g[d] == '1') ++o.dims[d].tp;
            if (p[d] == '1' && g[d] == '0') ++o.dims[d].fp;
            if (p[d] == '0' && g[d] == '1') ++o.dims[d].fn;
            if (p[d] == '0' && g[d] == '0') ++o.dims[d].tn;
            if (p[d] != g[d]) ++mismatches;
        }
    }
    for (auto& dim : o.dims) {
        if (dim.tp + dim.fp == 0) dim.degenerate = true;
        else dim.p = static_cast<double>(dim.tp) / static_cast<double>(dim.tp + dim.fp);
        if (dim.tp + dim.fn == 0) dim.degenerate = true;
        else dim.r = static_cast<double>(dim.tp) / static_cast<double>(dim.tp + dim.fn);
        if (dim.p + dim.r == 0.0) dim.degenerate = true;
        else dim.f1 = 2.0 * dim.p * dim.r / (dim.p + dim.r);
        o.macro_p += dim.p;
        o.macro_r += dim.r;
        o.macro_f1 += dim.f1;
    }
    o.macro_p /= 4.0;
    o.macro_r /= 4.0;
    o.macro_f1 /= 4.0;
    o.hamming = static_cast<double>(mismatches) / (4.0 * static_cast<double>(preds.size()));
    return o;
}

LabelVector random_labels(Rng& rng) {
    return lv(static_cast<int>(draw(rng, 2)), static_cast<int>(draw(rng, 2)),
              static_cast<int>(draw(rng, 2)), static_cast<int>(draw(rng, 2)));
}

} // namespace

TEST(MetricsTest, WorkedExampleMatchesHandComputation) {
    std::vector<LabelVector> golds = {lv(1, 0, 1, 0), lv(0, 1, 0, 1), lv(1, 1, 0, 0)};
    std::vector<LabelVector> preds = {lv(1, 0, 0, 0), lv(0, 1, 0, 1), lv(0, 1, 0, 1)};

    MetricsReport r = evaluate(preds, golds);
    ASSERT_EQ(r.n_messages, 3u);

    // COD: tp=1 fp=0 fn=1 tn=1
    EXPECT_EQ(r.per_dimension[0].tp, 1u);
    EXPECT_EQ(r.per_dimension[0].fn, 1u);
    EXPECT_DOUBLE_EQ(r.per_dimension[0].precision, 1.0);
    EXPECT_DOUBLE_EQ(r.per_dimension[0].recall, 0.5);
    EXPECT_NEAR(r.per_dimension[0].f1, 2.0 / 3.0, 1e-12);
    EXPECT_FALSE(r.per_dimension[0].degenerate);

    // MPM: perfect
    EXPECT_DOUBLE_EQ(r.per_dimension[1].precision, 1.0);
    EXPECT_DOUBLE_EQ(r.per_dimension[1].recall, 1.0);
    EXPECT_DOUBLE_EQ(r.per_dimension[1].f1, 1.0);

    // CCF: never predicted positive -> precision is 0/0, pinned to 0 and flagged
    EXPECT_EQ(r.per_dimension[2].tp, 0u);
    EXPECT_EQ(r.per_dimension[2].fp, 0u);
    EXPECT_DOUBLE_EQ(r.per_dimension[2].precision, 0.0);
    EXPECT_DOUBLE_EQ(r.per_dimension[2].recall, 0.0);
    EXPECT_DOUBLE_EQ(r.per_dimension[2].f1, 0.0);
    EXPECT_TRUE(r.per_dimension[2].degenerate);

    // TES: tp=1 fp=1 fn=0 tn=1
    EXPECT_DOUBLE_EQ(r.per_dimension[3].precision, 0.5);
    EXPECT_DOUBLE_EQ(r.per_dimension[3].recall, 1.0);
    EXPECT_NEAR(r.per_dimension[3].f1, 2.0 / 3.0, 1e-12);

    EXPECT_DOUBLE_EQ(r.macro_precision, 0.625);
    EXPECT_DOUBLE_EQ(r.macro_recall, 0.625);
    EXPECT_NEAR(r.macro_f1, 7.0 / 12.0, 1e-12); // 0.5833...
    EXPECT_DOUBLE_EQ(r.hamming_loss, 0.25);     // 3 mismatches / 12 decisions
}

TEST(MetricsTest, MacroF1IsMeanOfPerClassF1NotHarmonicOfMacros) {
    // Same worked example: harmonic mean of macro P/R would give 0.625 here,
    // the mean-of-F1 definition gives 7/12. Guard the distinction.
    std::vector<LabelVector> golds = {lv(1, 0, 1, 0), lv(0, 1, 0, 1), lv(1, 1, 0, 0)};
    std::vector<LabelVector> preds = {lv(1, 0, 0, 0), lv(0, 1, 0, 1), lv(0, 1, 0, 1)};
    MetricsReport r = evaluate(preds, golds);
    double harmonic = 2.0 * r.macro_precision * r.macro_recall / (r.macro_precision + r.macro_recall);
    EXPECT_NEAR(harmonic, 0.625, 1e-12);
    EXPECT_NEAR(r.macro_f1, 7.0 / 12.0, 1e-12);
    EXPECT_GT(harmonic - r.macro_f1, 0.01);
}

TEST(MetricsTest, MatchesBruteForceOracleOnRandomInstances) {
    Rng rng(20240815u);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + draw(rng, 10);
        std::vector<LabelVector> preds, golds;
        for (std::size_t i = 0; i < n; ++i) {
            preds.push_back(random_labels(rng));
            golds.push_back(random_labels(rng));
        }
        MetricsReport r = evaluate(preds, golds);
        Oracle o = brute_force(preds, golds);
        for (std::size_t d = 0; d < 4; ++d) {
            EXPECT_EQ(r.per_dimension[d].tp, o.dims[d].tp);
            EXPECT_EQ(r.per_dimension[d].fp, o.dims[d].fp);
            EXPECT_EQ(r.per_dimension[d].fn, o.dims[d].fn);
            EXPECT_EQ(r.per_dimension[d].tn, o.dims[d].tn);
            EXPECT_EQ(r.per_dimension[d].precision, o.dims[d].p);
            EXPECT_EQ(r.per_dimension[d].recall, o.dims[d].r);
            EXPECT_EQ(r.per_dimension[d].f1, o.dims[d].f1);
            EXPECT_EQ(r.per_dimension[d].degenerate, o.dims[d].degenerate);
        }
        EXPECT_EQ(r.macro_precision, o.macro_p);
        EXPECT_EQ(r.macro_recall, o.macro_r);
        EXPECT_EQ(r.macro_f1, o.macro_f1);
        EXPECT_EQ(r.hamming_loss, o.hamming);
    }
}

TEST(MetricsTest, InvariantUnderMessagePermutation) {
    Rng rng(7u);
    std::vector<LabelVector> preds, golds;
    for (int i = 0; i < 16; ++i) {
        preds.push_back(random_labels(rng));
        golds.push_back(random_labels(rng));
    }
    MetricsReport a = evaluate(preds, golds);

    std::vector<std::size_t> order(preds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng);
    std::vector<LabelVector> preds2, golds2;
    for (std::size_t i : order) {
        preds2.push_back(preds[i]);
        golds2.push_back(golds[i]);
    }
    MetricsReport b = evaluate(preds2, golds2);

    EXPECT_EQ(a.macro_precision, b.macro_precision);
    EXPECT_EQ(a.macro_recall, b.macro_recall);
    EXPECT_EQ(a.macro_f1, b.macro_f1);
    EXPECT_EQ(a.hamming_loss, b.hamming_loss);
    for (std::size_t d = 0; d < 4; ++d)
        EXPECT_EQ(a.per_dimension[d].tp, b.per_dimension[d].tp);
}

TEST(MetricsTest, ComplementPredictionsGiveHammingOne) {
    Rng rng(13u);
    std::vector<LabelVector> golds, preds;
    for (int i = 0; i < 10; ++i) {
        LabelVector g = random_labels(rng);
        LabelVector p = g;
        for (auto& bit : p.bits) bit ^= 1;
        golds.push_back(g);
        preds.push_back(p);
    }
    MetricsReport r = evaluate(preds, golds);
    EXPECT_DOUBLE_EQ(r.hamming_loss, 1.0);
    for (std::size_t d = 0; d < 4; ++d) {
        EXPECT_EQ(r.per_dimension[d].tp, 0u);
        EXPECT_EQ(r.per_dimension[d].tn, 0u);
    }
}

TEST(MetricsTest, PerfectPredictionsScoreOne) {
    std::vector<LabelVector> golds = {lv(1, 0, 1, 0), lv(0, 1, 0, 1)};
    MetricsReport r = evaluate(golds, golds);
    EXPECT_DOUBLE_EQ(r.macro_precision, 1.0);
    EXPECT_DOUBLE_EQ(r.macro_recall, 1.0);
    EXPECT_DOUBLE_EQ(r.macro_f1, 1.0);
    EXPECT_DOUBLE_EQ(r.hamming_loss, 0.0);
    for (std::size_t d = 0; d < 4; ++d) EXPECT_FALSE(r.per_dimension[d].degenerate);
}

TEST(MetricsTest, AllNegativeEverywhereIsDegenerateZero) {
    std::vector<LabelVector> zeros = {lv(0, 0, 0, 0), lv(0, 0, 0, 0)};
    MetricsReport r = evaluate(zeros, zeros);
    EXPECT_DOUBLE_EQ(r.macro_f1, 0.0);
    EXPECT_DOUBLE_EQ(r.hamming_loss, 0.0);
    for (std::size_t d = 0; d < 4; ++d) EXPECT_TRUE(r.per_dimension[d].degenerate);
}

TEST(MetricsTest, TrueNegativePaddingLeavesPerDimensionScoresAlone) {
    std::vector<LabelVector> golds = {lv(1, 0, 1, 0), lv(0, 1, 0, 1), lv(1, 1, 0, 0)};
    std::vector<LabelVector> preds = {lv(1, 0, 0, 0), lv(0, 1, 0, 1), lv(0, 1, 0, 1)};
    MetricsReport before = evaluate(preds, golds);

    golds.push_back(lv(0, 0, 0, 0));
    preds.push_back(lv(0, 0, 0, 0));
    MetricsReport after = evaluate(preds, golds);

    for (std::size_t d = 0; d < 4; ++d) {
        EXPECT_EQ(after.per_dimension[d].precision, before.per_dimension[d].precision);
        EXPECT_EQ(after.per_dimension[d].recall, before.per_dimension[d].recall);
        EXPECT_EQ(after.per_dimension[d].f1, before.per_dimension[d].f1);
        EXPECT_EQ(after.per_dimension[d].tn, before.per_dimension[d].tn + 1);
    }
    // mismatch count unchanged, denominator grew by one message
    EXPECT_DOUBLE_EQ(after.hamming_loss, before.hamming_loss * 3.0 / 4.0);
}

TEST(MetricsTest, RejectsEmptyAndMismatchedInputs) {
    std::vector<LabelVector> empty;
    EXPECT_THROW(evaluate(empty, empty), validation_error);
    std::vector<LabelVector> one = {lv(1, 0, 0, 0)};
    std::vector<LabelVector> two = {lv(1, 0, 0, 0), lv(0, 0, 0, 1)};
    EXPECT_THROW(evaluate(one, two), validation_error);
    EXPECT_THROW(evaluate(two, one), validation_error);
}

TEST(MetricsTest, JsonReportUsesPinnedKeys) {
    std::vector<LabelVector> golds = {lv(1, 0, 1, 0), lv(0, 1, 0, 1), lv(1, 1, 0, 0)};
    std::vector<LabelVector> preds = {lv(1, 0, 0, 0), lv(0, 1, 0, 1), lv(0, 1, 0, 1)};
    nlohmann::json j = to_json(evaluate(preds, golds));

    for (const char* key : {"macro_precision", "macro_recall", "macro_f1", "hamming_loss",
                            "per_dimension", "n_messages"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["n_messages"].get<std::size_t>(), 3u);
    EXPECT_DOUBLE_EQ(j["hamming_loss"].get<double>(), 0.25);
    for (const char* dim : {"COD", "MPM", "CCF", "TES"}) {
        ASSERT_TRUE(j["per_dimension"].contains(dim)) << dim;
        for (const char* key : {"precision", "recall", "f1", "degenerate"})
            EXPECT_TRUE(j["per_dimension"][dim].contains(key)) << dim << "." << key;
    }
    EXPECT_DOUBLE_EQ(j["per_dimension"]["MPM"]["f1"].get<double>(), 1.0);
    EXPECT_TRUE(j["per_dimension"]["CCF"]["degenerate"].get<bool>());
}

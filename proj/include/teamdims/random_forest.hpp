#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "teamdims/error.hpp"
#include "teamdims/rng.hpp"

namespace teamdims {

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t max_depth = 0; // 0 = unlimited
    std::size_t min_leaf = 1;
    std::uint64_t seed = 0;
};

namespace detail {

struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

inline double gini(std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p); // 1 - p^2 - (1-p)^2
}

inline Split best_split(const std::vector<std::vector<double>>& x,
                        const std::vector<std::uint8_t>& y,
                        const std::vector<std::size_t>& samples,
                        const std::vector<std::size_t>& features, std::size_t min_leaf) {
    Split best;
    std::size_t n = samples.size();
    std::size_t pos_total = 0;
    for (std::size_t s : samples) pos_total += y[s];
    double parent = gini(pos_total, n);
    if (parent <= 0.0) return best;

    std::vector<std::size_t> order(samples);
    for (std::size_t f : features) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            double va = x[a][f], vb = x[b][f];
            if (va != vb) return va < vb;
            return a < b; // stable total order for determinism
        });
        std::size_t left_pos = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_pos += y[order[i]];
            if (x[order[i]][f] == x[order[i + 1]][f]) continue; // not a boundary
            std::size_t nl = i + 1, nr = n - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            double il = gini(left_pos, nl);
            double ir = gini(pos_total - left_pos, nr);
            double gain = parent - (static_cast<double>(nl) * il +
                                    static_cast<double>(nr) * ir) /
                                       static_cast<double>(n);
            // strict > keeps the first (lowest feature, lowest threshold)
            // candidate on ties, since features and values scan ascending
            if (gain > best.gain + 1e-15) {
                best.found = true;
                best.feature = f;
                best.threshold = 0.5 * (x[order[i]][f] + x[order[i + 1]][f]);
                best.gain = gain;
            }
        }
    }
    return best;
}

} // namespace detail

// CART-style binary random forest, pinned for reproducibility: Gini
// impurity, bootstrap resampling per tree, sqrt(n_features) feature
// subsampling per split, midpoint thresholds, ties broken toward the lowest
// feature index then the lowest threshold. Trees vote and the score is the
// positive vote fraction, so score * n_trees is always an integer.
class RandomForest {
public:
    struct Node {
        int feature = -1; // -1: leaf
        double threshold = 0.0;
        int left = -1, right = -1;
        std::uint8_t vote = 0; // leaf majority; tie votes negative
    };

    struct Tree {
        std::vector<Node> nodes;

        std::uint8_t predict(const std::vector<double>& row) const {
            int at = 0;
            while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
                const Node& n = nodes[static_cast<std::size_t>(at)];
                double v = static_cast<std::size_t>(n.feature) < row.size()
                               ? row[static_cast<std::size_t>(n.feature)]
                               : 0.0;
                at = v <= n.threshold ? n.left : n.right;
            }
            return nodes[static_cast<std::size_t>(at)].vote;
        }
    };

    RandomForest() = default;

    static RandomForest fit(const std::vector<std::vector<double>>& x,
                            const std::vector<std::uint8_t>& y, const ForestConfig& config) {
        if (x.empty()) throw validation_error("random forest: empty training set");
        if (x.size() != y.size())
            throw validation_error("random forest: feature/label count mismatch");
        if (config.n_trees < 1) throw validation_error("random forest: n_trees must be >= 1");

        RandomForest forest;
        forest.n_features_ = x[0].size();
        forest.config_ = config;

        bool any_pos = false, any_neg = false;
        for (auto b : y) (b ? any_pos : any_neg) = true;
        if (!any_pos || !any_neg) {
            forest.constant_ = true;
            forest.constant_value_ = y[0];
            return forest;
        }

        forest.trees_.reserve(config.n_trees);
        for (std::size_t t = 0; t < config.n_trees; ++t) {
            Rng rng(substream_seed(config.seed, t));
            forest.trees_.push_back(build_tree(x, y, config, forest.n_features_, rng));
        }
        return forest;
    }

    double score(const std::vector<double>& row) const {
        if (constant_) return constant_value_ ? 1.0 : 0.0;
        std::size_t votes = 0;
        for (const auto& tree : trees_) votes += tree.predict(row);
        return static_cast<double>(votes) / static_cast<double>(trees_.size());
    }

    bool constant() const { return constant_; }
    std::uint8_t constant_value() const { return constant_value_; }
    std::size_t n_trees() const { return constant_ ? 0 : trees_.size(); }
    std::size_t n_features() const { return n_features_; }

    nlohmann::json to_json() const {
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& tree : trees_) {
            nlohmann::json nodes = nlohmann::json::array();
            for (const auto& n : tree.nodes)
                nodes.push_back({{"f", n.feature},
                                 {"t", n.threshold},
                                 {"l", n.left},
                                 {"r", n.right},
                                 {"v", n.vote}});
            trees.push_back(std::move(nodes));
        }
        return {{"n_features", n_features_},
                {"constant", constant_},
                {"constant_value", constant_value_},
                {"n_trees", config_.n_trees},
                {"max_depth", config_.max_depth},
                {"min_leaf", config_.min_leaf},
                {"seed", config_.seed},
                {"trees", std::move(trees)}};
    }

    static RandomForest from_json(const nlohmann::json& obj) {
        RandomForest forest;
        forest.n_features_ = obj.at("n_features").get<std::size_t>();
        forest.constant_ = obj.at("constant").get<bool>();
        forest.constant_value_ = obj.at("constant_value").get<std::uint8_t>();
        forest.config_.n_trees = obj.at("n_trees").get<std::size_t>();
        forest.config_.max_depth = obj.at("max_depth").get<std::size_t>();
        forest.config_.min_leaf = obj.at("min_leaf").get<std::size_t>();
        forest.config_.seed = obj.at("seed").get<std::uint64_t>();
        for (const auto& tree_json : obj.at("trees")) {
            Tree tree;
            for (const auto& n : tree_json) {
                Node node;
                node.feature = n.at("f").get<int>();
                node.threshold = n.at("t").get<double>();
                node.left = n.at("l").get<int>();
                node.right = n.at("r").get<int>();
                node.vote = n.at("v").get<std::uint8_t>();
                tree.nodes.push_back(node);
            }
            forest.trees_.push_back(std::move(tree));
        }
        return forest;
    }

private:
    static Tree build_tree(const std::vector<std::vector<double>>& x,
                           const std::vector<std::uint8_t>& y, const ForestConfig& config,
                           std::size_t n_features, Rng& rng) {
        // bootstrap sample
        std::vector<std::size_t> samples(x.size());
        for (auto& s : samples) s = draw(rng, x.size());

        std::size_t m = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features))));

        Tree tree;
        grow(tree, x, y, std::move(samples), config, n_features, m, 0, rng);
        return tree;
    }

    static int grow(Tree& tree, const std::vector<std::vector<double>>& x,
                    const std::vector<std::uint8_t>& y, std::vector<std::size_t> samples,
                    const ForestConfig& config, std::size_t n_features, std::size_t m,
                    std::size_t depth, Rng& rng) {
        std::size_t pos = 0;
        for (std::size_t s : samples) pos += y[s];
        std::size_t n = samples.size();

        auto make_leaf = [&]() {
            Node leaf;
            leaf.vote = pos * 2 > n ? 1 : 0; // tie -> negative
            tree.nodes.push_back(leaf);
            return static_cast<int>(tree.nodes.size() - 1);
        };

        bool at_depth_limit = config.max_depth > 0 && depth >= config.max_depth;
        if (pos == 0 || pos == n || n < 2 * config.min_leaf || at_depth_limit)
            return make_leaf();

        // sample m distinct candidate features, then scan them in ascending
        // index order for the documented tie-break
        std::vector<std::size_t> all(n_features);
        std::iota(all.begin(), all.end(), 0);
        std::vector<std::size_t> candidates;
        candidates.reserve(m);
        for (std::size_t k = 0; k < m && k < n_features; ++k) {
            std::size_t j = k + draw(rng, n_features - k);
            std::swap(all[k], all[j]);
            candidates.push_back(all[k]);
        }
        std::sort(candidates.begin(), candidates.end());

        detail::Split split = detail::best_split(x, y, samples, candidates, config.min_leaf);
        if (!split.found) return make_leaf();

        std::vector<std::size_t> left, right;
        for (std::size_t s : samples)
            (x[s][split.feature] <= split.threshold ? left : right).push_back(s);
        samples.clear();
        samples.shrink_to_fit();

        std::size_t at = tree.nodes.size();
        Node node;
        node.feature = static_cast<int>(split.feature);
        node.threshold = split.threshold;
        tree.nodes.push_back(node);
        int l = grow(tree, x, y, std::move(left), config, n_features, m, depth + 1, rng);
        int r = grow(tree, x, y, std::move(right), config, n_features, m, depth + 1, rng);
        tree.nodes[at].left = l;
        tree.nodes[at].right = r;
        return static_cast<int>(at);
    }

    std::vector<Tree> trees_;
    std::size_t n_features_ = 0;
    bool constant_ = false;
    std::uint8_t constant_value_ = 0;
    ForestConfig config_;
};

} // namespace teamdims

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "teamdims/corpus.hpp"
#include "teamdims/error.hpp"
#include "teamdims/rng.hpp"

namespace teamdims {

enum class SplitUnit { message, team };

inline std::string to_string(SplitUnit u) {
    return u == SplitUnit::message ? "message" : "team";
}

struct SplitSpec {
    std::array<double, 3> ratios{0.6, 0.2, 0.2}; // train, val, test
    std::uint64_t seed = 0;
    SplitUnit unit = SplitUnit::message;

    void validate() const {
        double sum = ratios[0] + ratios[1] + ratios[2];
        if (std::abs(sum - 1.0) > 1e-9)
            throw validation_error("split ratios must sum to 1, got " + std::to_string(sum));
        for (double r : ratios)
            if (r < 0.0) throw validation_error("split ratios must be non-negative");
    }
};

struct SplitResult {
    Corpus train, val, test;
};

namespace detail {

inline long long round_half_away(double x) {
    return static_cast<long long>(x >= 0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
}

// val and test sizes are rounded half-away-from-zero from their ratios; train
// takes the remainder. If a partition with a non-zero ratio ends up empty (or
// train goes negative), one unit moves over from the currently largest
// partition, train winning ties.
inline std::array<std::size_t, 3> partition_sizes(std::size_t n,
                                                  const std::array<double, 3>& ratios) {
    long long n_val = round_half_away(ratios[1] * static_cast<double>(n));
    long long n_test = round_half_away(ratios[2] * static_cast<double>(n));
    long long n_train = static_cast<long long>(n) - n_val - n_test;
    std::array<long long, 3> sizes = {n_train, n_val, n_test};

    auto largest = [&]() -> std::size_t {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 3; ++i)
            if (sizes[i] > sizes[best]) best = i;
        return best;
    };
    for (int guard = 0; guard < 8; ++guard) {
        bool fixed = true;
        for (std::size_t i = 0; i < 3; ++i) {
            if (sizes[i] < 0 || (ratios[i] > 0.0 && sizes[i] == 0)) {
                std::size_t from = largest();
                if (from == i || sizes[from] <= 1) {
                    throw validation_error(
                        "too few units (" + std::to_string(n) +
                        ") to give every non-empty partition at least one member");
                }
                --sizes[from];
                ++sizes[i];
                fixed = false;
            }
        }
        if (fixed) break;
    }
    return {static_cast<std::size_t>(sizes[0]), static_cast<std::size_t>(sizes[1]),
            static_cast<std::size_t>(sizes[2])};
}

} // namespace detail

// Deterministic 6:2:2-style split. Units (messages, or whole teams) are
// shuffled by seeded Fisher-Yates, dealt out as train | val | test in that
// order, and each partition then keeps the original corpus order.
inline SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec) {
    spec.validate();

    std::vector<std::vector<std::size_t>> units; // message indices per unit
    if (spec.unit == SplitUnit::message) {
        units.reserve(corpus.size());
        for (std::size_t i = 0; i < corpus.size(); ++i) units.push_back({i});
    } else {
        std::vector<std::string> order; // team ids by first appearance
        std::map<std::string, std::size_t> unit_of;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const std::string& team = corpus.messages[i].team_id;
            auto it = unit_of.find(team);
            if (it == unit_of.end()) {
                unit_of.emplace(team, units.size());
                units.emplace_back();
                it = unit_of.find(team);
            }
            units[it->second].push_back(i);
        }
        (void)order;
    }

    if (units.size() < 3)
        throw validation_error("corpus has only " + std::to_string(units.size()) + " " +
                               to_string(spec.unit) + " unit(s); need at least 3 to split");

    auto sizes = detail::partition_sizes(units.size(), spec.ratios);

    std::vector<std::size_t> unit_order(units.size());
    for (std::size_t i = 0; i < unit_order.size(); ++i) unit_order[i] = i;
    Rng rng(spec.seed);
    shuffle(unit_order, rng);

    std::array<std::vector<std::size_t>, 3> member_indices;
    std::size_t cursor = 0;
    for (std::size_t part = 0; part < 3; ++part) {
        for (std::size_t k = 0; k < sizes[part]; ++k, ++cursor)
            for (std::size_t msg : units[unit_order[cursor]])
                member_indices[part].push_back(msg);
        std::sort(member_indices[part].begin(), member_indices[part].end());
    }

    SplitResult result;
    std::array<Corpus*, 3> parts = {&result.train, &result.val, &result.test};
    for (std::size_t part = 0; part < 3; ++part) {
        parts[part]->meta = corpus.meta;
        parts[part]->messages.reserve(member_indices[part].size());
        for (std::size_t msg : member_indices[part])
            parts[part]->messages.push_back(corpus.messages[msg]);
    }
    return result;
}

} // namespace teamdims

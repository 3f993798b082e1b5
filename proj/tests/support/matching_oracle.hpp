#pragma once

// Independent oracle for span matching: maximum bipartite matching computed
// with augmenting paths, plus a generator for random disjoint span sets.
// The production matcher is greedy; because spans within each set are
// disjoint and processed in ascending start order, greedy must reach this
// optimum.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "czcite/metrics.hpp"

namespace testutil {

inline uint64_t max_matching(const std::vector<czcite::LabeledSpan>& gold,
                             const std::vector<czcite::LabeledSpan>& predicted,
                             czcite::MatchMode mode) {
    std::vector<std::vector<std::size_t>> adj(predicted.size());
    for (std::size_t p = 0; p < predicted.size(); ++p)
        for (std::size_t g = 0; g < gold.size(); ++g)
            if (czcite::detail::spans_match(gold[g], predicted[p], mode)) adj[p].push_back(g);

    std::vector<int> owner(gold.size(), -1);
    std::function<bool(std::size_t, std::vector<bool>&)> augment =
        [&](std::size_t p, std::vector<bool>& seen) {
            for (std::size_t g : adj[p]) {
                if (seen[g]) continue;
                seen[g] = true;
                if (owner[g] == -1 || augment(static_cast<std::size_t>(owner[g]), seen)) {
                    owner[g] = static_cast<int>(p);
                    return true;
                }
            }
            return false;
        };

    uint64_t matched = 0;
    for (std::size_t p = 0; p < predicted.size(); ++p) {
        std::vector<bool> seen(gold.size(), false);
        if (augment(p, seen)) ++matched;
    }
    return matched;
}

inline std::vector<czcite::LabeledSpan> random_disjoint_spans(std::mt19937_64& rng,
                                                              const std::string& doc_id) {
    std::vector<czcite::LabeledSpan> out;
    std::size_t pos = rng() % 3;
    while (pos < 40 && out.size() < 8) {
        std::size_t len = 1 + rng() % 5;
        if (rng() % 3 != 0) out.push_back({doc_id, {pos, pos + len}, "court_identifier"});
        pos += len + rng() % 4; // gap may be zero: touching spans are legal
    }
    return out;
}

} // namespace testutil

#pragma once

// First-order linear-chain sequence labeler shared by the segmenter and the
// recognizer: string-keyed feature bundles, exact Viterbi decoding with a
// deterministic tie-break, averaged-perceptron training, and a versioned text
// model format.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "czcite/common.hpp"
#include "czcite/io.hpp"

namespace czcite::crf {

// One position of an observation sequence: the feature strings active there.
using FeatureBundle = std::vector<std::string>;
using Observation = std::vector<FeatureBundle>;

struct Example {
    Observation observations;
    std::vector<int> labels;
};

inline constexpr const char* kModelFormat = "czcite-chaincrf";
inline constexpr int kModelVersion = 1;

class Model {
public:
    Model() = default;
    explicit Model(std::vector<std::string> label_names) : labels_(std::move(label_names)) {
        if (labels_.empty()) throw DataError("chain model needs at least one label");
        for (const auto& l : labels_)
            for (char c : l)
                if (is_ascii_space(c)) throw DataError("label names must not contain whitespace");
    }

    std::size_t num_labels() const { return labels_.size(); }
    const std::vector<std::string>& label_names() const { return labels_; }

    int label_id(const std::string& name) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == name) return static_cast<int>(i);
        return -1;
    }

    // Feature ids are assigned in first-seen order; unknown features score zero.
    int feature_id(const std::string& feature) const {
        auto it = vocab_.find(feature);
        return it == vocab_.end() ? -1 : it->second;
    }

    int intern_feature(const std::string& feature) {
        for (char c : feature)
            if (is_ascii_space(c)) throw DataError("feature strings must not contain whitespace: '" + feature + "'");
        auto it = vocab_.find(feature);
        if (it != vocab_.end()) return it->second;
        int id = static_cast<int>(feature_names_.size());
        vocab_.emplace(feature, id);
        feature_names_.push_back(feature);
        emission_.resize(emission_.size() + labels_.size(), 0.0);
        return id;
    }

    std::size_t num_features() const { return feature_names_.size(); }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    double emission(int feature, int label) const {
        return emission_[static_cast<std::size_t>(feature) * labels_.size() + label];
    }
    double& emission(int feature, int label) {
        return emission_[static_cast<std::size_t>(feature) * labels_.size() + label];
    }
    double transition(int from, int to) const { return transition_[from * labels_.size() + to]; }
    double& transition(int from, int to) { return transition_[from * labels_.size() + to]; }

    void ensure_transitions() {
        if (transition_.empty()) transition_.assign(labels_.size() * labels_.size(), 0.0);
    }

private:
    std::vector<std::string> labels_;
    std::vector<std::string> feature_names_;
    std::unordered_map<std::string, int> vocab_;
    std::vector<double> emission_;   // [feature * L + label]
    std::vector<double> transition_; // [from * L + to]
};

namespace detail {

// Maps the bundles of one observation sequence to feature ids (-1 for unknown).
inline std::vector<std::vector<int>> encode(const Model& model, const Observation& obs) {
    std::vector<std::vector<int>> ids(obs.size());
    for (std::size_t t = 0; t < obs.size(); ++t) {
        ids[t].reserve(obs[t].size());
        for (const auto& f : obs[t]) ids[t].push_back(model.feature_id(f));
    }
    return ids;
}

// Adds the active emission weights in bundle order. Every scoring path in this
// module accumulates in this exact order, so path scores compare bitwise.
inline void add_emissions(const Model& model, const std::vector<int>& feats, int label, double& acc) {
    for (int f : feats)
        if (f >= 0) acc += model.emission(f, label);
}

} // namespace detail

// Additive linear-chain score of a labeling: emissions at every position plus a
// transition weight for each adjacent label pair.
inline double score(const Model& model, const Observation& obs, const std::vector<int>& labels) {
    if (obs.empty()) throw DataError("score: empty sequence");
    if (obs.size() != labels.size()) throw DataError("score: observation/label length mismatch");
    const int L = static_cast<int>(model.num_labels());
    for (int y : labels)
        if (y < 0 || y >= L) throw DataError("score: label id out of range");
    auto feats = detail::encode(model, obs);
    double s = 0.0;
    for (std::size_t t = 0; t < obs.size(); ++t) {
        if (t > 0) s += model.transition(labels[t - 1], labels[t]);
        detail::add_emissions(model, feats[t], labels[t], s);
    }
    return s;
}

struct DecodeResult {
    std::vector<int> labels;
    double best_score = 0.0;
    // constrained[t][y]: best whole-sequence score among labelings with label y at t.
    std::vector<std::vector<double>> constrained;
};

namespace detail {

inline DecodeResult decode_ids(const Model& model, const std::vector<std::vector<int>>& feats,
                               bool with_margins) {
    if (feats.empty()) throw DataError("viterbi: empty sequence");
    const int L = static_cast<int>(model.num_labels());
    const std::size_t T = feats.size();

    std::vector<std::vector<double>> fwd(T, std::vector<double>(L));
    std::vector<std::vector<int>> back(T, std::vector<int>(L, 0));
    for (int y = 0; y < L; ++y) {
        double s = 0.0;
        add_emissions(model, feats[0], y, s);
        fwd[0][y] = s;
    }
    for (std::size_t t = 1; t < T; ++t) {
        for (int y = 0; y < L; ++y) {
            double best = -std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int p = 0; p < L; ++p) {
                double cand = fwd[t - 1][p] + model.transition(p, y);
                if (cand > best) { // strict: ties keep the lower predecessor id
                    best = cand;
                    arg = p;
                }
            }
            add_emissions(model, feats[t], y, best);
            fwd[t][y] = best;
            back[t][y] = arg;
        }
    }

    DecodeResult result;
    result.labels.assign(T, 0);
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int y = 0; y < L; ++y) {
        if (fwd[T - 1][y] > best) {
            best = fwd[T - 1][y];
            arg = y;
        }
    }
    result.best_score = best;
    result.labels[T - 1] = arg;
    for (std::size_t t = T - 1; t > 0; --t) result.labels[t - 1] = back[t][result.labels[t]];

    if (with_margins) {
        // bwd[t][y]: best score of the suffix after t given label y at t
        // (transitions out of t and emissions at t+1..T-1).
        std::vector<std::vector<double>> bwd(T, std::vector<double>(L, 0.0));
        for (std::size_t t = T - 1; t > 0; --t) {
            for (int y = 0; y < L; ++y) {
                double b = -std::numeric_limits<double>::infinity();
                for (int n = 0; n < L; ++n) {
                    double cand = model.transition(y, n);
                    add_emissions(model, feats[t], n, cand);
                    cand += bwd[t][n];
                    if (cand > b) b = cand;
                }
                bwd[t - 1][y] = b;
            }
        }
        result.constrained.assign(T, std::vector<double>(L));
        for (std::size_t t = 0; t < T; ++t)
            for (int y = 0; y < L; ++y) result.constrained[t][y] = fwd[t][y] + bwd[t][y];
    }
    return result;
}

} // namespace detail

// Exact max-score decoding; ties prefer the lower label id at each choice point.
inline std::vector<int> viterbi(const Model& model, const Observation& obs) {
    return detail::decode_ids(model, detail::encode(model, obs), false).labels;
}

// Decoding plus per-position constrained best-path scores (for margins).
inline DecodeResult decode_with_margins(const Model& model, const Observation& obs) {
    return detail::decode_ids(model, detail::encode(model, obs), true);
}

struct TrainOptions {
    int epochs = 5;
    uint64_t seed = 1;
};

// Averaged structured perceptron. Weights stay integer-valued until the final
// averaging division, which makes the counter-based averaging exact.
inline Model train(const std::vector<std::string>& label_names, const std::vector<Example>& examples,
                   const TrainOptions& options = {}) {
    if (examples.empty()) throw DataError("train: empty training set");
    if (options.epochs < 1) throw DataError("train: epochs must be >= 1");

    Model model(label_names);
    model.ensure_transitions();
    const int L = static_cast<int>(model.num_labels());

    std::vector<std::vector<std::vector<int>>> encoded(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const Example& ex = examples[i];
        if (ex.observations.empty() || ex.observations.size() != ex.labels.size())
            throw DataError("train: example " + std::to_string(i) + " has mismatched or empty sequences");
        for (int y : ex.labels)
            if (y < 0 || y >= L) throw DataError("train: example " + std::to_string(i) + " has a label outside the label set");
        encoded[i].resize(ex.observations.size());
        for (std::size_t t = 0; t < ex.observations.size(); ++t)
            for (const auto& f : ex.observations[t]) encoded[i][t].push_back(model.intern_feature(f));
    }

    const std::size_t F = model.num_features();
    std::vector<double> e_acc(F * L, 0.0);      // sum of (step-1) * delta, emissions
    std::vector<double> t_acc(L * L, 0.0);      // same for transitions
    double steps = 0.0;

    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        // Explicit Fisher-Yates: std::shuffle is not bit-stable across standard libraries.
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t idx : order) {
            const Example& ex = examples[idx];
            steps += 1.0;
            std::vector<int> predicted = detail::decode_ids(model, encoded[idx], false).labels;
            if (predicted == ex.labels) continue;
            const double c = steps - 1.0;
            for (std::size_t t = 0; t < ex.labels.size(); ++t) {
                int gold = ex.labels[t];
                int pred = predicted[t];
                if (gold != pred) {
                    for (int f : encoded[idx][t]) {
                        model.emission(f, gold) += 1.0;
                        model.emission(f, pred) -= 1.0;
                        e_acc[static_cast<std::size_t>(f) * L + gold] += c;
                        e_acc[static_cast<std::size_t>(f) * L + pred] -= c;
                    }
                }
                if (t > 0) {
                    int gf = ex.labels[t - 1], pf = predicted[t - 1];
                    if (gf != gold || pf != pred) {
                        model.transition(gf, gold) += 1.0;
                        model.transition(pf, pred) -= 1.0;
                        t_acc[gf * L + gold] += c;
                        t_acc[pf * L + pred] -= c;
                    }
                }
            }
        }
    }

    // avg = (steps * w - acc) / steps; numerators are exact integers.
    for (std::size_t f = 0; f < F; ++f)
        for (int y = 0; y < L; ++y) {
            double& w = model.emission(static_cast<int>(f), y);
            w = (steps * w - e_acc[f * L + y]) / steps;
        }
    for (int p = 0; p < L; ++p)
        for (int y = 0; y < L; ++y) {
            double& w = model.transition(p, y);
            w = (steps * w - t_acc[p * L + y]) / steps;
        }
    return model;
}

// --- model file format -------------------------------------------------------
//
//   czcite-chaincrf 1 <L> <label...>
//   E <feature> <label-id> <weight>
//   T <from-id> <to-id> <weight>
//
// Weights print with %.17g so a save/load round trip reproduces bit-identical
// scores. Zero weights are omitted.

inline std::string serialize_model(const Model& model) {
    std::string out = std::string(kModelFormat) + " " + std::to_string(kModelVersion) + " " +
                      std::to_string(model.num_labels());
    for (const auto& l : model.label_names()) out += " " + l;
    out.push_back('\n');
    char buf[64];
    const int L = static_cast<int>(model.num_labels());
    for (std::size_t f = 0; f < model.num_features(); ++f) {
        for (int y = 0; y < L; ++y) {
            double w = model.emission(static_cast<int>(f), y);
            if (w == 0.0) continue;
            std::snprintf(buf, sizeof(buf), "%.17g", w);
            out += "E " + model.feature_names()[f] + " " + std::to_string(y) + " " + buf + "\n";
        }
    }
    for (int p = 0; p < L; ++p)
        for (int y = 0; y < L; ++y) {
            double w = model.transition(p, y);
            if (w == 0.0) continue;
            std::snprintf(buf, sizeof(buf), "%.17g", w);
            out += "T " + std::to_string(p) + " " + std::to_string(y) + " " + buf + "\n";
        }
    return out;
}

inline void save_model(const Model& model, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_model(model));
}

inline Model parse_model(const std::string& content, const std::string& context) {
    auto fail = [&](const std::string& msg) { throw DataError(context + ": " + msg); };

    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string line = content.substr(pos, (nl == std::string::npos ? content.size() : nl) - pos);
        if (!trim_view(line).empty()) lines.push_back(line);
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    if (lines.empty()) fail("empty model file (no version header found)");

    auto split = [](const std::string& line) {
        std::vector<std::string> parts;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && line[i] == ' ') ++i;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ') ++j;
            if (j > i) parts.push_back(line.substr(i, j - i));
            i = j;
        }
        return parts;
    };

    auto header = split(lines[0]);
    if (header.size() < 3 || header[0] != kModelFormat || header[1] != std::to_string(kModelVersion))
        fail("unsupported model version: found '" +
             (header.empty() ? std::string("<blank>") : header[0] + (header.size() > 1 ? " " + header[1] : "")) +
             "', expected '" + kModelFormat + " " + std::to_string(kModelVersion) + "'");
    std::size_t num_labels = 0;
    try {
        num_labels = std::stoul(header[2]);
    } catch (const std::exception&) {
        fail("bad label count in header");
    }
    if (num_labels == 0 || header.size() != 3 + num_labels) fail("truncated label list in header");

    Model model(std::vector<std::string>(header.begin() + 3, header.end()));
    model.ensure_transitions();
    const int L = static_cast<int>(num_labels);

    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto parts = split(lines[i]);
        auto line_fail = [&](const std::string& msg) {
            fail("line " + std::to_string(i + 1) + ": " + msg);
        };
        if (parts.size() != 4) line_fail("expected 4 fields (truncated file?)");
        char* endp = nullptr;
        double w = std::strtod(parts[3].c_str(), &endp);
        if (endp == nullptr || *endp != '\0') line_fail("bad weight value");
        if (parts[0] == "E") {
            int y = std::atoi(parts[2].c_str());
            if (y < 0 || y >= L) line_fail("emission label id out of range");
            int f = model.intern_feature(parts[1]);
            model.emission(f, y) = w;
        } else if (parts[0] == "T") {
            int p = std::atoi(parts[1].c_str());
            int y = std::atoi(parts[2].c_str());
            if (p < 0 || p >= L || y < 0 || y >= L) line_fail("transition label id out of range");
            model.transition(p, y) = w;
        } else {
            line_fail("unknown record kind '" + parts[0] + "'");
        }
    }
    return model;
}

inline Model load_model(const std::filesystem::path& path) {
    return parse_model(read_file(path), path.string());
}

} // namespace czcite::crf

#pragma once

// Token-level recognition of court-identifier spans inside argumentation text,
// built on the generic sequence labeler with BIO coding.

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "czcite/chaincrf.hpp"
#include "czcite/common.hpp"
#include "czcite/corpus.hpp"
#include "czcite/normalizer.hpp"
#include "czcite/text.hpp"

namespace czcite {

// Label order puts O first so an untrained (all-zero) model predicts no spans.
inline const std::vector<std::string>& bio_labels() {
    static const std::vector<std::string> labels = {"O", "B", "I"};
    return labels;
}

enum class BioTag : int { O = 0, B = 1, I = 2 };

struct Token {
    std::string text;
    CharRange range; // byte offsets into the enclosing document
};

namespace detail {

// Punctuation that splits off token edges; '.' and '/' never do, so
// abbreviations ("sp.", "zn.") and number/year tokens stay whole.
inline bool is_edge_punct(uint32_t cp) {
    return !cp_is_letter(cp) && !(cp < 128 && is_ascii_digit(static_cast<char>(cp))) &&
           cp != '.' && cp != '/';
}

} // namespace detail

// Whitespace-delimited chunks, with punctuation other than '.' and '/' peeled
// off both edges as single-codepoint tokens. Ranges are byte offsets shifted
// by `base`; concatenating token texts with the gaps reproduces the slice.
inline std::vector<Token> tokenize(std::string_view slice, std::size_t base = 0) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < slice.size()) {
        while (i < slice.size() && is_ascii_space(slice[i])) ++i;
        std::size_t start = i;
        while (i < slice.size() && !is_ascii_space(slice[i])) ++i;
        if (i == start) continue;

        // codepoint boundaries inside the chunk
        std::vector<std::size_t> cps; // offsets; sentinel end appended
        std::vector<uint32_t> vals;
        std::size_t p = start;
        while (p < i) {
            std::size_t len;
            vals.push_back(utf8_decode(slice, p, len));
            cps.push_back(p);
            p += len;
        }
        cps.push_back(i);

        std::size_t first = 0, last = vals.size();
        while (first < vals.size() && detail::is_edge_punct(vals[first])) ++first;
        while (last > first && detail::is_edge_punct(vals[last - 1])) --last;

        auto emit = [&](std::size_t cb, std::size_t ce) {
            tokens.push_back({std::string(slice.substr(cps[cb], cps[ce] - cps[cb])),
                              {base + cps[cb], base + cps[ce]}});
        };
        for (std::size_t k = 0; k < first; ++k) emit(k, k + 1);
        if (first < last) emit(first, last);
        for (std::size_t k = last; k < vals.size(); ++k) emit(k, k + 1);
    }
    return tokens;
}

inline bool is_digit_slash(const std::string& s) {
    std::size_t slash = s.find('/');
    if (slash == 0 || slash == std::string::npos) return false;
    for (std::size_t i = 0; i < slash; ++i)
        if (!is_ascii_digit(s[i])) return false;
    std::size_t year = s.size() - slash - 1;
    if (year < 2 || year > 4) return false;
    for (std::size_t i = slash + 1; i < s.size(); ++i)
        if (!is_ascii_digit(s[i])) return false;
    return true;
}

// Per-token feature bundles: word identity in a +-1 window (lowercased),
// compressed shape, registry-mark flags for the window, the number/year
// pattern, and a clamped position bucket.
inline crf::Observation featurize_tokens(const std::vector<Token>& tokens,
                                         const RegistryTable& registry) {
    crf::Observation obs;
    obs.reserve(tokens.size());
    std::vector<bool> is_mark(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) is_mark[t] = registry.contains(tokens[t].text);

    for (std::size_t t = 0; t < tokens.size(); ++t) {
        crf::FeatureBundle f;
        f.push_back("w0=" + to_lower(tokens[t].text));
        f.push_back("w-1=" + (t > 0 ? to_lower(tokens[t - 1].text) : std::string("<bos>")));
        f.push_back("w+1=" + (t + 1 < tokens.size() ? to_lower(tokens[t + 1].text) : std::string("<eos>")));
        f.push_back("shape=" + token_shape(tokens[t].text));
        if (is_mark[t]) f.push_back("mark0");
        if (t > 0 && is_mark[t - 1]) f.push_back("mark-1");
        if (t + 1 < tokens.size() && is_mark[t + 1]) f.push_back("mark+1");
        if (is_digit_slash(tokens[t].text)) f.push_back("dslash");
        f.push_back("pos=" + std::to_string(t < 3 ? t : 3));
        obs.push_back(std::move(f));
    }
    return obs;
}

// BIO decoding over token indices; an I without a preceding B or I opens a new
// span (treated as B).
inline std::vector<std::pair<std::size_t, std::size_t>> bio_decode(const std::vector<BioTag>& tags) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t open = tags.size(); // sentinel: none
    for (std::size_t t = 0; t < tags.size(); ++t) {
        if (tags[t] == BioTag::B || (tags[t] == BioTag::I && open == tags.size())) {
            if (open != tags.size()) spans.emplace_back(open, t);
            open = t;
        } else if (tags[t] == BioTag::O) {
            if (open != tags.size()) spans.emplace_back(open, t);
            open = tags.size();
        }
    }
    if (open != tags.size()) spans.emplace_back(open, tags.size());
    return spans;
}

// Token-index spans -> BIO tags; spans must be sorted and disjoint.
inline std::vector<BioTag> bio_encode(std::size_t n_tokens,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& spans) {
    std::vector<BioTag> tags(n_tokens, BioTag::O);
    std::size_t prev_end = 0;
    for (const auto& [b, e] : spans) {
        if (b >= e || e > n_tokens || b < prev_end)
            throw DataError("bio_encode: spans must be sorted, disjoint, in range");
        tags[b] = BioTag::B;
        for (std::size_t t = b + 1; t < e; ++t) tags[t] = BioTag::I;
        prev_end = e;
    }
    return tags;
}

struct IdentifierSpan {
    std::string doc_id;
    CharRange range;
    std::string raw_text;
    double margin = 0.0; // decode-score drop when the span's first tag is flipped
};

namespace detail {

inline void check_bio_model(const crf::Model& model) {
    if (model.num_labels() != 3 || model.label_id("O") != 0 || model.label_id("B") != 1 ||
        model.label_id("I") != 2)
        throw DataError("recognizer model must have labels O,B,I in that order");
}

} // namespace detail

// Runs the labeler over each text range of a document and returns recognized
// spans with byte ranges into the full document text.
inline std::vector<IdentifierSpan> recognize(const crf::Model& model, const Document& doc,
                                             const std::vector<CharRange>& ranges,
                                             const RegistryTable& registry) {
    detail::check_bio_model(model);
    std::vector<IdentifierSpan> spans;
    for (const CharRange& range : ranges) {
        if (range.end > doc.text.size() || range.begin > range.end)
            throw DataError("recognize: range out of bounds in doc '" + doc.doc_id + "'");
        auto tokens = tokenize(std::string_view(doc.text).substr(range.begin, range.end - range.begin),
                               range.begin);
        if (tokens.empty()) continue;
        auto obs = featurize_tokens(tokens, registry);
        auto dec = crf::decode_with_margins(model, obs);

        std::vector<BioTag> tags(dec.labels.size());
        for (std::size_t t = 0; t < dec.labels.size(); ++t) tags[t] = static_cast<BioTag>(dec.labels[t]);

        for (const auto& [tb, te] : bio_decode(tags)) {
            IdentifierSpan span;
            span.doc_id = doc.doc_id;
            span.range = {tokens[tb].range.begin, tokens[te - 1].range.end};
            span.raw_text = doc.text.substr(span.range.begin, span.range.end - span.range.begin);
            double best = dec.constrained[tb][dec.labels[tb]];
            double runner = -std::numeric_limits<double>::infinity();
            for (int y = 0; y < 3; ++y)
                if (y != dec.labels[tb] && dec.constrained[tb][y] > runner)
                    runner = dec.constrained[tb][y];
            span.margin = best - runner;
            spans.push_back(std::move(span));
        }
    }
    return spans;
}

} // namespace czcite

#pragma once

// Paragraph-level document segmentation: one binary labeler per segment type,
// claims resolved by margin, gaps inherited from the previous paragraph.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "czcite/chaincrf.hpp"
#include "czcite/common.hpp"
#include "czcite/corpus.hpp"
#include "czcite/io.hpp"
#include "czcite/text.hpp"

namespace czcite {

// Declaration order is the tie-break priority when claims have equal margins.
enum class SegmentType : int {
    Header = 0,
    History,
    SubmissionRejoinder,
    Argumentation,
    Footer,
    Dissent,
    Footnotes,
};

inline constexpr int kNumSegmentTypes = 7;

inline const char* segment_type_name(SegmentType t) {
    switch (t) {
        case SegmentType::Header: return "Header";
        case SegmentType::History: return "History";
        case SegmentType::SubmissionRejoinder: return "SubmissionRejoinder";
        case SegmentType::Argumentation: return "Argumentation";
        case SegmentType::Footer: return "Footer";
        case SegmentType::Dissent: return "Dissent";
        case SegmentType::Footnotes: return "Footnotes";
    }
    return "Header";
}

inline SegmentType parse_segment_type(const std::string& s) {
    for (int i = 0; i < kNumSegmentTypes; ++i)
        if (s == segment_type_name(static_cast<SegmentType>(i))) return static_cast<SegmentType>(i);
    throw DataError("unknown segment type '" + s + "'");
}

// Binary per-type labels; O first so an all-zero model claims nothing.
inline const std::vector<std::string>& segment_labels() {
    static const std::vector<std::string> labels = {"O", "SEG"};
    return labels;
}

struct Segment {
    SegmentType type = SegmentType::Header;
    std::size_t para_begin = 0, para_end = 0; // paragraph-index range, half-open
    CharRange chars;                          // byte range covering those paragraphs
};

// Cue phrases with a tag, matched lowercased as substrings of a paragraph.
// File format: one `<tag> <phrase>` per line, '#' comments allowed.
class CueLexicon {
public:
    struct Entry {
        std::string tag;
        std::string phrase; // already lowercased
    };

    static CueLexicon from_lines(const std::string& content, const std::string& context) {
        CueLexicon lex;
        std::size_t line_no = 0, pos = 0;
        while (pos <= content.size()) {
            std::size_t nl = content.find('\n', pos);
            std::string line = content.substr(pos, (nl == std::string::npos ? content.size() : nl) - pos);
            ++line_no;
            std::string t = trim(line);
            if (!t.empty() && t[0] != '#') {
                std::size_t sp = t.find(' ');
                if (sp == std::string::npos || sp + 1 >= t.size())
                    throw DataError(context + ":" + std::to_string(line_no) +
                                    ": expected '<tag> <phrase>'");
                lex.entries_.push_back({t.substr(0, sp), to_lower(trim(t.substr(sp + 1)))});
            }
            if (nl == std::string::npos) break;
            pos = nl + 1;
        }
        return lex;
    }

    static CueLexicon load(const std::filesystem::path& path) {
        return from_lines(read_file(path), path.string());
    }

    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

namespace detail {

inline std::string first_token_shape(std::string_view para) {
    std::size_t i = 0;
    while (i < para.size() && is_ascii_space(para[i])) ++i;
    std::size_t j = i;
    while (j < para.size() && !is_ascii_space(para[j])) ++j;
    return token_shape(para.substr(i, j - i));
}

inline int length_bucket(std::size_t bytes) {
    if (bytes < 40) return 0;
    if (bytes < 120) return 1;
    if (bytes < 300) return 2;
    if (bytes < 700) return 3;
    return 4;
}

} // namespace detail

// One feature bundle per paragraph: position decile, length bucket, leading
// token shape, fired cue tags, digit and uppercase density buckets.
inline crf::Observation featurize_paragraphs(const Document& doc, const CueLexicon& cues) {
    if (doc.paragraphs.empty())
        throw DataError("featurize_paragraphs: doc '" + doc.doc_id + "' has no paragraphs");
    crf::Observation obs;
    obs.reserve(doc.paragraphs.size());
    const std::size_t n = doc.paragraphs.size();

    for (std::size_t i = 0; i < n; ++i) {
        std::string_view para = std::string_view(doc.text).substr(
            doc.paragraphs[i].begin, doc.paragraphs[i].end - doc.paragraphs[i].begin);
        std::string low = to_lower(std::string(para));

        crf::FeatureBundle f;
        f.push_back("posq=" + std::to_string(i * 10 / n));
        f.push_back("len=" + std::to_string(detail::length_bucket(para.size())));
        f.push_back("lead=" + detail::first_token_shape(para));

        std::vector<std::string> fired;
        for (const auto& entry : cues.entries()) {
            if (low.find(entry.phrase) == std::string::npos) continue;
            std::string feat = "cue=" + entry.tag;
            bool dup = false;
            for (const auto& g : fired)
                if (g == feat) dup = true;
            if (!dup) fired.push_back(feat);
        }
        for (auto& feat : fired) f.push_back(std::move(feat));

        std::size_t digits = 0, uppers = 0, letters = 0, cps = 0;
        std::size_t p = 0;
        while (p < para.size()) {
            std::size_t len;
            uint32_t cp = utf8_decode(para, p, len);
            ++cps;
            if (cp < 128 && is_ascii_digit(static_cast<char>(cp))) ++digits;
            if (cp_is_letter(cp)) {
                ++letters;
                if (cp_is_upper(cp)) ++uppers;
            }
            p += len;
        }
        double digit_ratio = cps ? static_cast<double>(digits) / cps : 0.0;
        double upper_ratio = letters ? static_cast<double>(uppers) / letters : 0.0;
        int db = digits == 0 ? 0 : digit_ratio < 0.05 ? 1 : digit_ratio < 0.15 ? 2 : 3;
        int ub = upper_ratio < 0.05 ? 0 : upper_ratio < 0.2 ? 1 : upper_ratio < 0.6 ? 2 : 3;
        f.push_back("digits=" + std::to_string(db));
        f.push_back("upper=" + std::to_string(ub));
        obs.push_back(std::move(f));
    }
    return obs;
}

struct SegmenterModels {
    std::array<crf::Model, kNumSegmentTypes> models;

    const crf::Model& for_type(SegmentType t) const { return models[static_cast<int>(t)]; }
};

namespace detail {

inline void check_segment_model(const crf::Model& model, SegmentType t) {
    if (model.num_labels() != 2 || model.label_id("O") != 0 || model.label_id("SEG") != 1)
        throw DataError(std::string("segmenter model for ") + segment_type_name(t) +
                        " must have labels O,SEG in that order");
}

} // namespace detail

// Composes the seven per-type labelers into a total segmentation: each type
// claims paragraphs it labels SEG, the highest-margin claim wins (enum order
// breaks ties), unclaimed paragraphs inherit the previous type, and adjacent
// same-type paragraphs merge.
inline std::vector<Segment> segment_document(const SegmenterModels& models, const Document& doc,
                                             const CueLexicon& cues) {
    if (doc.paragraphs.empty()) return {};
    const std::size_t n = doc.paragraphs.size();
    crf::Observation obs = featurize_paragraphs(doc, cues);

    std::vector<std::array<bool, kNumSegmentTypes>> claimed(n);
    std::vector<std::array<double, kNumSegmentTypes>> margin(n);
    for (int ty = 0; ty < kNumSegmentTypes; ++ty) {
        const crf::Model& model = models.models[ty];
        detail::check_segment_model(model, static_cast<SegmentType>(ty));
        crf::DecodeResult dec = crf::decode_with_margins(model, obs);
        for (std::size_t i = 0; i < n; ++i) {
            claimed[i][ty] = dec.labels[i] == 1;
            margin[i][ty] = dec.constrained[i][1] - dec.constrained[i][0];
        }
    }

    std::vector<int> assigned(n);
    for (std::size_t i = 0; i < n; ++i) {
        int best = -1;
        double best_margin = 0.0;
        for (int ty = 0; ty < kNumSegmentTypes; ++ty) {
            if (!claimed[i][ty]) continue;
            if (best == -1 || margin[i][ty] > best_margin) {
                best = ty;
                best_margin = margin[i][ty];
            }
        }
        if (best == -1) best = i > 0 ? assigned[i - 1] : static_cast<int>(SegmentType::Header);
        assigned[i] = best;
    }

    std::vector<Segment> segments;
    for (std::size_t i = 0; i < n; ++i) {
        if (!segments.empty() && static_cast<int>(segments.back().type) == assigned[i]) {
            segments.back().para_end = i + 1;
            segments.back().chars.end = doc.paragraphs[i].end;
        } else {
            segments.push_back({static_cast<SegmentType>(assigned[i]), i, i + 1,
                                {doc.paragraphs[i].begin, doc.paragraphs[i].end}});
        }
    }
    return segments;
}

// Byte ranges of the argumentation paragraphs (recognition never looks at the
// other segment types).
inline std::vector<CharRange> argumentation_ranges(const std::vector<Segment>& segments,
                                                   const Document& doc) {
    std::vector<CharRange> ranges;
    for (const auto& seg : segments) {
        if (seg.type != SegmentType::Argumentation) continue;
        for (std::size_t i = seg.para_begin; i < seg.para_end; ++i)
            ranges.push_back(doc.paragraphs[i]);
    }
    return ranges;
}

} // namespace czcite

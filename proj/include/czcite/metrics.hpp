#pragma once

// Span-level precision/recall/F1 under strict and overlap matching, plus the
// end-to-end evaluation that runs segmentation + recognition against gold
// spans.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "czcite/common.hpp"
#include "czcite/corpus.hpp"
#include "czcite/io.hpp"
#include "czcite/recognizer.hpp"
#include "czcite/segmenter.hpp"

namespace czcite {

struct LabeledSpan {
    std::string doc_id;
    CharRange range;
    std::string label = "court_identifier";

    bool operator==(const LabeledSpan&) const = default;
};

enum class MatchMode { Strict, Overlap };

struct EvalReport {
    MatchMode mode = MatchMode::Strict;
    uint64_t tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

namespace detail {

inline bool spans_match(const LabeledSpan& gold, const LabeledSpan& pred, MatchMode mode) {
    if (gold.doc_id != pred.doc_id || gold.label != pred.label) return false;
    if (mode == MatchMode::Strict) return gold.range == pred.range;
    return gold.range.begin < pred.range.end && pred.range.begin < gold.range.end;
}

inline void sort_and_check(std::vector<LabeledSpan>& spans, const char* which) {
    std::stable_sort(spans.begin(), spans.end(), [](const LabeledSpan& a, const LabeledSpan& b) {
        if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
        if (a.range.begin != b.range.begin) return a.range.begin < b.range.begin;
        return a.range.end < b.range.end;
    });
    for (std::size_t i = 0; i + 1 < spans.size(); ++i) {
        if (spans[i].doc_id != spans[i + 1].doc_id) continue;
        if (spans[i + 1].range.begin < spans[i].range.end)
            throw DataError(std::string(which) + " spans overlap within doc '" + spans[i].doc_id + "'");
    }
}

} // namespace detail

inline double f1_score(double precision, double recall) {
    return (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

// Greedy one-to-one matching in ascending start order; each gold span matches
// at most one prediction. Empty denominators score zero.
inline EvalReport evaluate_spans(std::vector<LabeledSpan> gold, std::vector<LabeledSpan> predicted,
                                 MatchMode mode) {
    detail::sort_and_check(gold, "gold");
    detail::sort_and_check(predicted, "predicted");

    EvalReport report;
    report.mode = mode;
    std::vector<bool> matched(gold.size(), false);
    for (const auto& pred : predicted) {
        bool hit = false;
        for (std::size_t j = 0; j < gold.size() && !hit; ++j) {
            if (matched[j] || !detail::spans_match(gold[j], pred, mode)) continue;
            matched[j] = true;
            hit = true;
        }
        if (hit)
            ++report.tp;
        else
            ++report.fp;
    }
    report.fn = gold.size() - report.tp;
    report.precision = (report.tp + report.fp) ? static_cast<double>(report.tp) / (report.tp + report.fp) : 0.0;
    report.recall = (report.tp + report.fn) ? static_cast<double>(report.tp) / (report.tp + report.fn) : 0.0;
    report.f1 = f1_score(report.precision, report.recall);
    return report;
}

struct PipelineEval {
    EvalReport strict;
    EvalReport overlap;
    std::size_t documents = 0;
    std::size_t predicted = 0;
};

// Segments every document, recognizes identifiers in the argumentation text,
// and scores the result against gold spans.
inline PipelineEval evaluate_pipeline(const Corpus& corpus, const SegmenterModels& seg_models,
                                      const CueLexicon& cues, const crf::Model& rec_model,
                                      const RegistryTable& registry,
                                      const std::vector<LabeledSpan>& gold) {
    std::vector<LabeledSpan> predicted;
    for (const auto& doc : corpus) {
        auto segments = segment_document(seg_models, doc, cues);
        auto ranges = argumentation_ranges(segments, doc);
        for (const auto& span : recognize(rec_model, doc, ranges, registry))
            predicted.push_back({span.doc_id, span.range, "court_identifier"});
    }
    PipelineEval eval;
    eval.documents = corpus.size();
    eval.predicted = predicted.size();
    eval.strict = evaluate_spans(gold, predicted, MatchMode::Strict);
    eval.overlap = evaluate_spans(gold, predicted, MatchMode::Overlap);
    return eval;
}

inline std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

inline std::string render_eval_text(const PipelineEval& eval) {
    std::string out;
    out += "documents: " + std::to_string(eval.documents) + "\n";
    out += "predicted_spans: " + std::to_string(eval.predicted) + "\n";
    for (const EvalReport* r : {&eval.strict, &eval.overlap}) {
        out += (r->mode == MatchMode::Strict ? "strict" : "overlap");
        out += ": precision=" + format_metric(r->precision) + " recall=" + format_metric(r->recall) +
               " f1=" + format_metric(r->f1) + " tp=" + std::to_string(r->tp) +
               " fp=" + std::to_string(r->fp) + " fn=" + std::to_string(r->fn) + "\n";
    }
    return out;
}

inline ojson eval_report_json(const EvalReport& r) {
    ojson j;
    j["mode"] = r.mode == MatchMode::Strict ? "strict" : "overlap";
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["tp"] = r.tp;
    j["fp"] = r.fp;
    j["fn"] = r.fn;
    return j;
}

inline ojson render_eval_json(const PipelineEval& eval) {
    ojson j;
    j["documents"] = eval.documents;
    j["predicted_spans"] = eval.predicted;
    j["strict"] = eval_report_json(eval.strict);
    j["overlap"] = eval_report_json(eval.overlap);
    return j;
}

} // namespace czcite

#pragma once

// Batch orchestration: run configuration, the per-stage entry points shared by
// the CLI subcommands, and the full pipeline. Stages communicate only through
// files in out_dir, and `pipeline` calls the same stage functions the
// subcommands do, so composing stages by hand gives byte-identical artifacts.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "czcite/chaincrf.hpp"
#include "czcite/common.hpp"
#include "czcite/corpus.hpp"
#include "czcite/csv.hpp"
#include "czcite/io.hpp"
#include "czcite/linker.hpp"
#include "czcite/metrics.hpp"
#include "czcite/normalizer.hpp"
#include "czcite/recognizer.hpp"
#include "czcite/segmenter.hpp"
#include "czcite/text.hpp"

namespace czcite {

struct PipelineConfig {
    std::filesystem::path manifest;
    std::filesystem::path registry;
    std::filesystem::path cue_lexicon;
    std::filesystem::path model_dir; // segmenter + recognizer model files
    std::filesystem::path out_dir;   // all stage artifacts
    std::filesystem::path gold_segments;
    std::filesystem::path gold_spans;
    int workers = 1;
    uint64_t seed = 1;
    int epochs = 5;
    double margin_threshold = 0.5;
    std::string paragraph_mode = "auto";

    std::filesystem::path seg_model_path(SegmentType t) const {
        return model_dir / (std::string("seg_") + segment_type_name(t) + ".model");
    }
    std::filesystem::path recognizer_model_path() const { return model_dir / "recognizer.model"; }
    std::filesystem::path artifact(const char* name) const { return out_dir / name; }
};

// `key = value` lines; '#' comments; unknown keys rejected.
inline void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value,
                               const std::string& context) {
    auto to_int = [&](int lo) {
        try {
            std::size_t used = 0;
            int v = std::stoi(value, &used);
            if (used != value.size() || v < lo) throw std::invalid_argument("range");
            return v;
        } catch (const std::exception&) {
            throw ConfigError(context + ": bad value for " + key + ": '" + value + "'");
        }
    };
    if (key == "manifest") cfg.manifest = value;
    else if (key == "registry") cfg.registry = value;
    else if (key == "cue_lexicon") cfg.cue_lexicon = value;
    else if (key == "model_dir") cfg.model_dir = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "gold_segments") cfg.gold_segments = value;
    else if (key == "gold_spans") cfg.gold_spans = value;
    else if (key == "workers") cfg.workers = to_int(1);
    else if (key == "epochs") cfg.epochs = to_int(1);
    else if (key == "seed") {
        try {
            std::size_t used = 0;
            unsigned long long v = std::stoull(value, &used);
            if (used != value.size()) throw std::invalid_argument("trailing");
            cfg.seed = v;
        } catch (const std::exception&) {
            throw ConfigError(context + ": bad value for seed: '" + value + "'");
        }
    } else if (key == "margin_threshold") {
        try {
            std::size_t used = 0;
            double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument("trailing");
            cfg.margin_threshold = v;
        } catch (const std::exception&) {
            throw ConfigError(context + ": bad value for margin_threshold: '" + value + "'");
        }
    } else if (key == "paragraph_mode") {
        parse_paragraph_mode(value); // validates
        cfg.paragraph_mode = value;
    } else {
        throw ConfigError(context + ": unknown config key '" + key + "'");
    }
}

inline void load_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
    std::string content;
    try {
        content = read_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    std::size_t pos = 0, line_no = 0;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string line = content.substr(pos, (nl == std::string::npos ? content.size() : nl) - pos);
        ++line_no;
        pos = (nl == std::string::npos) ? content.size() + 1 : nl + 1;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        apply_config_entry(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)),
                           path.string() + ":" + std::to_string(line_no));
    }
}

namespace detail {

inline void require_file(const std::filesystem::path& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string(what) + " is not configured");
    if (!std::filesystem::exists(p))
        throw ConfigError(std::string(what) + " not found: " + p.string());
}

inline void require_out_dir(const PipelineConfig& cfg) {
    if (cfg.out_dir.empty()) throw ConfigError("out_dir is not configured");
    std::filesystem::create_directories(cfg.out_dir);
}

// Removes the collected files unless commit() was called; keeps stage output
// all-or-nothing even though individual writes are already atomic.
class WrittenFiles {
public:
    ~WrittenFiles() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : paths_) std::filesystem::remove(p, ec);
    }
    void add(const std::filesystem::path& p) { paths_.push_back(p); }
    void commit() { committed_ = true; }
    const std::vector<std::filesystem::path>& paths() const { return paths_; }

private:
    std::vector<std::filesystem::path> paths_;
    bool committed_ = false;
};

// Index-parallel map; fn(i) runs exactly once per index, results must be
// stored by index so output order is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    threads.reserve(count);
    for (std::size_t i = 0; i < count; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline Corpus load_configured_corpus(const PipelineConfig& cfg) {
    require_file(cfg.manifest, "manifest");
    return load_corpus(cfg.manifest, parse_paragraph_mode(cfg.paragraph_mode));
}

inline RegistryTable load_configured_registry(const PipelineConfig& cfg) {
    require_file(cfg.registry, "registry");
    return RegistryTable::load(cfg.registry);
}

inline SegmenterModels load_segmenter_models(const PipelineConfig& cfg) {
    SegmenterModels models;
    for (int ty = 0; ty < kNumSegmentTypes; ++ty) {
        SegmentType t = static_cast<SegmentType>(ty);
        std::filesystem::path p = cfg.seg_model_path(t);
        if (!std::filesystem::exists(p))
            throw ConfigError(std::string("segmenter model for ") + segment_type_name(t) +
                              " not found: " + p.string());
        models.models[ty] = crf::load_model(p);
        check_segment_model(models.models[ty], t);
    }
    return models;
}

inline crf::Model load_recognizer_model(const PipelineConfig& cfg) {
    std::filesystem::path p = cfg.recognizer_model_path();
    if (!std::filesystem::exists(p)) throw ConfigError("recognizer model not found: " + p.string());
    crf::Model model = crf::load_model(p);
    check_bio_model(model);
    return model;
}

inline std::filesystem::path require_artifact(const PipelineConfig& cfg, const char* name,
                                              const char* producer) {
    std::filesystem::path p = cfg.artifact(name);
    if (!std::filesystem::exists(p))
        throw ConfigError(std::string(name) + " not found in out_dir (run '" + producer +
                          "' first): " + p.string());
    return p;
}

} // namespace detail

// --- gold files -----------------------------------------------------------------

struct GoldSegmentRow {
    std::string doc_id;
    SegmentType type;
    std::size_t para_begin, para_end;
};

inline std::vector<GoldSegmentRow> load_gold_segments(const std::filesystem::path& path) {
    std::vector<GoldSegmentRow> rows;
    for (const auto& [line, row] : read_jsonl_rows(path)) {
        std::string where = path.string() + ":" + std::to_string(line);
        GoldSegmentRow g;
        g.doc_id = json_string(row, "doc_id", where);
        g.type = parse_segment_type(json_string(row, "type", where));
        g.para_begin = json_size(row, "para_begin", where);
        g.para_end = json_size(row, "para_end", where);
        if (g.para_begin >= g.para_end) throw DataError(where + ": empty paragraph range");
        rows.push_back(std::move(g));
    }
    return rows;
}

inline std::vector<LabeledSpan> load_gold_spans(const std::filesystem::path& path) {
    std::vector<LabeledSpan> spans;
    for (const auto& [line, row] : read_jsonl_rows(path)) {
        std::string where = path.string() + ":" + std::to_string(line);
        LabeledSpan s;
        s.doc_id = json_string(row, "doc_id", where);
        s.range.begin = json_size(row, "char_start", where);
        s.range.end = json_size(row, "char_end", where);
        if (s.range.begin >= s.range.end) throw DataError(where + ": empty span");
        spans.push_back(std::move(s));
    }
    return spans;
}

// --- stages ---------------------------------------------------------------------

inline std::vector<std::filesystem::path> run_ingest(const PipelineConfig& cfg) {
    Corpus corpus = detail::load_configured_corpus(cfg);
    RegistryTable registry = detail::load_configured_registry(cfg);
    detail::require_out_dir(cfg);
    DocketIndex index = build_index(corpus, registry);

    std::size_t paragraphs = 0;
    Date min_date, max_date;
    bool any = false;
    for (const auto& doc : corpus) {
        paragraphs += doc.paragraphs.size();
        if (!any || doc.date < min_date) min_date = doc.date;
        if (!any || max_date < doc.date) max_date = doc.date;
        any = true;
    }

    ojson summary;
    summary["documents"] = corpus.size();
    ojson by_court;
    by_court["SC"] = corpus.count(CourtClass::SC);
    by_court["SAC"] = corpus.count(CourtClass::SAC);
    by_court["CC"] = corpus.count(CourtClass::CC);
    summary["by_court"] = by_court;
    summary["date_min"] = any ? min_date.to_string() : "";
    summary["date_max"] = any ? max_date.to_string() : "";
    summary["paragraphs"] = paragraphs;
    summary["index_entries"] = index.canonical_to_doc.size();
    ojson warnings = ojson::array();
    for (const auto& w : index.warnings) {
        ojson j;
        j["kind"] = w.kind;
        j["doc_id"] = w.doc_id;
        j["detail"] = w.detail;
        warnings.push_back(j);
    }
    summary["index_warnings"] = warnings;

    detail::WrittenFiles files;
    std::filesystem::path out = cfg.artifact("corpus_summary.json");
    write_file_atomic(out, summary.dump(2) + "\n");
    files.add(out);
    files.commit();
    return files.paths();
}

inline std::vector<std::filesystem::path> run_segment(const PipelineConfig& cfg) {
    Corpus corpus = detail::load_configured_corpus(cfg);
    detail::require_file(cfg.cue_lexicon, "cue_lexicon");
    CueLexicon cues = CueLexicon::load(cfg.cue_lexicon);
    SegmenterModels models = detail::load_segmenter_models(cfg);
    detail::require_out_dir(cfg);

    std::vector<std::vector<Segment>> per_doc(corpus.size());
    detail::parallel_for(corpus.size(), cfg.workers, [&](std::size_t i) {
        per_doc[i] = segment_document(models, corpus.at(i), cues);
    });

    std::vector<std::pair<std::string, ojson>> rows; // (doc_id) for sorting; para order kept
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (const auto& seg : per_doc[i]) {
            ojson j;
            j["doc_id"] = corpus.at(i).doc_id;
            j["type"] = segment_type_name(seg.type);
            j["para_begin"] = seg.para_begin;
            j["para_end"] = seg.para_end;
            j["char_start"] = seg.chars.begin;
            j["char_end"] = seg.chars.end;
            rows.emplace_back(corpus.at(i).doc_id, std::move(j));
        }
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<ojson> out_rows;
    out_rows.reserve(rows.size());
    for (auto& [_, j] : rows) out_rows.push_back(std::move(j));

    detail::WrittenFiles files;
    std::filesystem::path out = cfg.artifact("segments.jsonl");
    write_file_atomic(out, to_jsonl(out_rows));
    files.add(out);
    files.commit();
    return files.paths();
}

inline std::vector<std::filesystem::path> run_recognize(const PipelineConfig& cfg) {
    Corpus corpus = detail::load_configured_corpus(cfg);
    RegistryTable registry = detail::load_configured_registry(cfg);
    crf::Model model = detail::load_recognizer_model(cfg);
    detail::require_out_dir(cfg);
    std::filesystem::path seg_path = detail::require_artifact(cfg, "segments.jsonl", "segment");

    // argumentation paragraph ranges per document
    std::map<std::string, std::vector<CharRange>> arg_ranges;
    for (const auto& [line, row] : read_jsonl_rows(seg_path)) {
        std::string where = seg_path.string() + ":" + std::to_string(line);
        if (json_string(row, "type", where) != "Argumentation") continue;
        std::string doc_id = json_string(row, "doc_id", where);
        const Document* doc = corpus.find(doc_id);
        if (!doc) throw DataError(where + ": unknown doc_id '" + doc_id + "'");
        std::size_t pb = json_size(row, "para_begin", where), pe = json_size(row, "para_end", where);
        if (pe > doc->paragraphs.size() || pb >= pe)
            throw DataError(where + ": paragraph range out of bounds");
        for (std::size_t p = pb; p < pe; ++p) arg_ranges[doc_id].push_back(doc->paragraphs[p]);
    }

    std::vector<const Document*> docs;
    for (const auto& [doc_id, _] : arg_ranges) docs.push_back(corpus.find(doc_id));

    std::vector<std::vector<IdentifierSpan>> per_doc(docs.size());
    detail::parallel_for(docs.size(), cfg.workers, [&](std::size_t i) {
        per_doc[i] = recognize(model, *docs[i], arg_ranges.at(docs[i]->doc_id), registry);
    });

    std::vector<ojson> rows;
    for (const auto& spans : per_doc) {
        for (const auto& s : spans) {
            ojson j;
            j["doc_id"] = s.doc_id;
            j["char_start"] = s.range.begin;
            j["char_end"] = s.range.end;
            j["raw_text"] = s.raw_text;
            j["margin"] = s.margin;
            rows.push_back(std::move(j));
        }
    }

    detail::WrittenFiles files;
    std::filesystem::path out = cfg.artifact("spans.jsonl");
    write_file_atomic(out, to_jsonl(rows));
    files.add(out);
    files.commit();
    return files.paths();
}

inline std::vector<std::filesystem::path> run_normalize(const PipelineConfig& cfg) {
    Corpus corpus = detail::load_configured_corpus(cfg);
    RegistryTable registry = detail::load_configured_registry(cfg);
    detail::require_out_dir(cfg);
    std::filesystem::path spans_path = detail::require_artifact(cfg, "spans.jsonl", "recognize");

    struct SpanRow {
        std::string doc_id;
        CharRange range;
        double margin;
    };
    std::vector<SpanRow> spans;
    for (const auto& [line, row] : read_jsonl_rows(spans_path)) {
        std::string where = spans_path.string() + ":" + std::to_string(line);
        SpanRow s;
        s.doc_id = json_string(row, "doc_id", where);
        s.range.begin = json_size(row, "char_start", where);
        s.range.end = json_size(row, "char_end", where);
        s.margin = json_field(row, "margin", where).get<double>();
        if (!corpus.contains(s.doc_id)) throw DataError(where + ": unknown doc_id '" + s.doc_id + "'");
        spans.push_back(std::move(s));
    }

    RepairConfig repair_cfg;
    repair_cfg.margin_threshold = cfg.margin_threshold;

    struct MentionRow {
        ojson mention;
        ojson review;
        bool needs_review;
    };
    std::vector<MentionRow> out(spans.size());
    detail::parallel_for(spans.size(), cfg.workers, [&](std::size_t i) {
        const SpanRow& s = spans[i];
        const Document& doc = *corpus.find(s.doc_id);
        if (s.range.end > doc.text.size() || s.range.begin >= s.range.end)
            throw DataError("normalize: span out of bounds in doc '" + s.doc_id + "'");
        RepairResult rep = repair_span(s.range, s.margin, doc.text, registry, repair_cfg);
        NormalizationOutcome outcome = parse_identifier(rep.repaired, registry);

        ojson m;
        m["doc_id"] = s.doc_id;
        m["char_start"] = rep.range.begin;
        m["char_end"] = rep.range.end;
        m["raw_text"] = rep.repaired;
        m["outcome"] = outcome_kind_name(outcome.kind);
        m["court"] = outcome.is_canonical() ? court_name(outcome.canonical.court)
                                            : (outcome.kind == NormalizationOutcome::Kind::OtherCourt
                                                   ? "OTHER"
                                                   : "");
        m["canonical"] = outcome.is_canonical() ? format_identifier(outcome.canonical) : "";
        m["reason"] = outcome.reason;
        bool review = rep.needs_review || outcome.needs_review;
        m["needs_review"] = review;
        m["margin"] = s.margin;
        out[i].mention = std::move(m);
        out[i].needs_review = review;
        if (review) {
            ojson r;
            r["doc_id"] = s.doc_id;
            r["char_start"] = rep.range.begin;
            r["char_end"] = rep.range.end;
            r["raw_text"] = rep.repaired;
            ojson reasons = ojson::array();
            for (const auto& reason : rep.reasons) reasons.push_back(reason);
            if (!outcome.is_canonical() && outcome.kind == NormalizationOutcome::Kind::Unparseable)
                reasons.push_back("unparseable: " + outcome.reason);
            r["reasons"] = reasons;
            r["margin"] = s.margin;
            out[i].review = std::move(r);
        }
    });

    auto row_key = [](const ojson& j) {
        return std::pair<std::string, std::size_t>(j.at("doc_id").get<std::string>(),
                                                   j.at("char_start").get<std::size_t>());
    };
    std::vector<ojson> mentions, reviews;
    for (auto& r : out) {
        mentions.push_back(std::move(r.mention));
        if (r.needs_review) reviews.push_back(std::move(r.review));
    }
    std::stable_sort(mentions.begin(), mentions.end(),
                     [&](const ojson& a, const ojson& b) { return row_key(a) < row_key(b); });
    std::stable_sort(reviews.begin(), reviews.end(),
                     [&](const ojson& a, const ojson& b) { return row_key(a) < row_key(b); });

    detail::WrittenFiles files;
    std::filesystem::path mentions_path = cfg.artifact("mentions.jsonl");
    write_file_atomic(mentions_path, to_jsonl(mentions));
    files.add(mentions_path);
    std::filesystem::path review_path = cfg.artifact("review_queue.jsonl");
    write_file_atomic(review_path, to_jsonl(reviews));
    files.add(review_path);
    files.commit();
    return files.paths();
}

inline std::vector<std::filesystem::path> run_link(const PipelineConfig& cfg) {
    Corpus corpus = detail::load_configured_corpus(cfg);
    RegistryTable registry = detail::load_configured_registry(cfg);
    detail::require_out_dir(cfg);
    std::filesystem::path mentions_path = detail::require_artifact(cfg, "mentions.jsonl", "normalize");

    // standardized docket of each citing document, for self-citation flags
    std::map<std::string, std::string> own_canonical;
    for (const auto& doc : corpus) {
        NormalizationOutcome o = parse_identifier(doc.docket, registry);
        if (o.is_canonical()) own_canonical[doc.doc_id] = format_identifier(o.canonical);
    }

    std::vector<CitationEdge> edges;
    for (const auto& [line, row] : read_jsonl_rows(mentions_path)) {
        std::string where = mentions_path.string() + ":" + std::to_string(line);
        std::string doc_id = json_string(row, "doc_id", where);
        if (!corpus.contains(doc_id)) throw DataError(where + ": unknown doc_id '" + doc_id + "'");
        CharRange range{json_size(row, "char_start", where), json_size(row, "char_end", where)};
        std::string raw = json_string(row, "raw_text", where);
        std::string kind = json_string(row, "outcome", where);

        CitationEdge edge;
        edge.citing_doc_id = doc_id;
        edge.range = range;
        edge.raw_text = raw;
        if (kind == "canonical") {
            edge.kind = NormalizationOutcome::Kind::Canonical;
            edge.cited_court = parse_court(json_string(row, "court", where));
            edge.cited_canonical = json_string(row, "canonical", where);
            auto it = own_canonical.find(doc_id);
            edge.self_citation = it != own_canonical.end() && it->second == edge.cited_canonical;
        } else if (kind == "other_court") {
            edge.kind = NormalizationOutcome::Kind::OtherCourt;
        } else if (kind == "unparseable") {
            edge.kind = NormalizationOutcome::Kind::Unparseable;
        } else {
            throw DataError(where + ": unknown outcome '" + kind + "'");
        }
        edges.push_back(std::move(edge));
    }

    DocketIndex index = build_index(corpus, registry);
    edges = link_edges(std::move(edges), index);

    detail::WrittenFiles files;
    std::filesystem::path edges_path = cfg.artifact("edges.csv");
    write_file_atomic(edges_path, export_edges_csv(edges));
    files.add(edges_path);
    std::filesystem::path graph_path = cfg.artifact("graph.csv");
    write_file_atomic(graph_path, export_graph_csv(edges));
    files.add(graph_path);
    files.commit();
    return files.paths();
}

inline std::vector<CitationEdge> read_edges_csv(const std::filesystem::path& path) {
    auto table = csv_parse(read_file(path));
    if (table.empty() || table[0] != std::vector<std::string>{"citing_doc_id", "char_start", "char_end",
                                                              "raw_text", "outcome", "cited_court",
                                                              "cited_canonical", "resolved_doc_id",
                                                              "self_citation"})
        throw DataError(path.string() + ": unexpected edges.csv header");
    std::vector<CitationEdge> edges;
    for (std::size_t i = 1; i < table.size(); ++i) {
        const auto& row = table[i];
        std::string where = path.string() + ": row " + std::to_string(i);
        if (row.size() != 9) throw DataError(where + ": expected 9 fields");
        CitationEdge e;
        e.citing_doc_id = row[0];
        try {
            e.range = {std::stoull(row[1]), std::stoull(row[2])};
        } catch (const std::exception&) {
            throw DataError(where + ": bad char range");
        }
        e.raw_text = row[3];
        if (row[4] == "canonical") e.kind = NormalizationOutcome::Kind::Canonical;
        else if (row[4] == "other_court") e.kind = NormalizationOutcome::Kind::OtherCourt;
        else if (row[4] == "unparseable") e.kind = NormalizationOutcome::Kind::Unparseable;
        else throw DataError(where + ": unknown outcome '" + row[4] + "'");
        if (e.kind == NormalizationOutcome::Kind::Canonical) e.cited_court = parse_court(row[5]);
        e.cited_canonical = row[6];
        e.resolved_doc_id = row[7];
        e.self_citation = row[8] == "1";
        edges.push_back(std::move(e));
    }
    return edges;
}

inline std::vector<std::filesystem::path> run_stats(const PipelineConfig& cfg) {
    Corpus corpus = detail::load_configured_corpus(cfg);
    detail::require_out_dir(cfg);
    std::filesystem::path edges_path = detail::require_artifact(cfg, "edges.csv", "link");
    std::vector<CitationEdge> edges = read_edges_csv(edges_path);
    CitationMatrix matrix = citation_matrix(edges, corpus);

    detail::WrittenFiles files;
    std::filesystem::path report_path = cfg.artifact("matrix_report.txt");
    write_file_atomic(report_path, render_matrix_text(matrix));
    files.add(report_path);
    std::filesystem::path json_path = cfg.artifact("matrix.json");
    write_file_atomic(json_path, render_matrix_json(matrix).dump(2) + "\n");
    files.add(json_path);
    files.commit();
    return files.paths();
}

inline std::vector<std::filesystem::path> run_eval(const PipelineConfig& cfg) {
    Corpus corpus = detail::load_configured_corpus(cfg);
    RegistryTable registry = detail::load_configured_registry(cfg);
    detail::require_file(cfg.cue_lexicon, "cue_lexicon");
    CueLexicon cues = CueLexicon::load(cfg.cue_lexicon);
    SegmenterModels seg_models = detail::load_segmenter_models(cfg);
    crf::Model rec_model = detail::load_recognizer_model(cfg);
    detail::require_file(cfg.gold_spans, "gold_spans");
    std::vector<LabeledSpan> gold = load_gold_spans(cfg.gold_spans);
    detail::require_out_dir(cfg);

    PipelineEval eval = evaluate_pipeline(corpus, seg_models, cues, rec_model, registry, gold);

    detail::WrittenFiles files;
    std::filesystem::path text_path = cfg.artifact("eval_report.txt");
    write_file_atomic(text_path, render_eval_text(eval));
    files.add(text_path);
    std::filesystem::path json_path = cfg.artifact("eval_report.json");
    write_file_atomic(json_path, render_eval_json(eval).dump(2) + "\n");
    files.add(json_path);
    files.commit();
    return files.paths();
}

// --- training -------------------------------------------------------------------

inline std::vector<std::filesystem::path> run_train_segmenter(const PipelineConfig& cfg) {
    Corpus corpus = detail::load_configured_corpus(cfg);
    detail::require_file(cfg.cue_lexicon, "cue_lexicon");
    CueLexicon cues = CueLexicon::load(cfg.cue_lexicon);
    detail::require_file(cfg.gold_segments, "gold_segments");
    auto gold = load_gold_segments(cfg.gold_segments);
    if (cfg.model_dir.empty()) throw ConfigError("model_dir is not configured");
    std::filesystem::create_directories(cfg.model_dir);

    // per-doc paragraph type assignment; must be a partition
    std::map<std::string, std::vector<int>> assignment;
    for (const auto& doc : corpus) assignment[doc.doc_id].assign(doc.paragraphs.size(), -1);
    for (const auto& g : gold) {
        auto it = assignment.find(g.doc_id);
        if (it == assignment.end())
            throw DataError("gold_segments: unknown doc_id '" + g.doc_id + "'");
        if (g.para_end > it->second.size())
            throw DataError("gold_segments: range out of bounds for doc '" + g.doc_id + "'");
        for (std::size_t p = g.para_begin; p < g.para_end; ++p) {
            if (it->second[p] != -1)
                throw DataError("gold_segments: overlapping segments in doc '" + g.doc_id + "'");
            it->second[p] = static_cast<int>(g.type);
        }
    }
    for (const auto& [doc_id, types] : assignment)
        for (std::size_t p = 0; p < types.size(); ++p)
            if (types[p] == -1)
                throw DataError("gold_segments: paragraph " + std::to_string(p) + " of doc '" +
                                doc_id + "' is not covered");

    std::vector<crf::Observation> observations;
    std::vector<const std::vector<int>*> doc_types;
    for (const auto& doc : corpus) {
        if (doc.paragraphs.empty()) continue;
        observations.push_back(featurize_paragraphs(doc, cues));
        doc_types.push_back(&assignment.at(doc.doc_id));
    }

    detail::WrittenFiles files;
    crf::TrainOptions options;
    options.epochs = cfg.epochs;
    for (int ty = 0; ty < kNumSegmentTypes; ++ty) {
        std::vector<crf::Example> examples;
        for (std::size_t d = 0; d < observations.size(); ++d) {
            crf::Example ex;
            ex.observations = observations[d];
            ex.labels.reserve(doc_types[d]->size());
            for (int t : *doc_types[d]) ex.labels.push_back(t == ty ? 1 : 0); // SEG : O
            examples.push_back(std::move(ex));
        }
        options.seed = cfg.seed + static_cast<uint64_t>(ty);
        crf::Model model = crf::train(segment_labels(), examples, options);
        std::filesystem::path out = cfg.seg_model_path(static_cast<SegmentType>(ty));
        crf::save_model(model, out);
        files.add(out);
    }
    files.commit();
    return files.paths();
}

inline std::vector<std::filesystem::path> run_train_recognizer(const PipelineConfig& cfg) {
    Corpus corpus = detail::load_configured_corpus(cfg);
    RegistryTable registry = detail::load_configured_registry(cfg);
    detail::require_file(cfg.gold_spans, "gold_spans");
    std::vector<LabeledSpan> gold = load_gold_spans(cfg.gold_spans);
    if (cfg.model_dir.empty()) throw ConfigError("model_dir is not configured");
    std::filesystem::create_directories(cfg.model_dir);

    std::map<std::string, std::vector<CharRange>> by_doc;
    for (const auto& s : gold) {
        if (!corpus.contains(s.doc_id))
            throw DataError("gold_spans: unknown doc_id '" + s.doc_id + "'");
        by_doc[s.doc_id].push_back(s.range);
    }

    // one training sequence per paragraph; gold spans must align with token
    // boundaries and stay inside one paragraph
    std::vector<crf::Example> examples;
    for (const auto& doc : corpus) {
        auto spans_it = by_doc.find(doc.doc_id);
        const std::vector<CharRange>* doc_spans = spans_it == by_doc.end() ? nullptr : &spans_it->second;
        for (const CharRange& para : doc.paragraphs) {
            auto tokens = tokenize(std::string_view(doc.text).substr(para.begin, para.size()),
                                   para.begin);
            if (tokens.empty()) continue;
            std::vector<std::pair<std::size_t, std::size_t>> tok_spans;
            if (doc_spans) {
                for (const CharRange& span : *doc_spans) {
                    if (span.end <= para.begin || span.begin >= para.end) continue;
                    if (span.begin < para.begin || span.end > para.end)
                        throw DataError("gold_spans: span crosses paragraph boundary in doc '" +
                                        doc.doc_id + "'");
                    std::size_t tb = tokens.size(), te = 0;
                    for (std::size_t t = 0; t < tokens.size(); ++t) {
                        if (tokens[t].range.begin == span.begin) tb = t;
                        if (tokens[t].range.end == span.end) te = t + 1;
                    }
                    if (tb >= tokens.size() || te == 0 || tb >= te)
                        throw DataError("gold_spans: span not token-aligned in doc '" + doc.doc_id +
                                        "' at byte " + std::to_string(span.begin));
                    tok_spans.emplace_back(tb, te);
                }
                std::sort(tok_spans.begin(), tok_spans.end());
            }
            crf::Example ex;
            ex.observations = featurize_tokens(tokens, registry);
            for (BioTag tag : bio_encode(tokens.size(), tok_spans))
                ex.labels.push_back(static_cast<int>(tag));
            examples.push_back(std::move(ex));
        }
    }
    if (examples.empty()) throw DataError("train-recognizer: no training sequences");

    crf::TrainOptions options;
    options.epochs = cfg.epochs;
    options.seed = cfg.seed;
    crf::Model model = crf::train(bio_labels(), examples, options);

    detail::WrittenFiles files;
    std::filesystem::path out = cfg.recognizer_model_path();
    crf::save_model(model, out);
    files.add(out);
    files.commit();
    return files.paths();
}

// Ingest through stats; removes everything it wrote if any stage fails.
inline std::vector<std::filesystem::path> run_pipeline(const PipelineConfig& cfg) {
    detail::WrittenFiles files;
    for (auto stage : {run_ingest, run_segment, run_recognize, run_normalize, run_link, run_stats})
        for (const auto& p : stage(cfg)) files.add(p);
    files.commit();
    return files.paths();
}

} // namespace czcite

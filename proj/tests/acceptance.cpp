// Acceptance gate: six independent end-to-end checks, each printing exactly
// one PASS/FAIL line. The process exit status is the number of failed checks,
// so `ctest` treats any red line as a failure.
//
//   1. decode optimality      — Viterbi equals exhaustive search on random models
//   2. metric definitions     — frozen fixture + greedy vs. maximum matching
//   3. docket grammar         — frozen variant fixture + parse/format round-trip
//   4. golden pipeline run    — byte-identical artifacts across runs and workers
//   5. recognizer learnability— strict F1 on held-out synthetic documents
//   6. segmenter partition    — structural invariants on synthetic documents

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "czcite/chaincrf.hpp"
#include "czcite/csv.hpp"
#include "czcite/io.hpp"
#include "czcite/metrics.hpp"
#include "czcite/normalizer.hpp"
#include "czcite/pipeline.hpp"
#include "czcite/recognizer.hpp"
#include "czcite/segmenter.hpp"

#include "support/matching_oracle.hpp"
#include "support/metrics_fixture.hpp"
#include "support/synthetic.hpp"
#include "support/testutil.hpp"

namespace {

using czcite::CourtClass;
using czcite::EvalReport;
using czcite::LabeledSpan;
using czcite::MatchMode;
using testutil::repo_path;
using testutil::scratch_dir;

class Timer {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt_secs(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", s);
    return buf;
}

// --- 1. Viterbi decoding reaches the exhaustive-enumeration maximum ---------

bool check_decode_optimality(std::string& detail) {
    Timer timer;
    std::mt19937_64 rng(20260815);
    for (int i = 0; i < 500; ++i) {
        auto style = (i % 2 == 0) ? testutil::WeightStyle::Dyadic : testutil::WeightStyle::Mixed;
        testutil::RandomCase rc = testutil::random_case(rng, style);
        double brute = testutil::enumerate_best(rc.model, rc.obs);
        std::vector<int> labels = czcite::crf::viterbi(rc.model, rc.obs);
        double got = czcite::crf::score(rc.model, rc.obs, labels);
        if (got != brute) {
            detail = "case " + std::to_string(i) + ": viterbi path scores " + std::to_string(got) +
                     ", exhaustive maximum is " + std::to_string(brute);
            return false;
        }
    }
    double secs = timer.seconds();
    if (secs >= 10.0) {
        detail = "correct but too slow: " + fmt_secs(secs) + " (budget 10 s)";
        return false;
    }
    detail = "500/500 random labelers decode to the exhaustive maximum (" + fmt_secs(secs) + ")";
    return true;
}

// --- 2. Span metrics match the frozen fixture and the matching oracle -------

bool check_metrics(std::string& detail) {
    const auto& cases = testutil::metrics_fixture_cases();
    if (cases.size() != 12) {
        detail = "expected the 12-case fixture, found " + std::to_string(cases.size());
        return false;
    }
    for (const testutil::MetricsCase& mc : cases) {
        EvalReport strict = czcite::evaluate_spans(mc.gold, mc.predicted, MatchMode::Strict);
        EvalReport overlap = czcite::evaluate_spans(mc.gold, mc.predicted, MatchMode::Overlap);
        if (strict.tp != mc.strict_tp || strict.fp != mc.strict_fp || strict.fn != mc.strict_fn ||
            overlap.tp != mc.overlap_tp || overlap.fp != mc.overlap_fp ||
            overlap.fn != mc.overlap_fn) {
            detail = "fixture case '" + mc.name + "' disagrees with the hand-computed counts";
            return false;
        }
    }

    std::mt19937_64 rng(9118);
    for (int i = 0; i < 1000; ++i) {
        auto gold = testutil::random_disjoint_spans(rng, "doc");
        auto pred = testutil::random_disjoint_spans(rng, "doc");
        EvalReport strict = czcite::evaluate_spans(gold, pred, MatchMode::Strict);
        EvalReport overlap = czcite::evaluate_spans(gold, pred, MatchMode::Overlap);
        if (overlap.tp < strict.tp) {
            detail = "random set " + std::to_string(i) + ": overlap tp " +
                     std::to_string(overlap.tp) + " < strict tp " + std::to_string(strict.tp);
            return false;
        }
        uint64_t best_strict = testutil::max_matching(gold, pred, MatchMode::Strict);
        uint64_t best_overlap = testutil::max_matching(gold, pred, MatchMode::Overlap);
        if (strict.tp != best_strict || overlap.tp != best_overlap) {
            detail = "random set " + std::to_string(i) + ": greedy matching is not maximum (" +
                     std::to_string(strict.tp) + "/" + std::to_string(best_strict) + " strict, " +
                     std::to_string(overlap.tp) + "/" + std::to_string(best_overlap) + " overlap)";
            return false;
        }
    }
    detail = "12-case fixture exact; 1000 random sets: overlap tp >= strict tp and greedy equals "
             "maximum matching";
    return true;
}

// --- 3. Docket grammar fixture + canonical round-trip -----------------------

bool check_grammar(std::string& detail) {
    czcite::RegistryTable table = czcite::RegistryTable::load(repo_path("data/registry.txt"));
    auto rows = czcite::read_jsonl(repo_path("tests/data/grammar_cases.jsonl"));
    if (rows.size() < 50) {
        detail = "grammar fixture has only " + std::to_string(rows.size()) + " cases (need >= 50)";
        return false;
    }
    for (const auto& row : rows) {
        std::string input = czcite::json_string(row, "input", "grammar_cases");
        std::string expect = czcite::json_string(row, "expect", "grammar_cases");
        czcite::NormalizationOutcome out = czcite::parse_identifier(input, table);
        if (czcite::outcome_kind_name(out.kind) != expect) {
            detail = "\"" + input + "\" parsed as " + czcite::outcome_kind_name(out.kind) +
                     ", fixture says " + expect;
            return false;
        }
        if (out.is_canonical() &&
            czcite::format_identifier(out.canonical) !=
                czcite::json_string(row, "canonical", "grammar_cases")) {
            detail = "\"" + input + "\" canonicalized to \"" +
                     czcite::format_identifier(out.canonical) + "\"";
            return false;
        }
    }

    static const std::vector<std::string> sc_marks = {"Cdo", "Odo", "Tdo", "Td",
                                                      "Nd",  "Cz",  "NSČR"};
    static const std::vector<std::string> sac_marks = {"As",  "Afs", "Azs", "Ads",
                                                       "Ans", "Aps", "Ars"};
    static const std::vector<std::string> cc_senates = {"I", "II", "III", "IV", "Pl"};
    std::mt19937_64 rng(5150);
    for (int i = 0; i < 1000; ++i) {
        czcite::CanonicalIdentifier c;
        switch (rng() % 3) {
            case 0:
                c.court = CourtClass::SC;
                c.senate = std::to_string(1 + rng() % 9999);
                c.registry_mark = sc_marks[rng() % sc_marks.size()];
                break;
            case 1:
                c.court = CourtClass::SAC;
                c.senate = std::to_string(1 + rng() % 9999);
                c.registry_mark = sac_marks[rng() % sac_marks.size()];
                break;
            default:
                c.court = CourtClass::CC;
                c.senate = cc_senates[rng() % cc_senates.size()];
                c.registry_mark = "ÚS";
                break;
        }
        c.number = 1 + static_cast<uint32_t>(rng() % 9999999);
        c.year = 1990 + static_cast<int>(rng() % 111);
        std::string rendered = czcite::format_identifier(c);
        czcite::NormalizationOutcome out = czcite::parse_identifier(rendered, table);
        if (!out.is_canonical() || !(out.canonical == c)) {
            detail = "round-trip failed for \"" + rendered + "\"";
            return false;
        }
    }
    detail = std::to_string(rows.size()) +
             "-case fixture exact; 1000 random canonical identifiers round-trip";
    return true;
}

// --- 4. Golden mini-corpus pipeline run --------------------------------------

bool check_golden_run(std::string& detail) {
    Timer timer;
    czcite::PipelineConfig cfg;
    cfg.manifest = repo_path("data/minicorpus/manifest.jsonl");
    cfg.registry = repo_path("data/registry.txt");
    cfg.cue_lexicon = repo_path("data/cue_lexicon.txt");
    cfg.model_dir = repo_path("data/golden/models");

    struct Run {
        const char* name;
        int workers;
    };
    const Run runs[] = {{"acceptance_run_a", 1}, {"acceptance_run_b", 1}, {"acceptance_run_c", 4}};
    std::vector<std::filesystem::path> out_dirs;
    for (const Run& run : runs) {
        cfg.out_dir = scratch_dir(run.name);
        cfg.workers = run.workers;
        czcite::run_pipeline(cfg);
        out_dirs.push_back(cfg.out_dir);
    }

    const char* compared[] = {"edges.csv", "graph.csv", "matrix_report.txt", "review_queue.jsonl"};
    for (const char* name : compared) {
        std::string first = czcite::read_file(out_dirs[0] / name);
        for (std::size_t r = 1; r < out_dirs.size(); ++r) {
            if (czcite::read_file(out_dirs[r] / name) != first) {
                detail = std::string(name) + " differs between run 1 (workers 1) and run " +
                         std::to_string(r + 1) + " (workers " + std::to_string(runs[r].workers) +
                         ")";
                return false;
            }
        }
    }

    // Shape of the committed corpus: 20 documents, 31 citation mentions, 7 of
    // them deliberately unresolvable (no resolved document id in the edge list).
    czcite::ojson summary =
        czcite::ojson::parse(czcite::read_file(out_dirs[0] / "corpus_summary.json"));
    if (summary.at("documents").get<int>() != 20) {
        detail = "corpus has " + summary.at("documents").dump() + " documents, expected 20";
        return false;
    }
    auto edges = czcite::csv_parse(czcite::read_file(out_dirs[0] / "edges.csv"), "edges.csv");
    std::size_t mentions = edges.size() - 1; // minus header row
    std::size_t unresolved = 0;
    for (std::size_t r = 1; r < edges.size(); ++r)
        if (edges[r][7].empty()) ++unresolved;
    if (mentions != 31 || unresolved != 7) {
        detail = "edge list has " + std::to_string(mentions) + " mentions / " +
                 std::to_string(unresolved) + " unresolved, expected 31 / 7";
        return false;
    }

    czcite::ojson matrix = czcite::ojson::parse(czcite::read_file(out_dirs[0] / "matrix.json"));
    for (const char* citing : {"SC", "SAC", "CC"})
        for (const char* cited : {"SC", "SAC", "CC"}) {
            uint64_t linked = matrix.at("linked").at(citing).at(cited).get<uint64_t>();
            uint64_t unlinked = matrix.at("unlinked").at(citing).at(cited).get<uint64_t>();
            if (linked > unlinked) {
                detail = std::string("matrix cell ") + citing + "->" + cited + ": linked " +
                         std::to_string(linked) + " > unlinked " + std::to_string(unlinked);
                return false;
            }
        }

    double secs = timer.seconds();
    if (secs >= 10.0) {
        detail = "correct but too slow: " + fmt_secs(secs) + " (budget 10 s)";
        return false;
    }
    detail = "3 runs (workers 1/1/4) byte-identical; 20 docs, 31 mentions, 7 unresolved; "
             "linked <= unlinked cellwise (" +
             fmt_secs(secs) + ")";
    return true;
}

// --- 5. Recognizer learnability on synthetic documents -----------------------

bool check_recognizer_learnability(std::string& detail) {
    czcite::RegistryTable registry = czcite::RegistryTable::load(repo_path("data/registry.txt"));
    std::mt19937_64 rng(7321);

    // Exactly 200 labeled sentences: synthetic documents are cut into one
    // training sequence per paragraph, truncated once the budget is reached.
    std::vector<czcite::crf::Example> examples;
    int doc_index = 0;
    while (examples.size() < 200) {
        testutil::SyntheticDoc sd =
            testutil::synthetic_decision(rng, "train" + std::to_string(doc_index++));
        for (czcite::CharRange pr : sd.doc.paragraphs) {
            if (examples.size() == 200) break;
            auto tokens = czcite::tokenize(
                std::string_view(sd.doc.text).substr(pr.begin, pr.end - pr.begin), pr.begin);
            if (tokens.empty()) continue;
            std::vector<std::pair<std::size_t, std::size_t>> token_spans;
            for (const testutil::GoldCitation& cite : sd.citations) {
                if (cite.range.begin < pr.begin || cite.range.end > pr.end) continue;
                std::size_t tb = tokens.size(), te = 0;
                for (std::size_t t = 0; t < tokens.size(); ++t) {
                    if (tokens[t].range.begin == cite.range.begin) tb = t;
                    if (tokens[t].range.end == cite.range.end) te = t + 1;
                }
                if (tb == tokens.size() || te == 0 || tb >= te) {
                    detail = "synthetic citation not token-aligned in " + sd.doc.doc_id;
                    return false;
                }
                token_spans.push_back({tb, te});
            }
            czcite::crf::Example ex;
            ex.observations = czcite::featurize_tokens(tokens, registry);
            for (czcite::BioTag tag : czcite::bio_encode(tokens.size(), token_spans))
                ex.labels.push_back(static_cast<int>(tag));
            examples.push_back(std::move(ex));
        }
    }
    czcite::crf::TrainOptions options;
    options.epochs = 8;
    options.seed = 31;
    czcite::crf::Model model = czcite::crf::train(czcite::bio_labels(), examples, options);

    std::vector<LabeledSpan> gold, predicted;
    for (int i = 0; i < 40; ++i) {
        testutil::SyntheticDoc sd =
            testutil::synthetic_decision(rng, "heldout" + std::to_string(i));
        for (const testutil::GoldCitation& cite : sd.citations)
            gold.push_back({sd.doc.doc_id, cite.range, "court_identifier"});
        for (const czcite::IdentifierSpan& span :
             czcite::recognize(model, sd.doc, sd.doc.paragraphs, registry))
            predicted.push_back({span.doc_id, span.range, "court_identifier"});
    }
    EvalReport report = czcite::evaluate_spans(gold, predicted, MatchMode::Strict);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "trained on 200 sentences; held-out strict F1 %.4f (tp %llu, fp %llu, fn %llu; "
                  "threshold 0.90)",
                  report.f1, static_cast<unsigned long long>(report.tp),
                  static_cast<unsigned long long>(report.fp),
                  static_cast<unsigned long long>(report.fn));
    detail = buf;
    return report.f1 >= 0.90;
}

// --- 6. Segmenter output is always a clean partition -------------------------

bool check_segmenter_partition(std::string& detail) {
    czcite::CueLexicon cues = czcite::CueLexicon::load(repo_path("data/cue_lexicon.txt"));
    std::mt19937_64 rng(1843);
    std::vector<testutil::SyntheticDoc> train;
    for (int i = 0; i < 40; ++i)
        train.push_back(testutil::synthetic_decision(rng, "train" + std::to_string(i)));
    czcite::SegmenterModels models = testutil::train_segmenter_models(train, cues, 6, 17);

    std::size_t total_segments = 0;
    for (int i = 0; i < 100; ++i) {
        testutil::SyntheticDoc sd = testutil::synthetic_decision(rng, "doc" + std::to_string(i));
        std::vector<czcite::Segment> segments = czcite::segment_document(models, sd.doc, cues);
        const std::size_t n = sd.doc.paragraphs.size();
        std::string where = "document " + std::to_string(i);
        if (segments.empty() || segments.front().para_begin != 0 || segments.back().para_end != n) {
            detail = where + ": segments do not cover paragraphs [0, " + std::to_string(n) + ")";
            return false;
        }
        for (std::size_t k = 0; k < segments.size(); ++k) {
            if (segments[k].para_begin >= segments[k].para_end) {
                detail = where + ": empty segment at index " + std::to_string(k);
                return false;
            }
            if (k > 0 && segments[k].para_begin != segments[k - 1].para_end) {
                detail = where + ": gap or overlap before segment " + std::to_string(k);
                return false;
            }
            if (k > 0 && segments[k].type == segments[k - 1].type) {
                detail = where + ": adjacent segments share type " +
                         czcite::segment_type_name(segments[k].type);
                return false;
            }
            if (segments[k].chars.begin != sd.doc.paragraphs[segments[k].para_begin].begin ||
                segments[k].chars.end != sd.doc.paragraphs[segments[k].para_end - 1].end) {
                detail = where + ": segment byte range disagrees with paragraph bounds";
                return false;
            }
        }
        total_segments += segments.size();
    }
    detail = "100/100 synthetic documents cleanly partitioned (" +
             std::to_string(total_segments) + " segments, no adjacent duplicates)";
    return true;
}

int run_criterion(const char* name, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    std::printf("%s  %-24s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    return ok ? 0 : 1;
}

} // namespace

int main() {
    int failures = 0;
    failures += run_criterion("decode-optimality", check_decode_optimality);
    failures += run_criterion("metric-definitions", check_metrics);
    failures += run_criterion("docket-grammar", check_grammar);
    failures += run_criterion("golden-pipeline-run", check_golden_run);
    failures += run_criterion("recognizer-learnability", check_recognizer_learnability);
    failures += run_criterion("segmenter-partition", check_segmenter_partition);
    return failures;
}

#pragma once

// Citation edges: one per recognized mention, resolved against the docket
// index, aggregated into per-court matrices, exported as CSV.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "czcite/common.hpp"
#include "czcite/corpus.hpp"
#include "czcite/csv.hpp"
#include "czcite/io.hpp"
#include "czcite/normalizer.hpp"

namespace czcite {

struct CitationEdge {
    std::string citing_doc_id;
    CharRange range; // repaired span, byte offsets into the citing document
    std::string raw_text;
    NormalizationOutcome::Kind kind = NormalizationOutcome::Kind::Unparseable;
    CourtClass cited_court = CourtClass::Other; // apex court iff kind == Canonical
    std::string cited_canonical;                // standardized docket iff kind == Canonical
    std::string resolved_doc_id;                // set by linking when the target exists
    bool self_citation = false;                 // mention of the citing decision's own docket
};

inline CitationEdge make_edge(const std::string& citing_doc_id, CharRange range,
                              const std::string& raw_text, const NormalizationOutcome& outcome,
                              const std::string& citing_canonical = "") {
    CitationEdge edge;
    edge.citing_doc_id = citing_doc_id;
    edge.range = range;
    edge.raw_text = raw_text;
    edge.kind = outcome.kind;
    if (outcome.is_canonical()) {
        edge.cited_court = outcome.canonical.court;
        edge.cited_canonical = format_identifier(outcome.canonical);
        edge.self_citation = !citing_canonical.empty() && edge.cited_canonical == citing_canonical;
    }
    return edge;
}

// Fills resolved_doc_id for canonical edges whose target docket is indexed.
inline std::vector<CitationEdge> link_edges(std::vector<CitationEdge> edges, const DocketIndex& index) {
    for (auto& edge : edges) {
        edge.resolved_doc_id.clear();
        if (edge.kind != NormalizationOutcome::Kind::Canonical) continue;
        if (auto target = index.lookup(edge.cited_canonical)) edge.resolved_doc_id = *target;
    }
    return edges;
}

// Rows are the citing court (SC, SAC, CC); unlinked columns add a Rest bucket
// for non-apex targets, linked columns only count resolved apex targets.
struct CitationMatrix {
    std::array<std::array<uint64_t, 4>, 3> unlinked{}; // [citing][SC SAC CC Rest]
    std::array<std::array<uint64_t, 3>, 3> linked{};   // [citing][SC SAC CC]
    uint64_t unparseable = 0;

    uint64_t unlinked_total() const {
        uint64_t n = 0;
        for (const auto& row : unlinked)
            for (uint64_t v : row) n += v;
        return n;
    }
    uint64_t linked_total() const {
        uint64_t n = 0;
        for (const auto& row : linked)
            for (uint64_t v : row) n += v;
        return n;
    }
};

inline int court_index(CourtClass c) {
    switch (c) {
        case CourtClass::SC: return 0;
        case CourtClass::SAC: return 1;
        case CourtClass::CC: return 2;
        case CourtClass::Other: return 3;
    }
    return 3;
}

// Every edge lands in exactly one unlinked cell or the unparseable count, so
// totals are conserved: |edges| == unlinked_total + unparseable.
inline CitationMatrix citation_matrix(const std::vector<CitationEdge>& edges, const Corpus& corpus) {
    CitationMatrix m;
    for (const auto& edge : edges) {
        const Document* citing = corpus.find(edge.citing_doc_id);
        if (!citing)
            throw DataError("citation_matrix: citing doc '" + edge.citing_doc_id + "' not in corpus");
        int row = court_index(citing->court);
        if (row > 2)
            throw DataError("citation_matrix: citing doc '" + edge.citing_doc_id +
                            "' has non-apex court");
        switch (edge.kind) {
            case NormalizationOutcome::Kind::Unparseable:
                ++m.unparseable;
                break;
            case NormalizationOutcome::Kind::OtherCourt:
                ++m.unlinked[row][3];
                break;
            case NormalizationOutcome::Kind::Canonical: {
                int col = court_index(edge.cited_court);
                if (col > 2)
                    throw DataError("citation_matrix: canonical edge with non-apex target");
                ++m.unlinked[row][col];
                if (!edge.resolved_doc_id.empty()) ++m.linked[row][col];
                break;
            }
        }
    }
    return m;
}

inline const char* edge_kind_name(NormalizationOutcome::Kind k) { return outcome_kind_name(k); }

// One row per edge; RFC-4180 quoting. Columns: citing_doc_id, char_start,
// char_end, raw_text, outcome, cited_court, cited_canonical, resolved_doc_id,
// self_citation.
inline std::string export_edges_csv(const std::vector<CitationEdge>& edges) {
    std::string out;
    csv_append_row(out, {"citing_doc_id", "char_start", "char_end", "raw_text", "outcome",
                         "cited_court", "cited_canonical", "resolved_doc_id", "self_citation"});
    for (const auto& e : edges) {
        csv_append_row(out, {e.citing_doc_id, std::to_string(e.range.begin),
                             std::to_string(e.range.end), e.raw_text, edge_kind_name(e.kind),
                             e.kind == NormalizationOutcome::Kind::Canonical
                                 ? court_name(e.cited_court)
                                 : (e.kind == NormalizationOutcome::Kind::OtherCourt ? "OTHER" : ""),
                             e.cited_canonical, e.resolved_doc_id, e.self_citation ? "1" : "0"});
    }
    return out;
}

// Resolved citation graph: one row per edge with a known target document.
inline std::string export_graph_csv(const std::vector<CitationEdge>& edges) {
    std::string out;
    csv_append_row(out, {"citing_doc_id", "cited_doc_id", "cited_canonical", "self_citation"});
    for (const auto& e : edges) {
        if (e.resolved_doc_id.empty()) continue;
        csv_append_row(out, {e.citing_doc_id, e.resolved_doc_id, e.cited_canonical,
                             e.self_citation ? "1" : "0"});
    }
    return out;
}

inline std::string render_matrix_text(const CitationMatrix& m) {
    static const char* rows[] = {"SC", "SAC", "CC"};
    static const char* cols[] = {"SC", "SAC", "CC", "Rest"};
    std::string out;
    auto pad = [](const std::string& s, std::size_t w) {
        return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
    };
    out += "unlinked citations (rows cite columns)\n";
    out += pad("", 5);
    for (const char* c : cols) out += pad(c, 10);
    out += "\n";
    for (int r = 0; r < 3; ++r) {
        out += pad(rows[r], 5);
        for (int c = 0; c < 4; ++c) out += pad(std::to_string(m.unlinked[r][c]), 10);
        out += "\n";
    }
    out += "\nlinked citations (resolved targets only)\n";
    out += pad("", 5);
    for (int c = 0; c < 3; ++c) out += pad(cols[c], 10);
    out += "\n";
    for (int r = 0; r < 3; ++r) {
        out += pad(rows[r], 5);
        for (int c = 0; c < 3; ++c) out += pad(std::to_string(m.linked[r][c]), 10);
        out += "\n";
    }
    out += "\nunparseable: " + std::to_string(m.unparseable) + "\n";
    out += "totals: unlinked=" + std::to_string(m.unlinked_total()) +
           " linked=" + std::to_string(m.linked_total()) + "\n";
    return out;
}

inline ojson render_matrix_json(const CitationMatrix& m) {
    static const char* rows[] = {"SC", "SAC", "CC"};
    static const char* cols[] = {"SC", "SAC", "CC", "Rest"};
    ojson j;
    ojson unlinked;
    for (int r = 0; r < 3; ++r) {
        ojson row;
        for (int c = 0; c < 4; ++c) row[cols[c]] = m.unlinked[r][c];
        unlinked[rows[r]] = row;
    }
    ojson linked;
    for (int r = 0; r < 3; ++r) {
        ojson row;
        for (int c = 0; c < 3; ++c) row[cols[c]] = m.linked[r][c];
        linked[rows[r]] = row;
    }
    j["unlinked"] = unlinked;
    j["linked"] = linked;
    j["unparseable"] = m.unparseable;
    j["unlinked_total"] = m.unlinked_total();
    j["linked_total"] = m.linked_total();
    return j;
}

} // namespace czcite

#pragma once

// Corpus ingestion: a JSON-lines manifest describing one decision per row,
// document texts on disk, paragraph segmentation, and the docket index used
// for citation resolution.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "czcite/common.hpp"
#include "czcite/io.hpp"
#include "czcite/normalizer.hpp"
#include "czcite/text.hpp"

namespace czcite {

struct Document {
    std::string doc_id;
    CourtClass court = CourtClass::Other;
    std::string docket;
    Date date;
    std::string text;
    std::vector<CharRange> paragraphs;
};

class Corpus {
public:
    void add(Document doc) {
        if (by_id_.count(doc.doc_id))
            throw DataError("duplicate doc_id '" + doc.doc_id + "'");
        by_id_[doc.doc_id] = docs_.size();
        docs_.push_back(std::move(doc));
    }

    std::size_t size() const { return docs_.size(); }
    bool contains(const std::string& doc_id) const { return by_id_.count(doc_id) > 0; }

    const Document* find(const std::string& doc_id) const {
        auto it = by_id_.find(doc_id);
        return it == by_id_.end() ? nullptr : &docs_[it->second];
    }

    const Document& at(std::size_t i) const { return docs_.at(i); }
    auto begin() const { return docs_.begin(); }
    auto end() const { return docs_.end(); }

    std::size_t count(CourtClass court) const {
        std::size_t n = 0;
        for (const auto& d : docs_)
            if (d.court == court) ++n;
        return n;
    }

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

enum class ParagraphMode { Auto, Blank, Hard };

inline ParagraphMode parse_paragraph_mode(const std::string& s) {
    if (s == "auto") return ParagraphMode::Auto;
    if (s == "blank") return ParagraphMode::Blank;
    if (s == "hard") return ParagraphMode::Hard;
    throw ConfigError("paragraph_mode must be auto|blank|hard, got '" + s + "'");
}

namespace detail {

struct Line {
    std::size_t begin, end; // [begin, end) excluding the newline
    bool blank;
};

inline std::vector<Line> scan_lines(const std::string& text) {
    std::vector<Line> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::size_t end = (nl == std::string::npos) ? text.size() : nl;
        bool blank = true;
        for (std::size_t i = pos; i < end; ++i)
            if (!is_ascii_space(text[i])) blank = false;
        lines.push_back({pos, end, blank});
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return lines;
}

} // namespace detail

// Byte ranges of paragraphs, trimmed of surrounding whitespace, in document
// order. Blank-line separation is the primary rule; documents without any
// interior blank line fall back to breaking before lines that start with an
// uppercase letter or digit.
inline std::vector<CharRange> split_paragraphs(const std::string& text,
                                               ParagraphMode mode = ParagraphMode::Auto) {
    auto lines = detail::scan_lines(text);

    if (mode == ParagraphMode::Auto) {
        // A separator is a blank line with content both before and after it;
        // a trailing newline alone must not count.
        std::size_t first = lines.size(), last = 0;
        for (std::size_t i = 0; i < lines.size(); ++i)
            if (!lines[i].blank) {
                if (first == lines.size()) first = i;
                last = i;
            }
        bool separator = false;
        for (std::size_t i = first; first < lines.size() && i < last; ++i)
            if (lines[i].blank) separator = true;
        mode = separator ? ParagraphMode::Blank : ParagraphMode::Hard;
    }

    std::vector<CharRange> blocks;
    std::size_t block_begin = std::string::npos;
    std::size_t block_end = 0;

    auto flush = [&]() {
        if (block_begin == std::string::npos) return;
        std::size_t b = block_begin, e = block_end;
        while (b < e && is_ascii_space(text[b])) ++b;
        while (e > b && is_ascii_space(text[e - 1])) --e;
        if (b < e) blocks.push_back({b, e});
        block_begin = std::string::npos;
    };

    for (const auto& ln : lines) {
        if (ln.blank) {
            flush();
            continue;
        }
        if (mode == ParagraphMode::Hard && block_begin != std::string::npos &&
            starts_upper_or_digit(std::string_view(text).substr(ln.begin, ln.end - ln.begin)))
            flush();
        if (block_begin == std::string::npos) block_begin = ln.begin;
        block_end = ln.end;
    }
    flush();
    return blocks;
}

// Loads the manifest (one JSON object per line: doc_id, court, docket, date,
// file) and every referenced text file. Unknown manifest keys are ignored.
inline Corpus load_corpus(const std::filesystem::path& manifest_path,
                          ParagraphMode mode = ParagraphMode::Auto) {
    std::string content = read_file(manifest_path);
    std::filesystem::path base = manifest_path.parent_path();
    Corpus corpus;

    std::size_t pos = 0, line_no = 0;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::size_t end = (nl == std::string::npos) ? content.size() : nl;
        ++line_no;
        std::string line = content.substr(pos, end - pos);
        pos = (nl == std::string::npos) ? content.size() + 1 : nl + 1;

        std::string where = manifest_path.string() + ":" + std::to_string(line_no);
        if (trim(line).empty()) continue;

        ojson row;
        try {
            row = ojson::parse(line);
        } catch (const std::exception& e) {
            throw DataError(where + ": invalid JSON: " + e.what());
        }
        if (!row.is_object()) throw DataError(where + ": manifest row must be a JSON object");

        Document doc;
        try {
            doc.doc_id = json_string(row, "doc_id", where);
            std::string court = json_string(row, "court", where);
            doc.court = parse_court(court);
            if (doc.court == CourtClass::Other)
                throw DataError("'" + court + "' is not an issuing court");
            doc.docket = json_string(row, "docket", where);
            doc.date = parse_date(json_string(row, "date", where));
        } catch (const DataError& e) {
            std::string msg = e.what();
            throw DataError(msg.find(where) == 0 ? msg : where + ": " + msg);
        }

        std::filesystem::path file = base / json_string(row, "file", where);
        if (!std::filesystem::exists(file))
            throw DataError(where + ": doc '" + doc.doc_id + "': missing text file " + file.string());
        doc.text = read_file(file);
        doc.paragraphs = split_paragraphs(doc.text, mode);

        try {
            corpus.add(std::move(doc));
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
    }
    return corpus;
}

// --- docket index ---------------------------------------------------------------

struct IndexWarning {
    std::string kind; // unparseable_docket | court_mismatch | collision
    std::string doc_id;
    std::string detail;
};

struct DocketIndex {
    std::map<std::string, std::string> canonical_to_doc;
    std::vector<IndexWarning> warnings;

    std::optional<std::string> lookup(const std::string& canonical) const {
        auto it = canonical_to_doc.find(canonical);
        if (it == canonical_to_doc.end()) return std::nullopt;
        return it->second;
    }
};

// Maps each document's own docket (standardized) to its doc_id. Documents
// whose docket fails the grammar or contradicts the manifest court are
// excluded with a warning; canonical collisions keep the earliest decision
// (manifest order breaking date ties).
inline DocketIndex build_index(const Corpus& corpus, const RegistryTable& registry) {
    DocketIndex index;
    std::unordered_map<std::string, const Document*> holder;
    for (const auto& doc : corpus) {
        NormalizationOutcome outcome = parse_identifier(doc.docket, registry);
        if (!outcome.is_canonical()) {
            index.warnings.push_back({"unparseable_docket", doc.doc_id,
                                      outcome.kind == NormalizationOutcome::Kind::OtherCourt
                                          ? "docket has no apex-court registry mark"
                                          : outcome.reason});
            continue;
        }
        if (outcome.canonical.court != doc.court) {
            index.warnings.push_back({"court_mismatch", doc.doc_id,
                                      "docket parses as " + std::string(court_name(outcome.canonical.court)) +
                                          " but manifest says " + court_name(doc.court)});
            continue;
        }
        std::string key = format_identifier(outcome.canonical);
        auto it = holder.find(key);
        if (it == holder.end()) {
            holder[key] = &doc;
            index.canonical_to_doc[key] = doc.doc_id;
        } else if (doc.date < it->second->date) {
            index.warnings.push_back({"collision", it->second->doc_id,
                                      "docket " + key + " kept for earlier doc " + doc.doc_id});
            holder[key] = &doc;
            index.canonical_to_doc[key] = doc.doc_id;
        } else {
            index.warnings.push_back({"collision", doc.doc_id,
                                      "docket " + key + " already held by " + it->second->doc_id});
        }
    }
    return index;
}

} // namespace czcite

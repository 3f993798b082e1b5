// Command-line front end. Every subcommand maps onto one stage function from
// the library; configuration comes from an optional key=value file with
// same-named flags taking precedence.

#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "czcite/pipeline.hpp"

namespace {

struct Subcommand {
    const char* name;
    const char* desc;
    std::vector<std::filesystem::path> (*run)(const czcite::PipelineConfig&);
};

const std::vector<Subcommand>& subcommands() {
    static const std::vector<Subcommand> subs = {
        {"ingest", "Load the corpus, build the docket index, write corpus_summary.json",
         czcite::run_ingest},
        {"train-segmenter", "Train the seven per-type segmenter models from gold segments",
         czcite::run_train_segmenter},
        {"train-recognizer", "Train the BIO identifier recognizer from gold spans",
         czcite::run_train_recognizer},
        {"segment", "Segment every document, write segments.jsonl", czcite::run_segment},
        {"recognize", "Recognize identifier spans in argumentation text, write spans.jsonl",
         czcite::run_recognize},
        {"normalize", "Repair and standardize spans, write mentions.jsonl + review_queue.jsonl",
         czcite::run_normalize},
        {"link", "Resolve mentions against the docket index, write edges.csv + graph.csv",
         czcite::run_link},
        {"stats", "Aggregate citation matrices, write matrix_report.txt + matrix.json",
         czcite::run_stats},
        {"eval", "Score segmentation + recognition against gold spans", czcite::run_eval},
        {"pipeline", "Run ingest, segment, recognize, normalize, link, stats in one go",
         czcite::run_pipeline},
    };
    return subs;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"citation extraction for Czech apex-court decisions"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key = value configuration file");

    // Flag values are applied through the same validator as config-file
    // entries, after the file, so the flag wins.
    std::map<std::string, std::string> overrides;
    auto opt = [&](const char* flag, const char* key, const char* desc) {
        app.add_option_function<std::string>(
            flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, desc);
    };
    opt("--manifest", "manifest", "JSON-lines corpus manifest");
    opt("--registry", "registry", "registry-mark table ('<mark> <court>' per line)");
    opt("--cue-lexicon", "cue_lexicon", "segment cue phrases ('<tag> <phrase>' per line)");
    opt("--model-dir", "model_dir", "directory holding segmenter + recognizer models");
    opt("--out-dir", "out_dir", "directory for stage artifacts");
    opt("--gold-segments", "gold_segments", "gold segment annotations (JSON lines)");
    opt("--gold-spans", "gold_spans", "gold identifier spans (JSON lines)");
    opt("--workers", "workers", "worker threads for per-document stages");
    opt("--seed", "seed", "training shuffle seed");
    opt("--epochs", "epochs", "training epochs");
    opt("--margin-threshold", "margin_threshold", "review-queue margin threshold");
    opt("--paragraph-mode", "paragraph_mode", "paragraph splitting: auto|blank|hard");

    for (const auto& sub : subcommands()) app.add_subcommand(sub.name, sub.desc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        czcite::PipelineConfig cfg;
        if (!config_path.empty()) czcite::load_config_file(cfg, config_path);
        for (const auto& [key, value] : overrides)
            czcite::apply_config_entry(cfg, key, value, "command line");

        const std::string chosen = app.get_subcommands().at(0)->get_name();
        for (const auto& sub : subcommands()) {
            if (chosen != sub.name) continue;
            for (const auto& path : sub.run(cfg)) std::cout << "wrote " << path.string() << "\n";
            return 0;
        }
        std::cerr << "internal error: unknown subcommand " << chosen << "\n";
        return 3;
    } catch (const czcite::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const czcite::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

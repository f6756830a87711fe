#pragma once

// File-level build pipeline: parse -> canonicalize -> align -> index.

#include "semviz/index.hpp"
#include "semviz/ingest.hpp"
#include "semviz/taxonomy.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace semviz {

struct BuildInputs {
    std::vector<std::string> causal_assertion_files;
    std::vector<std::string> kg_files;
    std::optional<std::string> metadata_file;
    std::optional<std::string> alias_file;
    std::optional<std::string> taxonomy_file;
    std::vector<std::string> stopwords;
};

struct BuildOutput {
    Index index;
    nlohmann::json report;             // rejects, warnings and counts
    std::vector<std::string> warnings; // human-readable, for stderr
};

namespace detail {

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io_error", "cannot open input file '" + path + "'", path);
    return in;
}

inline nlohmann::json rejects_json(const std::vector<Reject>& rejects) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rejects) arr.push_back({{"line", r.line}, {"reason", r.reason}});
    return arr;
}

} // namespace detail

// Throws Error("io_error") for unreadable inputs, FormatError for a malformed
// metadata header, ConfigError for a bad taxonomy or alias file.
inline BuildOutput build_from_files(const BuildInputs& inputs) {
    BuildOutput out;
    auto& report = out.report;
    report = nlohmann::json::object();

    for (const auto& path : inputs.causal_assertion_files) detail::open_input(path);
    for (const auto& path : inputs.kg_files) detail::open_input(path);

    Taxonomy taxonomy;
    if (inputs.taxonomy_file) {
        auto in = detail::open_input(*inputs.taxonomy_file);
        std::stringstream ss;
        ss << in.rdbuf();
        taxonomy = load_taxonomy(ss.str());
    } else {
        taxonomy = default_taxonomy();
        out.warnings.push_back("no taxonomy given; using the built-in default taxonomy");
    }
    report["taxonomy_types"] = taxonomy.size();

    AliasMap aliases;
    if (inputs.alias_file) {
        auto in = detail::open_input(*inputs.alias_file);
        aliases = parse_alias_file(in);
    }

    std::vector<RelationRecord> records;
    std::vector<EvidenceDoc> docs;
    auto files = nlohmann::json::array();
    auto absorb = [&](const std::string& path, const std::string& kind, RelationBatch batch) {
        files.push_back({{"path", path},
                         {"kind", kind},
                         {"input_lines", batch.input_lines},
                         {"records", batch.records.size()},
                         {"rejected", batch.rejects.size()},
                         {"rejects", detail::rejects_json(batch.rejects)}});
        if (!batch.rejects.empty()) {
            out.warnings.push_back(path + ": " + std::to_string(batch.rejects.size()) + " line(s) rejected");
        }
        for (auto& r : batch.records) records.push_back(std::move(r));
        for (auto& d : batch.docs) docs.push_back(std::move(d));
    };
    for (size_t i = 0; i < inputs.causal_assertion_files.size(); ++i) {
        auto in = detail::open_input(inputs.causal_assertion_files[i]);
        absorb(inputs.causal_assertion_files[i], "causal_assertion", parse_causal_assertions(in, i));
    }
    for (size_t i = 0; i < inputs.kg_files.size(); ++i) {
        auto in = detail::open_input(inputs.kg_files[i]);
        absorb(inputs.kg_files[i], "knowledge_graph", parse_kg_relations(in, i));
    }
    report["files"] = std::move(files);

    std::vector<ArticleMeta> articles;
    if (inputs.metadata_file) {
        auto in = detail::open_input(*inputs.metadata_file);
        auto meta = parse_article_metadata(in);
        report["metadata"] = {{"path", *inputs.metadata_file},
                              {"articles", meta.articles.size()},
                              {"duplicates", meta.duplicates},
                              {"warnings", detail::rejects_json(meta.warnings)}};
        if (!meta.warnings.empty()) {
            out.warnings.push_back(*inputs.metadata_file + ": " + std::to_string(meta.warnings.size()) + " warning(s)");
        }
        articles = std::move(meta.articles);
    }

    records = canonicalize(std::move(records), aliases);
    auto corpus = align_by_pmid(std::move(docs), std::move(articles));
    size_t unaligned = 0;
    for (size_t i = 0; i < corpus.docs.size(); ++i) unaligned += corpus.aligned(i) ? 0 : 1;

    IndexOptions options;
    for (const auto& s : inputs.stopwords) options.tokenizer.stopwords.insert(text::key(s));
    out.index = build_index(std::move(records), std::move(corpus), taxonomy, aliases, std::move(options));

    report["records"] = out.index.records().size();
    report["docs"] = out.index.docs().size();
    report["unaligned_docs"] = unaligned;
    report["functional_types"] = out.index.functional_types().size();
    return out;
}

} // namespace semviz

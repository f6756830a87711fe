#pragma once

// Test fixtures: the worked-example corpus, a seeded synthetic corpus generator and
// helpers that push in-memory files through the ingestion path.

#include "semviz/index.hpp"
#include "semviz/ingest.hpp"
#include "semviz/taxonomy.hpp"

#include <json.hpp>

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace semviz::testing {

using nlohmann::json;

struct CorpusFiles {
    std::string causal_assertions; // JSONL
    std::string kg_relations;      // JSONL
    std::string metadata;          // CSV
    std::string aliases;           // TSV
};

// Canonical records and aligned corpus as handed to the index, kept for oracles.
struct Corpus {
    Taxonomy taxonomy;
    AliasMap aliases;
    std::vector<RelationRecord> records;
    AlignedCorpus aligned;
    Index index;
};

inline Corpus ingest(const CorpusFiles& files, const Taxonomy& taxonomy = default_taxonomy()) {
    Corpus c;
    c.taxonomy = taxonomy;
    {
        std::istringstream in(files.aliases);
        c.aliases = parse_alias_file(in);
    }
    std::istringstream ca(files.causal_assertions);
    std::istringstream kg(files.kg_relations);
    auto a = parse_causal_assertions(ca, 0);
    auto b = parse_kg_relations(kg, 0);
    std::vector<EvidenceDoc> docs = std::move(a.docs);
    docs.insert(docs.end(), b.docs.begin(), b.docs.end());
    std::vector<RelationRecord> records = std::move(a.records);
    records.insert(records.end(), b.records.begin(), b.records.end());
    std::vector<ArticleMeta> articles;
    if (!files.metadata.empty()) {
        std::istringstream meta(files.metadata);
        articles = parse_article_metadata(meta).articles;
    }
    c.records = canonicalize(std::move(records), c.aliases);
    c.aligned = align_by_pmid(std::move(docs), std::move(articles));
    c.index = build_index(c.records, c.aligned, c.taxonomy, c.aliases);
    // build_index stores relation names in configured spelling; mirror that for oracles
    for (auto& r : c.records) r.relation = c.taxonomy.lookup(r.relation).name;
    return c;
}

inline std::string ca_line(const std::string& s, const std::string& o, const std::string& rel,
                           const std::vector<std::pair<std::string, std::string>>& evidence) {
    json ev = json::array();
    for (const auto& [sentence, pmid] : evidence) {
        json e = {{"sentence", sentence}};
        if (!pmid.empty()) e["pmid"] = pmid;
        ev.push_back(e);
    }
    return json{{"subject", s}, {"object", o}, {"relation_type", rel}, {"evidence", ev}}.dump() + "\n";
}

inline std::string kg_line(const std::string& s, const std::string& o, const std::string& rel,
                           const std::string& pair_kind, const std::string& sentence, const std::string& pmid) {
    json j = {{"subject", s}, {"object", o}, {"relation_type", rel}, {"pair_kind", pair_kind}, {"sentence", sentence}};
    if (!pmid.empty()) j["pmid"] = pmid;
    return j.dump() + "\n";
}

inline std::string csv_cell(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

inline std::string meta_row(const std::string& pmid, const std::string& title, const std::string& abstract,
                            const std::string& authors, const std::string& date, const std::string& journal) {
    return csv_cell(pmid) + "," + csv_cell(title) + "," + csv_cell(abstract) + "," + csv_cell(authors) + "," +
           csv_cell(date) + "," + csv_cell(journal) + "\n";
}

inline const std::string kMetaHeader = "pmid,title,abstract,authors,publish_time,journal\n";

// The worked tuples: two causal assertions (one object reached through the
// NSP1 alias) and two chemical-gene relations.
inline CorpusFiles worked_fixture() {
    CorpusFiles f;
    f.causal_assertions =
        ca_line("ocrelizumab", "COVID-19", "Activation",
                {{"ocrelizumab may activate the immune response in COVID-19 patients", "32000001"}}) +
        ca_line("Interferon", "NSP1", "Activation",
                {{"Interferon activates NSP1 in infected cells", "32000002"}});
    f.kg_relations =
        kg_line("10074-G5", "MYC", "Decrease Expression", "chemical_gene",
                "10074-G5 resulted in decreased expression of MYC", "32000003") +
        kg_line("D014013", "CASP3", "Decrease Reaction", "chemical_gene",
                "D014013 decreases the reaction of CASP3", "32000004");
    f.metadata = kMetaHeader +
                 meta_row("32000001", "Ocrelizumab and COVID-19", "Coronavirus infection in treated patients",
                          "Doe, J; Roe, R", "2020-03-15", "Emerg Microbes Infect") +
                 meta_row("32000002", "Interferon and SARS", "Coronavirus proteins antagonize interferon",
                          "Sin-Yee Fung", "2020-03", "Emerg Microbes Infect");
    f.aliases = "NSP1\tSH2D3A\n";
    return f;
}

struct EdgeSpec {
    std::string from;
    std::string to;
    std::string relation = "Activation";
    size_t evidence = 1;
};

// One causal assertion per edge; evidence pmids count up from 1.
inline CorpusFiles edge_corpus(const std::vector<EdgeSpec>& edges) {
    CorpusFiles f;
    size_t pmid = 1;
    for (const auto& e : edges) {
        std::vector<std::pair<std::string, std::string>> ev;
        for (size_t i = 0; i < e.evidence; ++i) {
            ev.emplace_back(e.from + " " + e.relation + " " + e.to + " " + std::to_string(i), std::to_string(pmid++));
        }
        f.causal_assertions += ca_line(e.from, e.to, e.relation, ev);
    }
    return f;
}

struct SyntheticOptions {
    size_t ca_relations = 200;
    size_t kg_relations = 100;
    size_t entities = 25;
    size_t pmids = 40;
    double aligned_fraction = 0.8; // of pmids that get metadata
    double missing_pmid = 0.1;     // of evidence entries
};

// Deterministic for a given seed. Entity names mix case and aliases; relation
// types include configured and unknown names.
inline CorpusFiles synthetic_corpus(uint64_t seed, const SyntheticOptions& opt = {}) {
    std::mt19937_64 rng(seed);
    auto pick = [&](size_t n) { return static_cast<size_t>(std::uniform_int_distribution<size_t>(0, n - 1)(rng)); };
    auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };

    static const std::vector<std::string> kRelations = {
        "Activation", "Activation", "Activation", "Inhibition", "Inhibition", "Phosphorylation",
        "Dephosphorylation", "Complex", "IncreaseAmount", "DecreaseAmount", "activation", "Unmapped Thing"};
    static const std::vector<std::string> kKgRelations = {"Decrease Expression", "Increase Expression", "Decrease Reaction",
                                                          "Increase Reaction", "Affect Binding", "marker/mechanism"};
    static const std::vector<std::string> kWords = {"coronavirus", "sars", "interferon", "kinase", "cell",  "virus",
                                                    "protein",     "host", "immune",     "response", "il", "mavs",
                                                    "signaling",   "ace2", "tmprss2",    "of",       "expression"};
    static const std::vector<std::string> kJournals = {"PLoS One", "Emerg Microbes Infect", "Nature", "Cell Rep"};
    static const std::vector<std::string> kAuthors = {"Doe, J", "Roe, R", "Sin-Yee Fung", "Li, X", "Smith, A"};

    auto entity = [&](const char* prefix, size_t i) {
        std::string name = std::string(prefix) + std::to_string(i);
        if (i % 3 == 0) {
            for (auto& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        return name;
    };
    auto sentence = [&] {
        std::string s;
        const size_t n = 3 + pick(6);
        for (size_t i = 0; i < n; ++i) s += (i ? " " : "") + kWords[pick(kWords.size())];
        return s;
    };
    auto pmid = [&]() -> std::string {
        if (chance(opt.missing_pmid)) return "";
        return std::to_string(1000 + pick(opt.pmids));
    };

    CorpusFiles f;
    for (size_t i = 0; i < opt.ca_relations; ++i) {
        const auto s = entity("p", pick(opt.entities));
        auto o = entity("p", pick(opt.entities));
        if (chance(0.05)) o = " " + o + " ";
        std::vector<std::pair<std::string, std::string>> ev;
        const size_t n = 1 + pick(3);
        for (size_t e = 0; e < n; ++e) ev.emplace_back(sentence(), pmid());
        f.causal_assertions += ca_line(s, o, kRelations[pick(kRelations.size())], ev);
        if (chance(0.02)) f.causal_assertions += "{not json\n";
    }
    static const std::vector<std::string> kKinds = {"chemical_gene", "chemical_disease", "gene_disease"};
    for (size_t i = 0; i < opt.kg_relations; ++i) {
        const auto& kind = kKinds[pick(kKinds.size())];
        std::string s, o;
        if (kind == "chemical_gene") {
            s = entity("c", pick(opt.entities / 2 + 1));
            o = entity("g", pick(opt.entities / 2 + 1));
        } else if (kind == "chemical_disease") {
            s = entity("c", pick(opt.entities / 2 + 1));
            o = entity("d", pick(opt.entities / 3 + 1));
        } else {
            s = entity("g", pick(opt.entities / 2 + 1));
            o = entity("d", pick(opt.entities / 3 + 1));
        }
        f.kg_relations += kg_line(s, o, kKgRelations[pick(kKgRelations.size())], kind, sentence(), pmid());
    }
    f.metadata = kMetaHeader;
    for (size_t p = 0; p < opt.pmids; ++p) {
        if (!chance(opt.aligned_fraction)) continue;
        std::string authors = kAuthors[pick(kAuthors.size())];
        if (chance(0.5)) authors += "; " + kAuthors[pick(kAuthors.size())];
        std::string date;
        const auto d = pick(4);
        if (d == 1) date = "2020-0" + std::to_string(1 + pick(9));
        if (d == 2) date = "2019-1" + std::to_string(pick(3)) + "-0" + std::to_string(1 + pick(9));
        if (d == 3) date = "2021";
        f.metadata += meta_row(std::to_string(1000 + p), sentence(), sentence() + " " + sentence(), authors, date,
                               kJournals[pick(kJournals.size())]);
    }
    f.aliases = "P1\tp2\nalias-of-p4\tP4\n";
    return f;
}

} // namespace semviz::testing

#pragma once

// Ingestion of pre-extracted relations and article metadata.
//
// Causal-assertion and KG files are JSON lines; metadata is a CSV table.
// Relation parsers never abort on bad lines: every non-blank input line ends
// up either as a record or as an entry in the rejects report.

#include "semviz/error.hpp"
#include "semviz/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace semviz {

enum class Source : uint8_t { CausalAssertion, KnowledgeGraph };
enum class PairKind : uint8_t { ProteinProtein, ChemicalGene, ChemicalDisease, GeneDisease };

inline std::string_view to_string(Source s) {
    return s == Source::CausalAssertion ? "causal_assertion" : "knowledge_graph";
}

inline std::string_view to_string(PairKind k) {
    switch (k) {
    case PairKind::ProteinProtein: return "protein_protein";
    case PairKind::ChemicalGene: return "chemical_gene";
    case PairKind::ChemicalDisease: return "chemical_disease";
    case PairKind::GeneDisease: return "gene_disease";
    }
    return "protein_protein";
}

inline std::optional<PairKind> parse_kg_pair_kind(std::string_view token) {
    if (token == "chemical_gene") return PairKind::ChemicalGene;
    if (token == "chemical_disease") return PairKind::ChemicalDisease;
    if (token == "gene_disease") return PairKind::GeneDisease;
    return std::nullopt;
}

struct RelationRecord {
    std::string id;
    std::string subject;         // canonical key once canonicalized
    std::string object;
    std::string subject_display; // surface form as ingested
    std::string object_display;
    std::string relation;
    Source source = Source::CausalAssertion;
    PairKind pair_kind = PairKind::ProteinProtein;
    std::vector<std::string> evidence_ids;

    friend bool operator==(const RelationRecord&, const RelationRecord&) = default;
};

struct EvidenceDoc {
    std::string id;
    std::string sentence;
    std::optional<std::string> pmid;
    std::optional<std::string> url;

    friend bool operator==(const EvidenceDoc&, const EvidenceDoc&) = default;
};

struct ArticleMeta {
    std::string pmid;
    std::string title;
    std::string abstract;
    std::vector<std::string> authors;
    std::optional<std::string> publish_time; // YYYY, YYYY-MM or YYYY-MM-DD
    std::string journal;

    friend bool operator==(const ArticleMeta&, const ArticleMeta&) = default;
};

struct Reject {
    size_t line = 0;
    std::string reason;

    friend bool operator==(const Reject&, const Reject&) = default;
};

struct RelationBatch {
    std::vector<RelationRecord> records;
    std::vector<EvidenceDoc> docs;
    std::vector<Reject> rejects;
    size_t input_lines = 0; // non-blank lines seen
};

struct MetadataBatch {
    std::vector<ArticleMeta> articles;
    std::vector<Reject> warnings;
    size_t duplicates = 0;
};

// ---------------------------------------------------------------------------
// Validation helpers

inline bool is_valid_date_prefix(std::string_view s) {
    auto number = [&](size_t pos, size_t len) -> int {
        int v = 0;
        for (size_t i = pos; i < pos + len; ++i) {
            if (s[i] < '0' || s[i] > '9') return -1;
            v = v * 10 + (s[i] - '0');
        }
        return v;
    };
    if (s.size() != 4 && s.size() != 7 && s.size() != 10) return false;
    const int year = number(0, 4);
    if (year < 0) return false;
    if (s.size() == 4) return true;
    if (s[4] != '-') return false;
    const int month = number(5, 2);
    if (month < 1 || month > 12) return false;
    if (s.size() == 7) return true;
    if (s[7] != '-') return false;
    const int day = number(8, 2);
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    const int limit = kDays[month - 1] + (month == 2 && leap ? 1 : 0);
    return day >= 1 && day <= limit;
}

// scheme "://" host [rest], with http(s) schemes and no whitespace.
inline bool is_well_formed_url(std::string_view url) {
    const auto sep = url.find("://");
    if (sep == std::string_view::npos) return false;
    const auto scheme = url.substr(0, sep);
    if (scheme != "http" && scheme != "https") return false;
    const auto rest = url.substr(sep + 3);
    const auto host = rest.substr(0, rest.find('/'));
    if (host.empty()) return false;
    return std::none_of(url.begin(), url.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r';
    });
}

inline std::string pubmed_url(std::string_view pmid) {
    return "https://pubmed.ncbi.nlm.nih.gov/" + std::string(pmid) + "/";
}

namespace detail {

struct LineError {
    std::string reason;
};

inline std::string required_string(const nlohmann::json& obj, const char* key) {
    if (!obj.contains(key)) throw LineError{std::string("missing field '") + key + "'"};
    const auto& v = obj[key];
    if (!v.is_string()) throw LineError{std::string("field '") + key + "' must be a string"};
    return v.get<std::string>();
}

inline std::optional<std::string> optional_id(const nlohmann::json& obj, const char* key) {
    if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
    const auto& v = obj[key];
    std::string s;
    if (v.is_string()) {
        s = std::string(text::trim(v.get<std::string>()));
    } else if (v.is_number_unsigned() || v.is_number_integer()) {
        s = v.dump();
    } else {
        throw LineError{std::string("field '") + key + "' must be a string or integer"};
    }
    if (s.empty()) return std::nullopt;
    return s;
}

inline EvidenceDoc make_doc(std::string id, const nlohmann::json& entry, const char* sentence_key) {
    EvidenceDoc doc;
    doc.id = std::move(id);
    doc.sentence = required_string(entry, sentence_key);
    if (text::trim(doc.sentence).empty()) throw LineError{"empty evidence sentence"};
    doc.pmid = optional_id(entry, "pmid");
    if (entry.contains("url") && !entry["url"].is_null()) {
        if (!entry["url"].is_string()) throw LineError{"field 'url' must be a string"};
        auto url = entry["url"].get<std::string>();
        if (!is_well_formed_url(url)) throw LineError{"malformed url '" + url + "'"};
        doc.url = std::move(url);
    } else if (doc.pmid) {
        doc.url = pubmed_url(*doc.pmid);
    }
    return doc;
}

// Shared line loop: `parse_line` converts one JSON object into record + docs or throws LineError.
template <typename ParseLine>
RelationBatch parse_json_lines(std::istream& in, ParseLine&& parse_line) {
    RelationBatch batch;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        ++batch.input_lines;
        try {
            nlohmann::json obj;
            try {
                obj = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error&) {
                throw LineError{"malformed JSON"};
            }
            if (!obj.is_object()) throw LineError{"record must be a JSON object"};
            auto [record, docs] = parse_line(obj, line_no);
            batch.records.push_back(std::move(record));
            for (auto& d : docs) batch.docs.push_back(std::move(d));
        } catch (const LineError& e) {
            batch.rejects.push_back({line_no, e.reason});
        }
    }
    return batch;
}

inline void fill_endpoints(RelationRecord& r, const nlohmann::json& obj) {
    r.subject_display = std::string(text::trim(required_string(obj, "subject")));
    r.object_display = std::string(text::trim(required_string(obj, "object")));
    if (r.subject_display.empty()) throw LineError{"empty subject"};
    if (r.object_display.empty()) throw LineError{"empty object"};
    r.subject = r.subject_display;
    r.object = r.object_display;
    r.relation = std::string(text::trim(required_string(obj, "relation_type")));
    if (r.relation.empty()) throw LineError{"empty relation_type"};
}

} // namespace detail

// Record ids are "ca<file>:<line>"; evidence doc ids append ":<entry>".
inline RelationBatch parse_causal_assertions(std::istream& in, size_t file_index = 0) {
    const std::string prefix = "ca" + std::to_string(file_index) + ":";
    return detail::parse_json_lines(in, [&](const nlohmann::json& obj, size_t line_no) {
        RelationRecord r;
        r.id = prefix + std::to_string(line_no);
        r.source = Source::CausalAssertion;
        r.pair_kind = PairKind::ProteinProtein;
        detail::fill_endpoints(r, obj);
        if (!obj.contains("evidence") || !obj["evidence"].is_array()) {
            throw detail::LineError{"field 'evidence' must be a list"};
        }
        const auto& evidence = obj["evidence"];
        if (evidence.empty()) throw detail::LineError{"evidence list is empty"};
        std::vector<EvidenceDoc> docs;
        for (size_t i = 0; i < evidence.size(); ++i) {
            if (!evidence[i].is_object()) throw detail::LineError{"evidence entry must be an object"};
            docs.push_back(detail::make_doc(r.id + ":" + std::to_string(i), evidence[i], "sentence"));
            r.evidence_ids.push_back(docs.back().id);
        }
        return std::pair{std::move(r), std::move(docs)};
    });
}

inline RelationBatch parse_kg_relations(std::istream& in, size_t file_index = 0) {
    const std::string prefix = "kg" + std::to_string(file_index) + ":";
    return detail::parse_json_lines(in, [&](const nlohmann::json& obj, size_t line_no) {
        RelationRecord r;
        r.id = prefix + std::to_string(line_no);
        r.source = Source::KnowledgeGraph;
        detail::fill_endpoints(r, obj);
        const auto token = detail::required_string(obj, "pair_kind");
        auto kind = parse_kg_pair_kind(token);
        if (!kind) throw detail::LineError{"unknown pair_kind '" + token + "'"};
        r.pair_kind = *kind;
        std::vector<EvidenceDoc> docs;
        docs.push_back(detail::make_doc(r.id + ":0", obj, "sentence"));
        r.evidence_ids.push_back(docs.back().id);
        return std::pair{std::move(r), std::move(docs)};
    });
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

// RFC 4180 reader: quoted fields may contain separators, doubled quotes and newlines.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Returns false at end of input. `line` receives the 1-based line where the row starts.
    bool next(std::vector<std::string>& row, size_t& line) {
        row.clear();
        if (in_.peek() == std::char_traits<char>::eof()) return false;
        line = line_ + 1;
        std::string field;
        bool quoted = false;
        bool field_started = false;
        for (;;) {
            const int c = in_.get();
            if (c == std::char_traits<char>::eof()) {
                row.push_back(std::move(field));
                ++line_;
                return true;
            }
            const char ch = static_cast<char>(c);
            if (quoted) {
                if (ch == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    if (ch == '\n') ++line_;
                    field.push_back(ch);
                }
                continue;
            }
            if (ch == '"' && !field_started) {
                quoted = true;
                field_started = true;
            } else if (ch == ',') {
                row.push_back(std::move(field));
                field.clear();
                field_started = false;
            } else if (ch == '\n') {
                if (!field.empty() && field.back() == '\r') field.pop_back();
                row.push_back(std::move(field));
                ++line_;
                return true;
            } else {
                field.push_back(ch);
                field_started = true;
            }
        }
    }

private:
    std::istream& in_;
    size_t line_ = 0;
};

} // namespace detail

inline constexpr std::array<std::string_view, 6> kMetadataColumns{
    "pmid", "title", "abstract", "authors", "publish_time", "journal"};

inline std::vector<std::string> split_authors(std::string_view cell) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= cell.size()) {
        const auto end = std::min(cell.find(';', start), cell.size());
        auto name = text::trim(cell.substr(start, end - start));
        if (!name.empty()) out.emplace_back(name);
        start = end + 1;
    }
    return out;
}

// Throws FormatError naming the first missing required column.
inline MetadataBatch parse_article_metadata(std::istream& in) {
    MetadataBatch batch;
    detail::CsvReader reader(in);
    std::vector<std::string> row;
    size_t line = 0;
    if (!reader.next(row, line)) {
        throw FormatError("metadata file is empty; expected header row", std::string(kMetadataColumns[0]));
    }
    if (!row.empty() && row[0].starts_with("\xEF\xBB\xBF")) row[0].erase(0, 3);
    std::array<size_t, kMetadataColumns.size()> column{};
    for (size_t c = 0; c < kMetadataColumns.size(); ++c) {
        auto it = std::find_if(row.begin(), row.end(), [&](const std::string& h) {
            return text::key(h) == kMetadataColumns[c];
        });
        if (it == row.end()) {
            throw FormatError("metadata header is missing required column '" +
                                  std::string(kMetadataColumns[c]) + "'",
                              std::string(kMetadataColumns[c]));
        }
        column[c] = static_cast<size_t>(it - row.begin());
    }
    const size_t width = row.size();

    std::unordered_map<std::string, size_t> seen;
    while (reader.next(row, line)) {
        if (row.size() == 1 && text::trim(row[0]).empty()) continue;
        if (row.size() != width) {
            batch.warnings.push_back({line, "expected " + std::to_string(width) + " fields, found " +
                                                std::to_string(row.size())});
            continue;
        }
        ArticleMeta a;
        a.pmid = std::string(text::trim(row[column[0]]));
        if (a.pmid.empty()) {
            batch.warnings.push_back({line, "row without pmid"});
            continue;
        }
        a.title = std::string(text::trim(row[column[1]]));
        a.abstract = std::string(text::trim(row[column[2]]));
        a.authors = split_authors(row[column[3]]);
        auto date = text::trim(row[column[4]]);
        if (!date.empty()) {
            if (is_valid_date_prefix(date)) {
                a.publish_time = std::string(date);
            } else {
                batch.warnings.push_back({line, "invalid publish_time '" + std::string(date) + "'"});
            }
        }
        a.journal = std::string(text::trim(row[column[5]]));
        if (seen.contains(a.pmid)) {
            ++batch.duplicates;
            batch.warnings.push_back({line, "duplicate pmid '" + a.pmid + "' (first kept)"});
            continue;
        }
        seen.emplace(a.pmid, batch.articles.size());
        batch.articles.push_back(std::move(a));
    }
    return batch;
}

// ---------------------------------------------------------------------------
// Aliases and canonical names

// alias -> canonical entity, keys and values folded. Chains are flattened on
// construction so every value is a fixed point of the map.
class AliasMap {
public:
    AliasMap() = default;

    // Throws ConfigError on a cycle or on one alias bound to two canonicals.
    explicit AliasMap(const std::vector<std::pair<std::string, std::string>>& pairs) {
        std::map<std::string, std::string> raw;
        for (const auto& [alias, canonical] : pairs) {
            auto a = text::key(alias);
            auto c = text::key(canonical);
            if (a.empty() || c.empty()) throw ConfigError("alias pair with empty side", alias);
            if (a == c) {
                displays_.emplace(c, std::string(text::trim(canonical)));
                continue;
            }
            if (auto it = raw.find(a); it != raw.end() && it->second != c) {
                throw ConfigError("alias '" + std::string(alias) + "' maps to two canonical names", alias);
            }
            raw[a] = c;
            displays_.emplace(c, std::string(text::trim(canonical)));
        }
        for (const auto& [alias, _] : raw) {
            std::string target = alias;
            size_t steps = 0;
            for (auto it = raw.find(target); it != raw.end(); it = raw.find(target)) {
                target = it->second;
                if (++steps > raw.size()) {
                    throw ConfigError("alias cycle through '" + alias + "'", alias);
                }
            }
            map_.emplace(alias, target);
        }
        for (const auto& [alias, _] : map_) displays_.erase(alias);
    }

    // Folded canonical key for an arbitrary surface form.
    std::string canonical(std::string_view name) const {
        auto k = text::key(name);
        if (auto it = map_.find(k); it != map_.end()) return it->second;
        return k;
    }

    // Display form the alias file gives for a canonical key, if any.
    std::optional<std::string> display(const std::string& canonical_key) const {
        if (auto it = displays_.find(canonical_key); it != displays_.end()) return it->second;
        return std::nullopt;
    }

    bool empty() const { return map_.empty(); }
    const std::map<std::string, std::string>& entries() const { return map_; }
    const std::map<std::string, std::string>& displays() const { return displays_; }

    // Rebuilds from already-flattened state (deserialization).
    static AliasMap from_state(std::map<std::string, std::string> entries,
                               std::map<std::string, std::string> displays) {
        AliasMap m;
        m.map_ = std::move(entries);
        m.displays_ = std::move(displays);
        return m;
    }

    friend bool operator==(const AliasMap&, const AliasMap&) = default;

private:
    std::map<std::string, std::string> map_;
    std::map<std::string, std::string> displays_;
};

// `alias<TAB>canonical` per line; blank lines and '#' comments skipped.
inline AliasMap parse_alias_file(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw FormatError("alias file line " + std::to_string(line_no) +
                                  ": expected exactly one TAB separator",
                              "line " + std::to_string(line_no));
        }
        pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return AliasMap(pairs);
}

// Replaces subject/object with trim -> fold -> alias lookup; surface forms are kept.
inline std::vector<RelationRecord> canonicalize(std::vector<RelationRecord> records,
                                                const AliasMap& aliases) {
    for (auto& r : records) {
        if (r.subject_display.empty()) r.subject_display = std::string(text::trim(r.subject));
        if (r.object_display.empty()) r.object_display = std::string(text::trim(r.object));
        r.subject = aliases.canonical(r.subject);
        r.object = aliases.canonical(r.object);
    }
    return records;
}

// ---------------------------------------------------------------------------
// Alignment

struct AlignedCorpus {
    std::vector<EvidenceDoc> docs;
    std::vector<ArticleMeta> articles;
    std::vector<std::optional<size_t>> doc_article; // per doc: index into articles, nullopt = unaligned

    bool aligned(size_t doc) const { return doc_article[doc].has_value(); }
};

inline AlignedCorpus align_by_pmid(std::vector<EvidenceDoc> docs, std::vector<ArticleMeta> articles) {
    AlignedCorpus corpus;
    std::unordered_map<std::string, size_t> by_pmid;
    for (size_t i = 0; i < articles.size(); ++i) by_pmid.emplace(articles[i].pmid, i);
    corpus.doc_article.reserve(docs.size());
    for (const auto& d : docs) {
        std::optional<size_t> link;
        if (d.pmid) {
            if (auto it = by_pmid.find(*d.pmid); it != by_pmid.end()) link = it->second;
        }
        corpus.doc_article.push_back(link);
    }
    corpus.docs = std::move(docs);
    corpus.articles = std::move(articles);
    return corpus;
}

} // namespace semviz

#pragma once

// Three-layer hierarchical index.
//
//   document layer  evidencing sentences aligned with article metadata
//   phrase layer    relation tuples plus (abstract keyword, journal|month) tuples
//   type layer      entities and grounded functional types
//
// Every facet is an inverted list (field, term) -> ascending doc ordinals, and
// every dashboard query reduces to intersecting a few of those lists.

#include "semviz/binary_io.hpp"
#include "semviz/error.hpp"
#include "semviz/functional_types.hpp"
#include "semviz/ingest.hpp"
#include "semviz/taxonomy.hpp"
#include "semviz/text.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace semviz {

enum class Field : uint8_t {
    Subject,
    Object,
    RelationType,
    Metatype,
    RoleSubject,
    RoleObject,
    RoleEnzyme,
    RoleSubstrate,
    Chemical,
    Gene,
    Disease,
    Journal,
    Author,
    PublishTime,
    FunctionalType,
    PairKind,
    Source,
    AbstractKeyword,
    // aggregation-only, scoped by a functional_type constraint
    UpstreamRegulator,
    OppositeUpstreamRegulator,
};

inline constexpr size_t kIndexedFieldCount = 18;
inline constexpr size_t kFieldCount = 20;

inline constexpr std::array<std::string_view, kFieldCount> kFieldNames{
    "subject",        "object",         "relation_type", "metatype",          "role_subject",
    "role_object",    "role_enzyme",    "role_substrate", "chemical",         "gene",
    "disease",        "journal",        "author",         "publish_time",     "functional_type",
    "pair_kind",      "source",         "abstract_keyword", "upstream_regulator",
    "opposite_upstream_regulator"};

inline std::string_view field_name(Field f) { return kFieldNames[static_cast<size_t>(f)]; }

inline std::optional<Field> parse_field(std::string_view name) {
    for (size_t i = 0; i < kFieldNames.size(); ++i) {
        if (kFieldNames[i] == name) return static_cast<Field>(i);
    }
    return std::nullopt;
}

inline bool is_indexed(Field f) { return static_cast<size_t>(f) < kIndexedFieldCount; }

inline bool is_entity_field(Field f) {
    switch (f) {
    case Field::Subject:
    case Field::Object:
    case Field::RoleSubject:
    case Field::RoleObject:
    case Field::RoleEnzyme:
    case Field::RoleSubstrate:
    case Field::Chemical:
    case Field::Gene:
    case Field::Disease:
    case Field::UpstreamRegulator:
    case Field::OppositeUpstreamRegulator: return true;
    default: return false;
    }
}

// Fields whose terms come from the aligned article rather than the relation.
inline bool is_article_field(Field f) {
    return f == Field::Journal || f == Field::Author || f == Field::PublishTime || f == Field::AbstractKeyword;
}

struct Constraint {
    Field field;
    std::string term;

    friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

// Conjunctive filter state of one dashboard view.
struct FilterContext {
    std::set<Constraint> constraints;
    std::optional<std::string> text;

    FilterContext& add(Field f, std::string term) {
        if (!is_indexed(f)) {
            throw QueryError("field '" + std::string(field_name(f)) + "' cannot be used as a filter",
                             std::string(field_name(f)));
        }
        constraints.insert({f, std::move(term)});
        return *this;
    }

    bool empty() const { return constraints.empty() && !text; }

    friend bool operator==(const FilterContext&, const FilterContext&) = default;
};

// Sorted, duplicate-free doc ordinals.
struct EvidenceSet {
    std::vector<uint32_t> docs;

    size_t size() const { return docs.size(); }
    bool empty() const { return docs.empty(); }
    bool contains(uint32_t doc) const { return std::binary_search(docs.begin(), docs.end(), doc); }

    friend bool operator==(const EvidenceSet&, const EvidenceSet&) = default;
};

inline std::vector<uint32_t> intersect(std::span<const uint32_t> a, std::span<const uint32_t> b) {
    std::vector<uint32_t> out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

struct TermEntry {
    std::string key;
    std::string display;
    std::vector<uint32_t> docs;

    friend bool operator==(const TermEntry&, const TermEntry&) = default;
};

// Terms of one field, sorted by key.
class TermDictionary {
public:
    TermDictionary() = default;
    explicit TermDictionary(std::vector<TermEntry> terms) : terms_(std::move(terms)) { reindex(); }

    const TermEntry* find(std::string_view key) const {
        auto it = lookup_.find(std::string(key));
        return it == lookup_.end() ? nullptr : &terms_[it->second];
    }
    std::optional<uint32_t> id(std::string_view key) const {
        auto it = lookup_.find(std::string(key));
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }
    const TermEntry& operator[](uint32_t id) const { return terms_[id]; }
    const std::vector<TermEntry>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }

    friend bool operator==(const TermDictionary& a, const TermDictionary& b) { return a.terms_ == b.terms_; }

private:
    void reindex() {
        lookup_.clear();
        lookup_.reserve(terms_.size());
        for (uint32_t i = 0; i < terms_.size(); ++i) lookup_.emplace(terms_[i].key, i);
    }

    std::vector<TermEntry> terms_;
    std::unordered_map<std::string, uint32_t> lookup_;
};

// Compressed rows of term ids (doc -> terms or article -> terms).
struct ForwardLists {
    std::vector<uint32_t> offsets{0};
    std::vector<uint32_t> values;

    std::span<const uint32_t> row(size_t i) const {
        if (i + 1 >= offsets.size()) return {};
        return {values.data() + offsets[i], values.data() + offsets[i + 1]};
    }
};

enum class DerivedTupleKind : uint8_t { KeywordJournal, KeywordMonth };

// Phrase-layer tuple derived from article metadata, counted in articles.
struct DerivedTuple {
    DerivedTupleKind kind;
    std::string keyword;
    std::string value;
    uint32_t articles = 0;

    friend bool operator==(const DerivedTuple&, const DerivedTuple&) = default;
};

struct IndexOptions {
    text::TokenizerOptions tokenizer;
};

struct DocumentView {
    const EvidenceDoc* doc = nullptr;
    const ArticleMeta* article = nullptr; // null when unaligned
    std::vector<const RelationRecord*> records;

    bool aligned() const { return article != nullptr; }
};

// "YYYY-MM" when a month is present, otherwise "YYYY".
inline std::string month_bucket(std::string_view date) { return std::string(date.substr(0, std::min<size_t>(7, date.size()))); }

class Index {
public:
    static constexpr std::string_view kMagic{"SEMVIZIX", 8};
    static constexpr uint32_t kFormatVersion = 1;

    Index() { finalize(); }

    // ---- build -------------------------------------------------------------

    // Inputs are the canonicalized, aligned outputs of ingestion.
    // Throws BuildError on duplicate ids or dangling evidence references.
    static Index build(std::vector<RelationRecord> records, AlignedCorpus corpus, const Taxonomy& taxonomy,
                       const AliasMap& aliases = {}, IndexOptions options = {}) {
        Index idx;
        idx.taxonomy_ = taxonomy;
        idx.aliases_ = aliases;
        idx.options_ = std::move(options);
        idx.docs_ = std::move(corpus.docs);
        idx.articles_ = std::move(corpus.articles);
        idx.doc_article_.reserve(idx.docs_.size());
        for (size_t i = 0; i < idx.docs_.size(); ++i) {
            const auto link = i < corpus.doc_article.size() ? corpus.doc_article[i] : std::nullopt;
            if (link && *link >= idx.articles_.size()) throw BuildError("doc '" + idx.docs_[i].id + "' links past the article list");
            idx.doc_article_.push_back(link ? static_cast<int32_t>(*link) : -1);
        }
        {
            std::unordered_map<std::string_view, uint32_t> seen;
            for (const auto& a : idx.articles_) {
                if (!seen.emplace(a.pmid, 0).second) throw BuildError("duplicate article pmid '" + a.pmid + "'", a.pmid);
            }
        }
        for (auto& r : records) {
            const auto type = taxonomy.lookup(r.relation);
            r.relation = type.name;
        }
        idx.records_ = std::move(records);
        idx.index_ids();
        idx.compute_entity_displays();
        idx.functional_types_ = ground_functional_types(
            idx.records_, idx.taxonomy_, [&](const std::string& e) { return idx.entity_display(e); });
        idx.link_records();
        idx.build_pmids();
        idx.build_postings();
        idx.build_text_index();
        idx.build_derived_tuples();
        idx.finalize();
        return idx;
    }

    // ---- queries -----------------------------------------------------------

    // Normalizes a filter term to the posting key of `field`.
    std::string term_key(Field field, std::string_view term) const {
        if (is_entity_field(field)) return aliases_.canonical(term);
        auto k = text::key(term);
        if (field == Field::PublishTime && k.size() > 7) k = month_bucket(k);
        return k;
    }

    // Posting list of (field, term) with the term normalized first; empty when absent.
    std::span<const uint32_t> posting(Field field, std::string_view term) const {
        if (!is_indexed(field)) {
            throw QueryError("field '" + std::string(field_name(field)) + "' is not indexed", std::string(field_name(field)));
        }
        const auto* entry = fields_[static_cast<size_t>(field)].find(term_key(field, term));
        if (!entry) return {};
        return entry->docs;
    }

    // Docs whose sentence, title or abstract contain every token of `query`.
    std::vector<uint32_t> text_match(std::string_view query) const {
        auto tokens = text::tokenize(query, options_.tokenizer);
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        if (tokens.empty()) return all_docs();
        std::vector<std::span<const uint32_t>> lists;
        for (const auto& t : tokens) {
            const auto* entry = text_.find(t);
            if (!entry) return {};
            lists.push_back(entry->docs);
        }
        return intersect_all(std::move(lists));
    }

    EvidenceSet resolve(const FilterContext& ctx) const {
        std::vector<std::span<const uint32_t>> lists;
        lists.reserve(ctx.constraints.size());
        for (const auto& c : ctx.constraints) {
            auto p = posting(c.field, c.term);
            if (p.empty()) return {};
            lists.push_back(p);
        }
        std::vector<uint32_t> text_docs;
        if (ctx.text) {
            text_docs = text_match(*ctx.text);
            if (text_docs.empty()) return {};
            lists.push_back(text_docs);
        }
        if (lists.empty()) return {all_docs()};
        return {intersect_all(std::move(lists))};
    }

    // Throws NotFound for unknown ids.
    DocumentView get_document(std::string_view doc_id) const {
        auto it = doc_lookup_.find(std::string(doc_id));
        if (it == doc_lookup_.end()) throw NotFound("unknown document '" + std::string(doc_id) + "'", "id");
        return document(it->second);
    }

    DocumentView document(uint32_t doc) const {
        DocumentView v;
        v.doc = &docs_[doc];
        if (doc_article_[doc] >= 0) v.article = &articles_[static_cast<size_t>(doc_article_[doc])];
        for (auto r : doc_records_.row(doc)) v.records.push_back(&records_[r]);
        return v;
    }

    std::optional<uint32_t> doc_ordinal(std::string_view doc_id) const {
        auto it = doc_lookup_.find(std::string(doc_id));
        if (it == doc_lookup_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<uint32_t> record_ordinal(std::string_view record_id) const {
        auto it = record_lookup_.find(std::string(record_id));
        if (it == record_lookup_.end()) return std::nullopt;
        return it->second;
    }

    // Term ids of `field` carried by `doc` (ascending). Only indexed fields.
    std::span<const uint32_t> doc_terms(uint32_t doc, Field field) const {
        const auto f = static_cast<size_t>(field);
        if (is_article_field(field)) {
            const auto a = doc_article_[doc];
            if (a < 0) return {};
            return article_terms_[f].row(static_cast<size_t>(a));
        }
        return doc_terms_[f].row(doc);
    }

    const TermDictionary& dictionary(Field field) const { return fields_[static_cast<size_t>(field)]; }
    const TermDictionary& text_dictionary() const { return text_; }

    std::vector<uint32_t> all_docs() const {
        std::vector<uint32_t> all(docs_.size());
        for (uint32_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }

    // Records evidenced by at least one doc of `set`, ascending.
    std::vector<uint32_t> records_of(const EvidenceSet& set) const {
        std::vector<uint32_t> out;
        for (auto d : set.docs) {
            for (auto r : doc_records_.row(d)) out.push_back(r);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    std::span<const uint32_t> records_of_doc(uint32_t doc) const { return doc_records_.row(doc); }
    std::span<const uint32_t> docs_of_record(uint32_t record) const { return record_docs_.row(record); }
    // Records whose object is `entity` (canonical key), ascending.
    std::span<const uint32_t> records_with_object(std::string_view entity) const {
        auto it = records_by_object_.find(std::string(entity));
        if (it == records_by_object_.end()) return {};
        return it->second;
    }

    // Pmid dictionary ordinal of a doc, -1 when the doc has no pmid.
    int32_t doc_pmid(uint32_t doc) const { return doc_pmid_[doc]; }
    const std::vector<std::string>& pmids() const { return pmids_; }
    int32_t doc_article(uint32_t doc) const { return doc_article_[doc]; }

    std::string entity_display(const std::string& key) const {
        auto it = entity_displays_.find(key);
        return it == entity_displays_.end() ? key : it->second;
    }

    const Taxonomy& taxonomy() const { return taxonomy_; }
    const AliasMap& aliases() const { return aliases_; }
    const std::vector<RelationRecord>& records() const { return records_; }
    const std::vector<EvidenceDoc>& docs() const { return docs_; }
    const std::vector<ArticleMeta>& articles() const { return articles_; }
    const std::vector<FunctionalType>& functional_types() const { return functional_types_; }
    const std::vector<DerivedTuple>& derived_tuples() const { return derived_tuples_; }
    // Functional type each record grounds.
    uint32_t record_functional_type(uint32_t record) const { return record_ft_[record]; }

    // Functional types whose display name folds to `name`.
    std::vector<uint32_t> functional_types_named(std::string_view name) const {
        std::vector<uint32_t> out;
        const auto k = text::key(name);
        if (auto it = ft_by_name_.find(k); it != ft_by_name_.end()) out = it->second;
        return out;
    }

    // ---- artifact ----------------------------------------------------------

    std::string serialize() const {
        io::Writer w;
        w.raw(kMagic);
        w.varint(kFormatVersion);

        const auto types = taxonomy_.types();
        w.varint(types.size());
        for (const auto& t : types) {
            w.str(t.name);
            w.u8(static_cast<uint8_t>(t.metatype));
            w.u8(static_cast<uint8_t>(t.polarity));
        }
        auto write_map = [&](const std::map<std::string, std::string>& m) {
            w.varint(m.size());
            for (const auto& [k, v] : m) {
                w.str(k);
                w.str(v);
            }
        };
        write_map(aliases_.entries());
        write_map(aliases_.displays());
        w.varint(options_.tokenizer.min_length);
        w.strings({options_.tokenizer.stopwords.begin(), options_.tokenizer.stopwords.end()});

        w.varint(records_.size());
        for (const auto& r : records_) {
            w.str(r.id);
            w.str(r.subject);
            w.str(r.object);
            w.str(r.subject_display);
            w.str(r.object_display);
            w.str(r.relation);
            w.u8(static_cast<uint8_t>(r.source));
            w.u8(static_cast<uint8_t>(r.pair_kind));
            w.strings(r.evidence_ids);
        }
        w.varint(docs_.size());
        for (size_t i = 0; i < docs_.size(); ++i) {
            const auto& d = docs_[i];
            w.str(d.id);
            w.str(d.sentence);
            w.opt_str(d.pmid);
            w.opt_str(d.url);
            w.varint(static_cast<uint64_t>(doc_article_[i] + 1));
        }
        w.varint(articles_.size());
        for (const auto& a : articles_) {
            w.str(a.pmid);
            w.str(a.title);
            w.str(a.abstract);
            w.strings(a.authors);
            w.opt_str(a.publish_time);
            w.str(a.journal);
        }

        std::map<std::string, std::string> displays(entity_displays_.begin(), entity_displays_.end());
        write_map(displays);

        w.varint(functional_types_.size());
        for (const auto& ft : functional_types_) {
            w.str(ft.object);
            w.u8(static_cast<uint8_t>(ft.polarity));
            w.u8(static_cast<uint8_t>(ft.metatype));
            w.str(ft.display_name);
            w.strings(ft.relation_types);
            w.varint(ft.members.size());
            for (const auto& m : ft.members) {
                w.str(m.entity);
                w.sorted_ids(m.record_ords);
            }
        }

        w.strings(pmids_);

        auto write_dict = [&](const TermDictionary& dict) {
            w.varint(dict.size());
            for (const auto& t : dict.terms()) {
                w.str(t.key);
                w.str(t.display);
                w.sorted_ids(t.docs);
            }
        };
        for (const auto& dict : fields_) write_dict(dict);
        write_dict(text_);

        w.varint(derived_tuples_.size());
        for (const auto& t : derived_tuples_) {
            w.u8(static_cast<uint8_t>(t.kind));
            w.str(t.keyword);
            w.str(t.value);
            w.varint(t.articles);
        }

        w.fixed64(io::fnv1a(w.bytes()));
        return w.take();
    }

    // Throws FormatError on a bad magic, version, checksum or truncated body.
    static Index deserialize(std::string_view bytes) {
        if (bytes.size() < kMagic.size() + 8 || bytes.substr(0, kMagic.size()) != kMagic) {
            throw FormatError("not a semviz index artifact");
        }
        const auto body = bytes.substr(0, bytes.size() - 8);
        io::Reader trailer(bytes.substr(bytes.size() - 8));
        if (trailer.fixed64() != io::fnv1a(body)) throw FormatError("corrupt index: checksum mismatch");

        io::Reader r(body);
        r.raw(kMagic.size());
        if (const auto v = r.varint(); v != kFormatVersion) {
            throw FormatError("unsupported index format version " + std::to_string(v));
        }
        auto enum_u8 = [&](uint8_t limit) {
            const auto v = r.u8();
            if (v >= limit) throw FormatError("corrupt index: enum out of range");
            return v;
        };

        Index idx;
        std::vector<RelationType> types(r.count());
        for (auto& t : types) {
            t.name = r.str();
            t.metatype = static_cast<Metatype>(enum_u8(3));
            t.polarity = static_cast<Polarity>(enum_u8(3));
        }
        idx.taxonomy_ = Taxonomy(std::move(types));
        auto read_map = [&] {
            std::map<std::string, std::string> m;
            const auto n = r.count();
            for (size_t i = 0; i < n; ++i) {
                auto k = r.str();
                m.emplace(std::move(k), r.str());
            }
            return m;
        };
        auto alias_entries = read_map();
        auto alias_displays = read_map();
        idx.aliases_ = AliasMap::from_state(std::move(alias_entries), std::move(alias_displays));
        idx.options_.tokenizer.min_length = static_cast<size_t>(r.varint());
        for (auto& s : r.strings()) idx.options_.tokenizer.stopwords.insert(std::move(s));

        idx.records_.resize(r.count());
        for (auto& rec : idx.records_) {
            rec.id = r.str();
            rec.subject = r.str();
            rec.object = r.str();
            rec.subject_display = r.str();
            rec.object_display = r.str();
            rec.relation = r.str();
            rec.source = static_cast<Source>(enum_u8(2));
            rec.pair_kind = static_cast<PairKind>(enum_u8(4));
            rec.evidence_ids = r.strings();
        }
        const auto ndocs = r.count();
        idx.docs_.resize(ndocs);
        idx.doc_article_.resize(ndocs);
        std::vector<uint64_t> links(ndocs);
        for (size_t i = 0; i < ndocs; ++i) {
            auto& d = idx.docs_[i];
            d.id = r.str();
            d.sentence = r.str();
            d.pmid = r.opt_str();
            d.url = r.opt_str();
            links[i] = r.varint();
        }
        idx.articles_.resize(r.count());
        for (auto& a : idx.articles_) {
            a.pmid = r.str();
            a.title = r.str();
            a.abstract = r.str();
            a.authors = r.strings();
            a.publish_time = r.opt_str();
            a.journal = r.str();
        }
        for (size_t i = 0; i < ndocs; ++i) {
            if (links[i] > idx.articles_.size()) throw FormatError("corrupt index: article link out of range");
            idx.doc_article_[i] = static_cast<int32_t>(links[i]) - 1;
        }
        for (auto& [k, v] : read_map()) idx.entity_displays_.emplace(k, std::move(v));

        idx.functional_types_.resize(r.count());
        for (auto& ft : idx.functional_types_) {
            ft.object = r.str();
            ft.polarity = static_cast<Polarity>(enum_u8(3));
            ft.metatype = static_cast<Metatype>(enum_u8(3));
            ft.display_name = r.str();
            ft.relation_types = r.strings();
            ft.members.resize(r.count());
            for (auto& m : ft.members) {
                m.entity = r.str();
                m.record_ords = r.sorted_ids();
                for (auto ord : m.record_ords) {
                    if (ord >= idx.records_.size()) throw FormatError("corrupt index: record ordinal out of range");
                }
            }
        }

        idx.pmids_ = r.strings();

        auto read_dict = [&] {
            std::vector<TermEntry> terms(r.count());
            for (auto& t : terms) {
                t.key = r.str();
                t.display = r.str();
                t.docs = r.sorted_ids();
                if (!t.docs.empty() && t.docs.back() >= ndocs) throw FormatError("corrupt index: doc ordinal out of range");
            }
            return TermDictionary(std::move(terms));
        };
        for (auto& dict : idx.fields_) dict = read_dict();
        idx.text_ = read_dict();

        idx.derived_tuples_.resize(r.count());
        for (auto& t : idx.derived_tuples_) {
            t.kind = static_cast<DerivedTupleKind>(enum_u8(2));
            t.keyword = r.str();
            t.value = r.str();
            t.articles = static_cast<uint32_t>(r.varint());
        }
        if (!r.done()) throw FormatError("corrupt index: trailing bytes");

        idx.index_ids();
        idx.link_records();
        idx.link_pmids();
        idx.finalize();
        return idx;
    }

    static constexpr std::string_view kArtifactFile = "index.bin";

    // Writes `<dir>/index.bin`.
    void save(const std::string& dir) const;
    // Accepts either the artifact directory or the index.bin file itself.
    static Index load(const std::string& path);

    // Structural equality of the persisted state.
    friend bool operator==(const Index& a, const Index& b) { return a.serialize() == b.serialize(); }

private:
    static std::vector<uint32_t> intersect_all(std::vector<std::span<const uint32_t>> lists) {
        std::sort(lists.begin(), lists.end(), [](auto a, auto b) { return a.size() < b.size(); });
        std::vector<uint32_t> acc(lists.front().begin(), lists.front().end());
        for (size_t i = 1; i < lists.size() && !acc.empty(); ++i) acc = intersect(acc, lists[i]);
        return acc;
    }

    void index_ids() {
        doc_lookup_.clear();
        doc_lookup_.reserve(docs_.size());
        for (uint32_t i = 0; i < docs_.size(); ++i) {
            if (!doc_lookup_.emplace(docs_[i].id, i).second) {
                throw BuildError("duplicate evidence doc id '" + docs_[i].id + "'", docs_[i].id);
            }
        }
        record_lookup_.clear();
        record_lookup_.reserve(records_.size());
        for (uint32_t i = 0; i < records_.size(); ++i) {
            if (!record_lookup_.emplace(records_[i].id, i).second) {
                throw BuildError("duplicate record id '" + records_[i].id + "'", records_[i].id);
            }
        }
    }

    // Alias display, else the most frequent surface form (ties: smallest).
    void compute_entity_displays() {
        std::unordered_map<std::string, std::map<std::string, size_t>> forms;
        for (const auto& r : records_) {
            ++forms[r.subject][r.subject_display.empty() ? r.subject : r.subject_display];
            ++forms[r.object][r.object_display.empty() ? r.object : r.object_display];
        }
        for (auto& [entity, counts] : forms) {
            if (auto alias = aliases_.display(entity)) {
                entity_displays_[entity] = *alias;
                continue;
            }
            const std::string* best = nullptr;
            size_t best_count = 0;
            for (const auto& [form, n] : counts) {
                if (n > best_count) {
                    best = &form;
                    best_count = n;
                }
            }
            entity_displays_[entity] = *best;
        }
    }

    // doc <-> record links and record -> functional type.
    void link_records() {
        std::vector<std::vector<uint32_t>> per_doc(docs_.size());
        record_docs_ = {};
        for (uint32_t i = 0; i < records_.size(); ++i) {
            const auto& r = records_[i];
            if (r.evidence_ids.empty()) throw BuildError("record '" + r.id + "' has no evidence", r.id);
            std::vector<uint32_t> ords;
            for (const auto& e : r.evidence_ids) {
                auto it = doc_lookup_.find(e);
                if (it == doc_lookup_.end()) {
                    throw BuildError("record '" + r.id + "' references unknown evidence '" + e + "'", r.id);
                }
                ords.push_back(it->second);
            }
            std::sort(ords.begin(), ords.end());
            ords.erase(std::unique(ords.begin(), ords.end()), ords.end());
            for (auto d : ords) per_doc[d].push_back(i);
            record_docs_.values.insert(record_docs_.values.end(), ords.begin(), ords.end());
            record_docs_.offsets.push_back(static_cast<uint32_t>(record_docs_.values.size()));
        }
        doc_records_ = {};
        for (const auto& rs : per_doc) {
            doc_records_.values.insert(doc_records_.values.end(), rs.begin(), rs.end());
            doc_records_.offsets.push_back(static_cast<uint32_t>(doc_records_.values.size()));
        }
        record_ft_.assign(records_.size(), 0);
        ft_by_name_.clear();
        for (uint32_t f = 0; f < functional_types_.size(); ++f) {
            for (const auto& m : functional_types_[f].members) {
                for (auto r : m.record_ords) record_ft_[r] = f;
            }
            ft_by_name_[text::key(functional_types_[f].display_name)].push_back(f);
        }
        records_by_object_.clear();
        for (uint32_t i = 0; i < records_.size(); ++i) records_by_object_[records_[i].object].push_back(i);
    }

    void build_pmids() {
        std::vector<std::string> pmids;
        for (const auto& d : docs_) {
            if (d.pmid) pmids.push_back(*d.pmid);
        }
        std::sort(pmids.begin(), pmids.end(), [](const std::string& a, const std::string& b) { return text::natural_less(a, b); });
        pmids.erase(std::unique(pmids.begin(), pmids.end()), pmids.end());
        pmids_ = std::move(pmids);
        link_pmids();
    }

    void link_pmids() {
        std::unordered_map<std::string_view, int32_t> ord;
        for (size_t i = 0; i < pmids_.size(); ++i) ord.emplace(pmids_[i], static_cast<int32_t>(i));
        doc_pmid_.assign(docs_.size(), -1);
        for (size_t i = 0; i < docs_.size(); ++i) {
            if (docs_[i].pmid) {
                auto it = ord.find(*docs_[i].pmid);
                if (it == ord.end()) throw FormatError("corrupt index: pmid dictionary incomplete");
                doc_pmid_[i] = it->second;
            }
        }
    }

    // Emits (term key, display) pairs of `field` for one record or one article.
    template <typename Emit>
    void record_terms(uint32_t record, Field field, Emit&& emit) const {
        const auto& r = records_[record];
        const auto type = taxonomy_.lookup(r.relation);
        const auto roles = type.roles();
        auto entity = [&](const std::string& key) { emit(key, entity_display(key)); };
        switch (field) {
        case Field::Subject: entity(r.subject); break;
        case Field::Object: entity(r.object); break;
        case Field::RelationType: emit(text::key(r.relation), r.relation); break;
        case Field::Metatype: emit(text::key(to_string(type.metatype)), std::string(to_string(type.metatype))); break;
        case Field::RoleSubject:
            if (roles && roles->first == Role::Subject) entity(r.subject);
            break;
        case Field::RoleObject:
            if (roles && roles->second == Role::Object) entity(r.object);
            break;
        case Field::RoleEnzyme:
            if (roles && roles->first == Role::Enzyme) entity(r.subject);
            break;
        case Field::RoleSubstrate:
            if (roles && roles->second == Role::Substrate) entity(r.object);
            break;
        case Field::Chemical:
            if (r.pair_kind == PairKind::ChemicalGene || r.pair_kind == PairKind::ChemicalDisease) entity(r.subject);
            break;
        case Field::Gene:
            if (r.pair_kind == PairKind::ChemicalGene) entity(r.object);
            if (r.pair_kind == PairKind::GeneDisease) entity(r.subject);
            break;
        case Field::Disease:
            if (r.pair_kind == PairKind::ChemicalDisease || r.pair_kind == PairKind::GeneDisease) entity(r.object);
            break;
        case Field::FunctionalType: {
            const auto& name = functional_types_[record_ft_[record]].display_name;
            emit(text::key(name), name);
            break;
        }
        case Field::PairKind: emit(std::string(to_string(r.pair_kind)), std::string(to_string(r.pair_kind))); break;
        case Field::Source: emit(std::string(to_string(r.source)), std::string(to_string(r.source))); break;
        default: break;
        }
    }

    template <typename Emit>
    void article_terms(const ArticleMeta& a, Field field, Emit&& emit) const {
        switch (field) {
        case Field::Journal:
            if (!text::trim(a.journal).empty()) emit(text::key(a.journal), a.journal);
            break;
        case Field::Author:
            for (const auto& name : a.authors) emit(text::key(name), name);
            break;
        case Field::PublishTime:
            if (a.publish_time) {
                auto b = month_bucket(*a.publish_time);
                emit(b, b);
            }
            break;
        case Field::AbstractKeyword:
            for (auto& t : text::tokenize(a.abstract, options_.tokenizer)) emit(t, t);
            break;
        default: break;
        }
    }

    void build_postings() {
        for (size_t f = 0; f < kIndexedFieldCount; ++f) {
            const auto field = static_cast<Field>(f);
            struct Acc {
                std::string display;
                std::vector<uint32_t> docs;
            };
            std::unordered_map<std::string, Acc> acc;
            auto add = [&](uint32_t doc) {
                return [&, doc](const std::string& key, const std::string& display) {
                    auto [it, fresh] = acc.try_emplace(key);
                    if (fresh) it->second.display = display;
                    auto& docs = it->second.docs;
                    if (docs.empty() || docs.back() != doc) docs.push_back(doc);
                };
            };
            if (is_article_field(field)) {
                for (uint32_t d = 0; d < docs_.size(); ++d) {
                    if (doc_article_[d] >= 0) article_terms(articles_[static_cast<size_t>(doc_article_[d])], field, add(d));
                }
            } else {
                for (uint32_t d = 0; d < docs_.size(); ++d) {
                    for (auto r : doc_records_.row(d)) record_terms(r, field, add(d));
                }
            }
            std::vector<TermEntry> terms;
            terms.reserve(acc.size());
            for (auto& [key, a] : acc) terms.push_back({key, std::move(a.display), std::move(a.docs)});
            std::sort(terms.begin(), terms.end(), [](const TermEntry& x, const TermEntry& y) { return x.key < y.key; });
            fields_[f] = TermDictionary(std::move(terms));
        }
    }

    void build_text_index() {
        std::unordered_map<std::string, std::vector<uint32_t>> acc;
        std::vector<std::vector<std::string>> article_tokens(articles_.size());
        for (size_t a = 0; a < articles_.size(); ++a) {
            auto t = text::tokenize(articles_[a].title, options_.tokenizer);
            auto b = text::tokenize(articles_[a].abstract, options_.tokenizer);
            t.insert(t.end(), b.begin(), b.end());
            article_tokens[a] = std::move(t);
        }
        for (uint32_t d = 0; d < docs_.size(); ++d) {
            auto add = [&](const std::string& tok) {
                auto& v = acc[tok];
                if (v.empty() || v.back() != d) v.push_back(d);
            };
            for (const auto& tok : text::tokenize(docs_[d].sentence, options_.tokenizer)) add(tok);
            if (doc_article_[d] >= 0) {
                for (const auto& tok : article_tokens[static_cast<size_t>(doc_article_[d])]) add(tok);
            }
        }
        std::vector<TermEntry> terms;
        terms.reserve(acc.size());
        for (auto& [tok, docs] : acc) terms.push_back({tok, tok, std::move(docs)});
        std::sort(terms.begin(), terms.end(), [](const TermEntry& x, const TermEntry& y) { return x.key < y.key; });
        text_ = TermDictionary(std::move(terms));
    }

    void build_derived_tuples() {
        std::map<std::tuple<DerivedTupleKind, std::string, std::string>, uint32_t> counts;
        for (const auto& a : articles_) {
            auto tokens = text::tokenize(a.abstract, options_.tokenizer);
            std::sort(tokens.begin(), tokens.end());
            tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
            const auto journal = text::trim(a.journal);
            for (const auto& t : tokens) {
                if (!journal.empty()) ++counts[{DerivedTupleKind::KeywordJournal, t, std::string(journal)}];
                if (a.publish_time) ++counts[{DerivedTupleKind::KeywordMonth, t, month_bucket(*a.publish_time)}];
            }
        }
        derived_tuples_.clear();
        derived_tuples_.reserve(counts.size());
        for (auto& [k, n] : counts) derived_tuples_.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), n});
    }

    // Rebuilds forward lists from the postings.
    void finalize() {
        for (size_t f = 0; f < kIndexedFieldCount; ++f) {
            const auto field = static_cast<Field>(f);
            const bool by_article = is_article_field(field);
            const size_t rows = by_article ? articles_.size() : docs_.size();
            std::vector<std::vector<uint32_t>> lists(rows);
            const auto& terms = fields_[f].terms();
            for (uint32_t t = 0; t < terms.size(); ++t) {
                for (auto d : terms[t].docs) {
                    const auto row = by_article ? doc_article_[d] : static_cast<int32_t>(d);
                    if (row < 0) continue;
                    auto& l = lists[static_cast<size_t>(row)];
                    if (l.empty() || l.back() != t) l.push_back(t);
                }
            }
            ForwardLists fw;
            fw.offsets.reserve(rows + 1);
            for (const auto& l : lists) {
                fw.values.insert(fw.values.end(), l.begin(), l.end());
                fw.offsets.push_back(static_cast<uint32_t>(fw.values.size()));
            }
            (by_article ? article_terms_[f] : doc_terms_[f]) = std::move(fw);
        }
    }

    Taxonomy taxonomy_;
    AliasMap aliases_;
    IndexOptions options_;

    std::vector<RelationRecord> records_;
    std::vector<EvidenceDoc> docs_;
    std::vector<ArticleMeta> articles_;
    std::vector<int32_t> doc_article_;
    std::vector<std::string> pmids_;
    std::vector<int32_t> doc_pmid_;
    std::unordered_map<std::string, std::string> entity_displays_;

    std::array<TermDictionary, kIndexedFieldCount> fields_;
    TermDictionary text_;
    std::vector<FunctionalType> functional_types_;
    std::vector<DerivedTuple> derived_tuples_;

    // derived on load
    std::unordered_map<std::string, uint32_t> doc_lookup_;
    std::unordered_map<std::string, uint32_t> record_lookup_;
    ForwardLists doc_records_;
    ForwardLists record_docs_;
    std::vector<uint32_t> record_ft_;
    std::unordered_map<std::string, std::vector<uint32_t>> ft_by_name_;
    std::unordered_map<std::string, std::vector<uint32_t>> records_by_object_;
    std::array<ForwardLists, kIndexedFieldCount> doc_terms_;
    std::array<ForwardLists, kIndexedFieldCount> article_terms_;
};

inline void Index::save(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto path = fs::path(dir) / kArtifactFile;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io_error", "cannot write index artifact '" + path.string() + "'", path.string());
    const auto bytes = serialize();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("io_error", "failed writing index artifact '" + path.string() + "'", path.string());
}

inline Index Index::load(const std::string& path) {
    namespace fs = std::filesystem;
    fs::path file(path);
    if (fs::is_directory(file)) file /= kArtifactFile;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("io_error", "cannot read index artifact '" + file.string() + "'", file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

inline Index build_index(std::vector<RelationRecord> records, AlignedCorpus corpus, const Taxonomy& taxonomy,
                         const AliasMap& aliases = {}, IndexOptions options = {}) {
    return Index::build(std::move(records), std::move(corpus), taxonomy, aliases, std::move(options));
}

inline std::vector<std::string> tokenize(std::string_view text_value) { return text::tokenize(text_value); }

} // namespace semviz

#pragma once

// Visualization-facing aggregations over a resolved evidence set.

#include "semviz/index.hpp"
#include "semviz/semantics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace semviz {

enum class CountMode : uint8_t { Docs, Articles };

struct TermCount {
    std::string term; // display form
    std::string key;  // posting key
    size_t count = 0;

    friend bool operator==(const TermCount&, const TermCount&) = default;
};

struct HeatMatrix {
    std::vector<TermCount> x_terms;
    std::vector<TermCount> y_terms;
    std::vector<std::vector<size_t>> cells; // [y][x]

    bool empty() const { return x_terms.empty() && y_terms.empty(); }
    friend bool operator==(const HeatMatrix&, const HeatMatrix&) = default;
};

struct TableRow {
    std::string doc_id;
    std::string sentence;
    std::optional<std::string> url;
    std::optional<std::string> pmid;
    std::string subject;
    std::string object;
    std::string relation;

    friend bool operator==(const TableRow&, const TableRow&) = default;
};

struct DataTable {
    size_t total = 0;
    std::vector<TableRow> rows;
};

struct Metrics {
    size_t evidence_count = 0;
    size_t article_count = 0;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

enum class Granularity : uint8_t { Year, Month };

struct HistogramBucket {
    std::string bucket;
    size_t count = 0;

    friend bool operator==(const HistogramBucket&, const HistogramBucket&) = default;
};

inline constexpr std::string_view kUnknownBucket = "unknown";
inline constexpr size_t kUnlimited = std::numeric_limits<size_t>::max();

namespace detail {

inline void order_and_truncate(std::vector<TermCount>& terms, size_t k) {
    std::sort(terms.begin(), terms.end(), [](const TermCount& a, const TermCount& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.term != b.term) return a.term < b.term;
        return a.key < b.key;
    });
    if (terms.size() > k) terms.resize(k);
}

inline size_t distinct_pmids(const Index& index, const std::vector<uint32_t>& docs) {
    std::vector<int32_t> p;
    p.reserve(docs.size());
    for (auto d : docs) {
        if (index.doc_pmid(d) >= 0) p.push_back(index.doc_pmid(d));
    }
    std::sort(p.begin(), p.end());
    return static_cast<size_t>(std::unique(p.begin(), p.end()) - p.begin());
}

// Upstream-regulator facet: regulator -> witnessing docs, conjunctive over every
// functional_type constraint, restricted to resolve(ctx without those constraints).
inline std::vector<TermCount> upstream_cloud(const Index& index, const FilterContext& ctx, Field field, size_t k,
                                             CountMode mode) {
    FilterContext base;
    base.text = ctx.text;
    std::vector<std::string> names;
    for (const auto& c : ctx.constraints) {
        if (c.field == Field::FunctionalType) names.push_back(c.term);
        else base.constraints.insert(c);
    }
    if (names.empty()) {
        throw QueryError("field '" + std::string(field_name(field)) + "' requires a functional_type filter",
                         std::string(field_name(field)));
    }
    const bool opposite_sign = field == Field::OppositeUpstreamRegulator;
    std::optional<std::map<std::string, std::vector<uint32_t>>> acc;
    for (const auto& name : names) {
        std::map<std::string, std::vector<uint32_t>> docs_of;
        for (auto f : index.functional_types_named(name)) {
            const auto& ft = index.functional_types()[f];
            auto result = opposite_sign ? opposite_upstream_regulators(index, ft) : upstream_regulators(index, ft);
            for (const auto& e : result.entries) {
                auto& docs = docs_of[e.entity];
                for (auto r : e.record_ords) {
                    auto rd = index.docs_of_record(r);
                    docs.insert(docs.end(), rd.begin(), rd.end());
                }
            }
        }
        for (auto& [_, docs] : docs_of) {
            std::sort(docs.begin(), docs.end());
            docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
        }
        if (!acc) {
            acc = std::move(docs_of);
            continue;
        }
        std::map<std::string, std::vector<uint32_t>> merged;
        for (auto& [entity, docs] : *acc) {
            auto it = docs_of.find(entity);
            if (it == docs_of.end()) continue;
            auto both = intersect(docs, it->second);
            if (!both.empty()) merged.emplace(entity, std::move(both));
        }
        acc = std::move(merged);
    }
    const auto scope = index.resolve(base);
    std::vector<TermCount> out;
    for (auto& [entity, docs] : *acc) {
        auto hit = intersect(docs, scope.docs);
        const size_t n = mode == CountMode::Docs ? hit.size() : distinct_pmids(index, hit);
        if (n > 0) out.push_back({index.entity_display(entity), entity, n});
    }
    order_and_truncate(out, k);
    return out;
}

} // namespace detail

// Top-k terms of `field` over resolve(ctx), counted in evidence docs (or distinct
// articles); ordered by count desc, term asc.
inline std::vector<TermCount> tag_cloud(const Index& index, const FilterContext& ctx, Field field, size_t k,
                                        CountMode mode = CountMode::Docs) {
    if (k < 1) throw QueryError("k must be at least 1", "k");
    if (field == Field::UpstreamRegulator || field == Field::OppositeUpstreamRegulator) {
        return detail::upstream_cloud(index, ctx, field, k, mode);
    }
    const auto set = index.resolve(ctx);
    const auto& dict = index.dictionary(field);
    std::unordered_map<uint32_t, size_t> counts;
    std::unordered_map<uint32_t, std::vector<int32_t>> pmids;
    for (auto d : set.docs) {
        for (auto t : index.doc_terms(d, field)) {
            if (mode == CountMode::Docs) ++counts[t];
            else if (index.doc_pmid(d) >= 0) pmids[t].push_back(index.doc_pmid(d));
        }
    }
    for (auto& [t, p] : pmids) {
        std::sort(p.begin(), p.end());
        counts[t] = static_cast<size_t>(std::unique(p.begin(), p.end()) - p.begin());
    }
    std::vector<TermCount> out;
    out.reserve(counts.size());
    for (const auto& [t, n] : counts) {
        if (n > 0) out.push_back({dict[t].display, dict[t].key, n});
    }
    detail::order_and_truncate(out, k);
    return out;
}

// Marginal top-kx / top-ky terms; cell(y, x) counts docs of resolve(ctx) carrying
// both terms. All-zero rows and columns are dropped.
inline HeatMatrix heat_map(const Index& index, const FilterContext& ctx, Field field_x, Field field_y, size_t kx,
                           size_t ky) {
    if (field_x == field_y) throw QueryError("heat map axes must be distinct fields", std::string(field_name(field_x)));
    for (auto f : {field_x, field_y}) {
        if (!is_indexed(f)) {
            throw QueryError("field '" + std::string(field_name(f)) + "' cannot be a heat map axis", std::string(field_name(f)));
        }
    }
    HeatMatrix m;
    auto xs = tag_cloud(index, ctx, field_x, kx);
    auto ys = tag_cloud(index, ctx, field_y, ky);
    if (xs.empty() || ys.empty()) return m;

    const auto& dx = index.dictionary(field_x);
    const auto& dy = index.dictionary(field_y);
    std::unordered_map<uint32_t, size_t> col, row;
    for (size_t i = 0; i < xs.size(); ++i) col.emplace(*dx.id(xs[i].key), i);
    for (size_t i = 0; i < ys.size(); ++i) row.emplace(*dy.id(ys[i].key), i);

    std::vector<std::vector<size_t>> cells(ys.size(), std::vector<size_t>(xs.size(), 0));
    const auto set = index.resolve(ctx);
    for (auto d : set.docs) {
        const auto tx = index.doc_terms(d, field_x);
        const auto ty = index.doc_terms(d, field_y);
        for (auto y : ty) {
            auto ry = row.find(y);
            if (ry == row.end()) continue;
            for (auto x : tx) {
                auto cx = col.find(x);
                if (cx != col.end()) ++cells[ry->second][cx->second];
            }
        }
    }

    std::vector<bool> keep_row(ys.size(), false), keep_col(xs.size(), false);
    for (size_t y = 0; y < ys.size(); ++y) {
        for (size_t x = 0; x < xs.size(); ++x) {
            if (cells[y][x]) keep_row[y] = keep_col[x] = true;
        }
    }
    for (size_t x = 0; x < xs.size(); ++x) {
        if (keep_col[x]) m.x_terms.push_back(xs[x]);
    }
    for (size_t y = 0; y < ys.size(); ++y) {
        if (!keep_row[y]) continue;
        m.y_terms.push_back(ys[y]);
        std::vector<size_t> r;
        for (size_t x = 0; x < xs.size(); ++x) {
            if (keep_col[x]) r.push_back(cells[y][x]);
        }
        m.cells.push_back(std::move(r));
    }
    return m;
}

// Rows ordered by (pmid asc, doc ordinal asc), docs without pmid last.
inline DataTable data_table(const Index& index, const FilterContext& ctx, size_t page, size_t page_size) {
    if (page_size < 1) throw QueryError("page_size must be at least 1", "page_size");
    auto docs = index.resolve(ctx).docs;
    auto pmid_rank = [&](uint32_t d) {
        const auto p = index.doc_pmid(d);
        return p < 0 ? std::numeric_limits<int64_t>::max() : static_cast<int64_t>(p);
    };
    std::stable_sort(docs.begin(), docs.end(), [&](uint32_t a, uint32_t b) {
        return std::pair{pmid_rank(a), a} < std::pair{pmid_rank(b), b};
    });
    DataTable table;
    table.total = docs.size();
    if (page >= (docs.size() + page_size - 1) / page_size) return table;
    const size_t begin = page * page_size;
    const size_t end = std::min(docs.size(), begin + page_size);
    for (size_t i = begin; i < end; ++i) {
        const auto view = index.document(docs[i]);
        TableRow row;
        row.doc_id = view.doc->id;
        row.sentence = view.doc->sentence;
        row.url = view.doc->url;
        row.pmid = view.doc->pmid;
        if (!view.records.empty()) {
            const auto* r = view.records.front();
            row.subject = r->subject_display;
            row.object = r->object_display;
            row.relation = r->relation;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline Metrics metrics(const Index& index, const FilterContext& ctx) {
    const auto set = index.resolve(ctx);
    return {set.size(), detail::distinct_pmids(index, set.docs)};
}

// Buckets over the aligned article's publish_time, ascending; undated or
// unaligned docs go to a trailing "unknown" bucket.
inline std::vector<HistogramBucket> date_histogram(const Index& index, const FilterContext& ctx, Granularity g) {
    std::map<std::string, size_t> buckets;
    size_t unknown = 0;
    for (auto d : index.resolve(ctx).docs) {
        const auto a = index.doc_article(d);
        if (a < 0 || !index.articles()[static_cast<size_t>(a)].publish_time) {
            ++unknown;
            continue;
        }
        const auto& date = *index.articles()[static_cast<size_t>(a)].publish_time;
        ++buckets[g == Granularity::Year ? date.substr(0, 4) : month_bucket(date)];
    }
    std::vector<HistogramBucket> out;
    for (auto& [b, n] : buckets) out.push_back({b, n});
    if (unknown) out.push_back({std::string(kUnknownBucket), unknown});
    return out;
}

} // namespace semviz

#pragma once

// Request execution shared by the HTTP server and the command-line client.
// Requests and responses are JSON documents; the same request always yields
// the same response for a given index artifact.

#include "semviz/aggregate.hpp"
#include "semviz/index.hpp"
#include "semviz/pathways.hpp"
#include "semviz/semantics.hpp"

#include <json.hpp>

#include <map>
#include <mutex>
#include <set>
#include <string>
#include <string_view>

namespace semviz {

using json = nlohmann::json;

inline constexpr std::array<std::string_view, 11> kOperations{
    "stats", "tagcloud", "heatmap", "table", "metrics", "histogram",
    "functional-types", "upstream", "opposite-upstream", "pathways", "doc"};

inline json error_body(const Error& e) {
    json err = {{"code", e.code()}, {"message", e.what()}};
    if (!e.field().empty()) err["field"] = e.field();
    return {{"error", std::move(err)}};
}

inline std::string dump(const json& j, int indent = -1) {
    return j.dump(indent, ' ', false, json::error_handler_t::replace);
}

namespace request {

inline const json* member(const json& req, const char* key) {
    if (!req.is_object()) return nullptr;
    auto it = req.find(key);
    if (it == req.end() || it->is_null()) return nullptr;
    return &*it;
}

inline std::string string_param(const json& req, const char* key) {
    const auto* v = member(req, key);
    if (!v) throw QueryError(std::string("missing required parameter '") + key + "'", key);
    if (!v->is_string()) throw QueryError(std::string("parameter '") + key + "' must be a string", key);
    return v->get<std::string>();
}

inline std::optional<std::string> optional_string(const json& req, const char* key) {
    const auto* v = member(req, key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw QueryError(std::string("parameter '") + key + "' must be a string", key);
    return v->get<std::string>();
}

inline uint64_t uint_param(const json& req, const char* key, uint64_t fallback, uint64_t minimum = 0) {
    const auto* v = member(req, key);
    if (!v) return fallback;
    uint64_t value = 0;
    if (v->is_number_unsigned()) {
        value = v->get<uint64_t>();
    } else if (v->is_number_integer() && v->get<int64_t>() >= 0) {
        value = static_cast<uint64_t>(v->get<int64_t>());
    } else if (v->is_string()) {
        const auto s = v->get<std::string>();
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 18) {
            throw QueryError(std::string("parameter '") + key + "' must be a non-negative integer", key);
        }
        value = std::stoull(s);
    } else {
        throw QueryError(std::string("parameter '") + key + "' must be a non-negative integer", key);
    }
    if (value < minimum) {
        throw QueryError(std::string("parameter '") + key + "' must be at least " + std::to_string(minimum), key);
    }
    return value;
}

inline Field field_param(const json& req, const char* key) {
    const auto name = string_param(req, key);
    auto f = parse_field(name);
    if (!f) throw QueryError("unknown field '" + name + "'", key);
    return *f;
}

inline CountMode count_mode(const json& req) {
    const auto v = optional_string(req, "count_by").value_or("docs");
    if (v == "docs") return CountMode::Docs;
    if (v == "articles") return CountMode::Articles;
    throw QueryError("count_by must be 'docs' or 'articles'", "count_by");
}

// `filters: [{field, term}]`, `text: string`.
inline FilterContext filter_context(const json& req) {
    FilterContext ctx;
    if (const auto* filters = member(req, "filters")) {
        if (!filters->is_array()) throw QueryError("filters must be a list", "filters");
        for (size_t i = 0; i < filters->size(); ++i) {
            const auto& f = (*filters)[i];
            const std::string where = "filters[" + std::to_string(i) + "]";
            if (!f.is_object()) throw QueryError(where + " must be an object", where);
            if (!f.contains("field") || !f["field"].is_string()) {
                throw QueryError(where + " needs a string 'field'", where + ".field");
            }
            if (!f.contains("term") || !f["term"].is_string()) {
                throw QueryError(where + " needs a string 'term'", where + ".term");
            }
            const auto name = f["field"].get<std::string>();
            auto field = parse_field(name);
            if (!field) throw QueryError("unknown field '" + name + "'", where + ".field");
            if (!is_indexed(*field)) throw QueryError("field '" + name + "' cannot be used as a filter", where + ".field");
            ctx.add(*field, f["term"].get<std::string>());
        }
    }
    ctx.text = optional_string(req, "text");
    return ctx;
}

} // namespace request

class Engine {
public:
    explicit Engine(Index index) : index_(std::move(index)) {
        graphs_.emplace(std::set<std::string>{"activation"}, build_graph(index_, {"Activation"}));
    }

    const Index& index() const { return index_; }

    // Throws semviz::Error subclasses for invalid requests.
    json execute(std::string_view op, const json& req) const {
        if (!req.is_object() && !req.is_null()) throw QueryError("request body must be a JSON object");
        if (op == "stats") return stats();
        if (op == "tagcloud") return tagcloud(req);
        if (op == "heatmap") return heatmap(req);
        if (op == "table") return table(req);
        if (op == "metrics") return metrics_of(req);
        if (op == "histogram") return histogram(req);
        if (op == "functional-types") return functional_types(req);
        if (op == "upstream") return upstream(req, false);
        if (op == "opposite-upstream") return upstream(req, true);
        if (op == "pathways") return pathways(req);
        if (op == "doc") return doc(req);
        throw NotFound("unknown operation '" + std::string(op) + "'", "operation");
    }

    // Never throws for request errors; they become {"error": {...}}.
    json respond(std::string_view op, const json& req, int* status = nullptr) const {
        try {
            auto out = execute(op, req);
            if (status) *status = 200;
            return out;
        } catch (const NotFound& e) {
            if (status) *status = 404;
            return error_body(e);
        } catch (const QueryError& e) {
            if (status) *status = 400;
            return error_body(e);
        } catch (const Error& e) {
            if (status) *status = 400;
            return error_body(e);
        } catch (const std::exception& e) {
            if (status) *status = 500;
            return error_body(Error("internal_error", e.what()));
        }
    }

private:
    json stats() const {
        const auto m = semviz::metrics(index_, {});
        return {{"evidence_count", m.evidence_count},
                {"article_count", m.article_count},
                {"functional_type_count", index_.functional_types().size()},
                {"record_count", index_.records().size()}};
    }

    static json terms_json(const std::vector<TermCount>& terms) {
        auto arr = json::array();
        for (const auto& t : terms) arr.push_back({{"term", t.term}, {"key", t.key}, {"count", t.count}});
        return arr;
    }

    static json filters_echo(const FilterContext& ctx) {
        auto arr = json::array();
        for (const auto& c : ctx.constraints) arr.push_back({{"field", field_name(c.field)}, {"term", c.term}});
        json out = {{"filters", std::move(arr)}};
        if (ctx.text) out["text"] = *ctx.text;
        return out;
    }

    json tagcloud(const json& req) const {
        const auto ctx = request::filter_context(req);
        const auto field = request::field_param(req, "field");
        const auto k = request::uint_param(req, "k", 10, 1);
        const auto mode = request::count_mode(req);
        auto out = filters_echo(ctx);
        out["field"] = field_name(field);
        out["count_by"] = mode == CountMode::Docs ? "docs" : "articles";
        out["terms"] = terms_json(tag_cloud(index_, ctx, field, k, mode));
        return out;
    }

    json heatmap(const json& req) const {
        const auto ctx = request::filter_context(req);
        const auto fx = request::field_param(req, "x");
        const auto fy = request::field_param(req, "y");
        const auto kx = request::uint_param(req, "kx", 10, 1);
        const auto ky = request::uint_param(req, "ky", 10, 1);
        const auto m = heat_map(index_, ctx, fx, fy, kx, ky);
        auto out = filters_echo(ctx);
        out["x"] = field_name(fx);
        out["y"] = field_name(fy);
        out["x_terms"] = terms_json(m.x_terms);
        out["y_terms"] = terms_json(m.y_terms);
        out["cells"] = m.cells;
        return out;
    }

    json doc_json(uint32_t ord, bool with_records) const {
        const auto view = index_.document(ord);
        json d = {{"id", view.doc->id}, {"sentence", view.doc->sentence}, {"aligned", view.aligned()}};
        d["pmid"] = view.doc->pmid ? json(*view.doc->pmid) : json(nullptr);
        d["url"] = view.doc->url ? json(*view.doc->url) : json(nullptr);
        if (view.article) {
            const auto& a = *view.article;
            d["article"] = {{"pmid", a.pmid},
                            {"title", a.title},
                            {"abstract", a.abstract},
                            {"authors", a.authors},
                            {"journal", a.journal},
                            {"publish_time", a.publish_time ? json(*a.publish_time) : json(nullptr)}};
        }
        if (with_records) {
            auto recs = json::array();
            for (const auto* r : view.records) {
                recs.push_back({{"id", r->id},
                                {"subject", r->subject_display},
                                {"object", r->object_display},
                                {"relation", r->relation},
                                {"source", to_string(r->source)},
                                {"pair_kind", to_string(r->pair_kind)}});
            }
            d["records"] = std::move(recs);
        }
        return d;
    }

    json table(const json& req) const {
        const auto ctx = request::filter_context(req);
        const auto page = request::uint_param(req, "page", 0);
        const auto page_size = request::uint_param(req, "page_size", 20, 1);
        const auto t = data_table(index_, ctx, page, page_size);
        auto out = filters_echo(ctx);
        out["page"] = page;
        out["page_size"] = page_size;
        out["total"] = t.total;
        auto rows = json::array();
        for (const auto& r : t.rows) {
            rows.push_back({{"doc_id", r.doc_id},
                            {"sentence", r.sentence},
                            {"url", r.url ? json(*r.url) : json(nullptr)},
                            {"pmid", r.pmid ? json(*r.pmid) : json(nullptr)},
                            {"subject", r.subject},
                            {"object", r.object},
                            {"relation", r.relation}});
        }
        out["rows"] = std::move(rows);
        return out;
    }

    json metrics_of(const json& req) const {
        const auto ctx = request::filter_context(req);
        const auto m = semviz::metrics(index_, ctx);
        auto out = filters_echo(ctx);
        out["evidence_count"] = m.evidence_count;
        out["article_count"] = m.article_count;
        return out;
    }

    json histogram(const json& req) const {
        const auto ctx = request::filter_context(req);
        const auto g = request::optional_string(req, "granularity").value_or("month");
        if (g != "month" && g != "year") throw QueryError("granularity must be 'year' or 'month'", "granularity");
        auto out = filters_echo(ctx);
        out["granularity"] = g;
        auto buckets = json::array();
        for (const auto& b : date_histogram(index_, ctx, g == "year" ? Granularity::Year : Granularity::Month)) {
            buckets.push_back({{"bucket", b.bucket}, {"count", b.count}});
        }
        out["buckets"] = std::move(buckets);
        return out;
    }

    json records_json(const std::vector<uint32_t>& ords) const {
        auto arr = json::array();
        for (auto r : ords) arr.push_back(index_.records()[r].id);
        return arr;
    }

    json functional_types(const json& req) const {
        const auto limit = request::uint_param(req, "limit", kUnlimited);
        bool with_members = true;
        if (const auto* m = request::member(req, "members")) {
            if (!m->is_boolean()) throw QueryError("members must be a boolean", "members");
            with_members = m->get<bool>();
        }
        auto arr = json::array();
        for (const auto& ft : index_.functional_types()) {
            if (arr.size() >= limit) break;
            json j = {{"name", ft.display_name},
                      {"object", ft.object},
                      {"object_display", index_.entity_display(ft.object)},
                      {"polarity", to_string(ft.polarity)},
                      {"metatype", to_string(ft.metatype)},
                      {"relation_types", ft.relation_types},
                      {"member_count", ft.members.size()}};
            if (with_members) {
                auto members = json::array();
                for (const auto& m : ft.members) {
                    members.push_back({{"entity", m.entity},
                                       {"display", index_.entity_display(m.entity)},
                                       {"record_ids", records_json(m.record_ords)}});
                }
                j["members"] = std::move(members);
            }
            arr.push_back(std::move(j));
        }
        return {{"total", index_.functional_types().size()}, {"functional_types", std::move(arr)}};
    }

    json upstream(const json& req, bool opposite_sign) const {
        const auto name = request::string_param(req, "name");
        const auto matches = index_.functional_types_named(name);
        if (matches.empty()) throw NotFound("unknown functional type '" + name + "'", "name");
        std::map<std::pair<std::string, std::string>, std::vector<uint32_t>> merged;
        auto notes = json::array();
        for (auto f : matches) {
            const auto& ft = index_.functional_types()[f];
            auto result = opposite_sign ? opposite_upstream_regulators(index_, ft) : upstream_regulators(index_, ft);
            if (result.note) notes.push_back(*result.note);
            for (auto& e : result.entries) {
                auto& ords = merged[{e.entity, e.via_member}];
                ords.insert(ords.end(), e.record_ords.begin(), e.record_ords.end());
            }
        }
        auto entries = json::array();
        for (auto& [key, ords] : merged) {
            std::sort(ords.begin(), ords.end());
            ords.erase(std::unique(ords.begin(), ords.end()), ords.end());
            entries.push_back({{"entity", key.first},
                               {"display", index_.entity_display(key.first)},
                               {"via_member", key.second},
                               {"via_member_display", index_.entity_display(key.second)},
                               {"record_ids", records_json(ords)}});
        }
        json out = {{"name", name},
                    {"kind", opposite_sign ? "opposite_upstream" : "upstream"},
                    {"functional_types", matches.size()},
                    {"entries", std::move(entries)}};
        if (!notes.empty()) out["notes"] = std::move(notes);
        return out;
    }

    const RegulationGraph& graph_for(const std::set<std::string>& relations) const {
        std::set<std::string> keys;
        for (const auto& r : relations) keys.insert(text::key(r));
        std::lock_guard lock(graph_mutex_);
        auto it = graphs_.find(keys);
        if (it == graphs_.end()) it = graphs_.emplace(keys, build_graph(index_, relations)).first;
        return it->second;
    }

    json ranked_json(const std::vector<RankedEntity>& ranked) const {
        auto arr = json::array();
        for (const auto& r : ranked) {
            arr.push_back({{"entity", r.entity},
                           {"display", index_.entity_display(r.entity)},
                           {"evidence_count", r.evidence_count},
                           {"article_count", r.article_count}});
        }
        return arr;
    }

    json pathways(const json& req) const {
        const auto target_raw = request::string_param(req, "target");
        const auto target = index_.aliases().canonical(target_raw);
        const auto max_depth = request::uint_param(req, "max_depth", kMaxPathwayLength, kMinPathwayLength);
        const auto budget = request::uint_param(req, "budget", kDefaultWalkBudget);
        const auto k = request::uint_param(req, "k", 10, 1);
        const auto limit = request::uint_param(req, "limit", 50);
        const auto by = request::optional_string(req, "count_by").value_or("docs");
        if (by != "docs" && by != "articles") throw QueryError("count_by must be 'docs' or 'articles'", "count_by");
        const auto rank_by = by == "docs" ? RankBy::Evidence : RankBy::Articles;

        std::set<std::string> relations{"Activation"};
        if (const auto* rel = request::member(req, "relations")) {
            relations.clear();
            if (rel->is_string()) {
                std::string_view s = rel->get_ref<const std::string&>();
                size_t start = 0;
                while (start <= s.size()) {
                    const auto end = std::min(s.find(',', start), s.size());
                    auto item = text::trim(s.substr(start, end - start));
                    if (!item.empty()) relations.emplace(item);
                    start = end + 1;
                }
            } else if (rel->is_array()) {
                for (const auto& r : *rel) {
                    if (!r.is_string()) throw QueryError("relations must be strings", "relations");
                    relations.insert(r.get<std::string>());
                }
            } else {
                throw QueryError("relations must be a list or comma-separated string", "relations");
            }
            if (relations.empty()) throw QueryError("relations must not be empty", "relations");
        }
        std::optional<std::string> regulator;
        if (auto r = request::optional_string(req, "regulator")) regulator = index_.aliases().canonical(*r);

        const auto& graph = graph_for(relations);
        const int depth = effective_depth(graph, target, static_cast<int>(std::min<uint64_t>(max_depth, 64)), budget);
        auto paths = enumerate_pathways(graph, target, depth);
        if (regulator) {
            std::erase_if(paths, [&](const Pathway& p) { return graph.node(p.nodes.front()) != *regulator; });
        }

        json out = {{"target", target},
                    {"target_display", index_.entity_display(target)},
                    {"known_target", graph.node_id(target).has_value()},
                    {"relations", relations},
                    {"max_depth", std::min<uint64_t>(max_depth, kMaxPathwayLength)},
                    {"budget", budget},
                    {"effective_depth", depth},
                    {"walk_estimate", walk_count_estimate(graph, target, depth)},
                    {"regulators", ranked_json(top_members(graph, target, k, rank_by))},
                    {"upstream", ranked_json(top_upstream(graph, target, k, rank_by))},
                    {"pathway_count", paths.size()}};
        if (regulator) out["regulator"] = *regulator;
        auto arr = json::array();
        for (size_t i = 0; i < paths.size() && i < limit; ++i) {
            const auto& p = paths[i];
            auto nodes = json::array();
            auto displays = json::array();
            for (auto n : p.nodes) {
                nodes.push_back(graph.node(n));
                displays.push_back(index_.entity_display(graph.node(n)));
            }
            auto rels = json::array();
            for (auto e : p.edges) rels.push_back(graph.edge(e).relation);
            auto evidence = json::array();
            for (auto d : first_edge_evidence(graph, p)) evidence.push_back(doc_json(d, false));
            arr.push_back({{"nodes", std::move(nodes)},
                           {"display", std::move(displays)},
                           {"relations", std::move(rels)},
                           {"length", p.length()},
                           {"net_polarity", to_string(p.net_polarity)},
                           {"first_edge_evidence", std::move(evidence)}});
        }
        out["pathways"] = std::move(arr);
        return out;
    }

    json doc(const json& req) const {
        const auto id = request::string_param(req, "id");
        auto ord = index_.doc_ordinal(id);
        if (!ord) throw NotFound("unknown document '" + id + "'", "id");
        return doc_json(*ord, true);
    }

    Index index_;
    mutable std::mutex graph_mutex_;
    mutable std::map<std::set<std::string>, RegulationGraph> graphs_;
};

} // namespace semviz

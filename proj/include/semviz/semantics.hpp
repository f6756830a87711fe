#pragma once

// Second-order inference over grounded functional types and the
// chemical-gene / gene-disease triplet join.

#include "semviz/index.hpp"

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace semviz {

// Functional types grounded at build time, in (object, polarity, metatype) order.
inline const std::vector<FunctionalType>& ground_functional_types(const Index& index) {
    return index.functional_types();
}

struct UpstreamEntry {
    std::string entity;               // canonical key of the regulator
    std::string via_member;           // member of the functional type it acts on
    std::vector<uint32_t> record_ords; // witnessing records, ascending

    friend bool operator==(const UpstreamEntry&, const UpstreamEntry&) = default;
    friend auto operator<=>(const UpstreamEntry& a, const UpstreamEntry& b) {
        return std::tie(a.entity, a.via_member) <=> std::tie(b.entity, b.via_member);
    }
};

struct UpstreamResult {
    std::vector<UpstreamEntry> entries; // sorted by (entity, via_member)
    std::optional<std::string> note;    // set when the functional type cannot have upstream regulators
};

namespace detail {

inline UpstreamResult upstream_with_polarity(const Index& index, const FunctionalType& ft, bool opposite_sign) {
    UpstreamResult out;
    if (ft.polarity == Polarity::Affect) {
        out.note = "functional type has no sign (affect); upstream regulators are undefined";
        return out;
    }
    if (ft.metatype == Metatype::Modification) {
        out.note = "modification functional types do not feed upstream regulators";
        return out;
    }
    const Polarity wanted = opposite_sign ? opposite(ft.polarity) : ft.polarity;
    const auto& taxonomy = index.taxonomy();
    const auto& records = index.records();
    std::map<std::pair<std::string, std::string>, std::vector<uint32_t>> hits;
    for (const auto& member : ft.members) {
        for (auto r : index.records_with_object(member.entity)) {
            const auto type = taxonomy.lookup(records[r].relation);
            if (type.metatype != Metatype::RegulateActivity || type.polarity != wanted) continue;
            hits[{records[r].subject, member.entity}].push_back(r);
        }
    }
    out.entries.reserve(hits.size());
    for (auto& [key, ords] : hits) out.entries.push_back({key.first, key.second, std::move(ords)});
    return out;
}

} // namespace detail

// Entities x with a same-sign RegulateActivity relation onto some member of `ft`.
inline UpstreamResult upstream_regulators(const Index& index, const FunctionalType& ft) {
    return detail::upstream_with_polarity(index, ft, false);
}

// As upstream_regulators, with the opposite sign.
inline UpstreamResult opposite_upstream_regulators(const Index& index, const FunctionalType& ft) {
    return detail::upstream_with_polarity(index, ft, true);
}

struct TripletRelation {
    std::string chemical;
    std::string gene;
    std::string disease;
    std::string cg_relation;
    std::string gd_relation;
    std::vector<uint32_t> record_ords; // union of both sides, ascending

    friend bool operator==(const TripletRelation&, const TripletRelation&) = default;
};

// Natural join of ChemicalGene and GeneDisease records on the gene, one
// triplet per distinct (chemical, gene, disease, cg_relation, gd_relation).
inline std::vector<TripletRelation> join_triplets(const Index& index) {
    using SideKey = std::pair<std::string, std::string>; // (other end, relation)
    std::map<std::string, std::map<SideKey, std::vector<uint32_t>>> cg_by_gene;
    std::map<std::string, std::map<SideKey, std::vector<uint32_t>>> gd_by_gene;
    const auto& records = index.records();
    for (uint32_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.pair_kind == PairKind::ChemicalGene) cg_by_gene[r.object][{r.subject, r.relation}].push_back(i);
        if (r.pair_kind == PairKind::GeneDisease) gd_by_gene[r.subject][{r.object, r.relation}].push_back(i);
    }
    std::vector<TripletRelation> out;
    for (const auto& [gene, chemicals] : cg_by_gene) {
        auto it = gd_by_gene.find(gene);
        if (it == gd_by_gene.end()) continue;
        for (const auto& [cg, cg_ords] : chemicals) {
            for (const auto& [gd, gd_ords] : it->second) {
                TripletRelation t{cg.first, gene, gd.first, cg.second, gd.second, {}};
                t.record_ords = cg_ords;
                t.record_ords.insert(t.record_ords.end(), gd_ords.begin(), gd_ords.end());
                std::sort(t.record_ords.begin(), t.record_ords.end());
                out.push_back(std::move(t));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const TripletRelation& a, const TripletRelation& b) {
        return std::tie(a.chemical, a.gene, a.disease, a.cg_relation, a.gd_relation) <
               std::tie(b.chemical, b.gene, b.disease, b.cg_relation, b.gd_relation);
    });
    return out;
}

} // namespace semviz

#pragma once

// Parameter reduction: every relation (s, o, r) grounds the type-level entity
// keyed by (o, polarity(r), metatype(r)); s becomes one of its members.

#include "semviz/ingest.hpp"
#include "semviz/taxonomy.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace semviz {

struct FunctionalTypeMember {
    std::string entity;               // canonical key
    std::vector<uint32_t> record_ords; // ascending

    friend bool operator==(const FunctionalTypeMember&, const FunctionalTypeMember&) = default;
};

struct FunctionalType {
    std::string object; // canonical key
    Polarity polarity = Polarity::Affect;
    Metatype metatype = Metatype::Other;
    std::string display_name;
    std::vector<std::string> relation_types; // distinct configured names, sorted by key
    std::vector<FunctionalTypeMember> members; // sorted by entity

    auto identity() const { return std::tie(object, polarity, metatype); }
    bool has_member(std::string_view entity) const {
        auto it = std::lower_bound(members.begin(), members.end(), entity,
                                   [](const FunctionalTypeMember& m, std::string_view e) { return m.entity < e; });
        return it != members.end() && it->entity == entity;
    }

    friend bool operator==(const FunctionalType&, const FunctionalType&) = default;
};

// Activation/Inhibition name "<Object> Activator"/"<Object> Inhibitor"; other
// signed or unsigned types use "<sym><Object> Regulator"; modifications name
// the modification ("<Object> Phosphorylation target") or fall back to "<Object> Modifier".
inline std::string functional_type_name(std::string_view object_display, Polarity polarity, Metatype metatype,
                                        std::optional<std::string_view> specific_type = std::nullopt) {
    const std::string object(object_display);
    if (metatype == Metatype::Modification) {
        if (specific_type) return object + " " + std::string(*specific_type) + " target";
        return object + " Modifier";
    }
    if (metatype == Metatype::RegulateActivity && specific_type) {
        const auto k = text::key(*specific_type);
        if (k == "activation") return object + " Activator";
        if (k == "inhibition") return object + " Inhibitor";
    }
    return std::string(polarity_symbol(polarity)) + object + " Regulator";
}

// `entity_display` maps a canonical key to its display form.
// Output is sorted by (object, polarity, metatype) and independent of record order.
template <typename DisplayFn>
std::vector<FunctionalType> ground_functional_types(const std::vector<RelationRecord>& records,
                                                    const Taxonomy& taxonomy, DisplayFn&& entity_display) {
    struct Group {
        std::map<std::string, std::string> relation_names; // key -> name
        std::map<std::string, std::vector<uint32_t>> members;
    };
    std::map<std::tuple<std::string, Polarity, Metatype>, Group> groups;
    for (uint32_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const auto type = taxonomy.lookup(r.relation);
        auto& g = groups[{r.object, type.polarity, type.metatype}];
        g.relation_names.emplace(text::key(type.name), type.name);
        g.members[r.subject].push_back(i);
    }
    std::vector<FunctionalType> out;
    out.reserve(groups.size());
    for (auto& [key, g] : groups) {
        FunctionalType ft;
        std::tie(ft.object, ft.polarity, ft.metatype) = key;
        for (auto& [_, name] : g.relation_names) ft.relation_types.push_back(name);
        std::optional<std::string_view> specific;
        if (ft.relation_types.size() == 1) specific = ft.relation_types.front();
        ft.display_name = functional_type_name(entity_display(ft.object), ft.polarity, ft.metatype, specific);
        for (auto& [entity, ords] : g.members) {
            std::sort(ords.begin(), ords.end());
            ft.members.push_back({entity, std::move(ords)});
        }
        out.push_back(std::move(ft));
    }
    return out;
}

} // namespace semviz

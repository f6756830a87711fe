#pragma once

// Relation-type universe: metatype grouping, polarity of each type and the
// sign algebra used to fold polarities along regulation chains.

#include "semviz/error.hpp"
#include "semviz/text.hpp"

#include <json.hpp>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace semviz {

enum class Metatype : uint8_t { RegulateActivity, Modification, Other };
enum class Polarity : uint8_t { Increase, Decrease, Affect };
enum class Role : uint8_t { Subject, Object, Enzyme, Substrate };

inline constexpr std::array<Polarity, 3> kAllPolarities{Polarity::Increase, Polarity::Decrease,
                                                        Polarity::Affect};

inline std::string_view to_string(Metatype m) {
    switch (m) {
    case Metatype::RegulateActivity: return "RegulateActivity";
    case Metatype::Modification: return "Modification";
    case Metatype::Other: return "Other";
    }
    return "Other";
}

inline std::string_view to_string(Polarity p) {
    switch (p) {
    case Polarity::Increase: return "increase";
    case Polarity::Decrease: return "decrease";
    case Polarity::Affect: return "affect";
    }
    return "affect";
}

inline std::string_view to_string(Role r) {
    switch (r) {
    case Role::Subject: return "Subject";
    case Role::Object: return "Object";
    case Role::Enzyme: return "Enzyme";
    case Role::Substrate: return "Substrate";
    }
    return "Subject";
}

// "++", "--" or the rightwards arrow.
inline std::string_view polarity_symbol(Polarity p) {
    switch (p) {
    case Polarity::Increase: return "++";
    case Polarity::Decrease: return "--";
    case Polarity::Affect: return "\xE2\x86\x92";
    }
    return "\xE2\x86\x92";
}

inline std::optional<Metatype> parse_metatype(std::string_view token) {
    if (token == "regulate_activity") return Metatype::RegulateActivity;
    if (token == "modification") return Metatype::Modification;
    if (token == "other") return Metatype::Other;
    return std::nullopt;
}

inline std::optional<Polarity> parse_polarity(std::string_view token) {
    if (token == "increase") return Polarity::Increase;
    if (token == "decrease") return Polarity::Decrease;
    if (token == "affect") return Polarity::Affect;
    return std::nullopt;
}

inline Polarity opposite(Polarity p) {
    switch (p) {
    case Polarity::Increase: return Polarity::Decrease;
    case Polarity::Decrease: return Polarity::Increase;
    case Polarity::Affect: return Polarity::Affect;
    }
    return Polarity::Affect;
}

// Sign multiplication with Affect absorbing.
inline Polarity compose_polarity(Polarity a, Polarity b) {
    if (a == Polarity::Affect || b == Polarity::Affect) return Polarity::Affect;
    return a == b ? Polarity::Increase : Polarity::Decrease;
}

// Roles of (subject, object) for a metatype; Other carries no role nouns.
inline std::optional<std::pair<Role, Role>> roles_for(Metatype m) {
    switch (m) {
    case Metatype::RegulateActivity: return std::pair{Role::Subject, Role::Object};
    case Metatype::Modification: return std::pair{Role::Enzyme, Role::Substrate};
    case Metatype::Other: return std::nullopt;
    }
    return std::nullopt;
}

struct RelationType {
    std::string name;
    Metatype metatype = Metatype::Other;
    Polarity polarity = Polarity::Affect;
    bool known = false; // false for fallback classifications

    std::optional<std::pair<Role, Role>> roles() const { return roles_for(metatype); }

    friend bool operator==(const RelationType&, const RelationType&) = default;
};

class Taxonomy {
public:
    Taxonomy() = default;

    // Throws ConfigError on duplicate names.
    explicit Taxonomy(std::vector<RelationType> types) {
        for (auto& t : types) {
            t.known = true;
            auto k = text::key(t.name);
            if (k.empty()) throw ConfigError("relation type with empty name", "relation_types");
            if (types_.contains(k)) {
                throw ConfigError("duplicate relation type '" + t.name + "'", t.name);
            }
            types_.emplace(std::move(k), std::move(t));
        }
    }

    // Total: names that are not configured resolve to (Other, Affect).
    RelationType lookup(std::string_view name) const {
        if (auto it = types_.find(text::key(name)); it != types_.end()) return it->second;
        return RelationType{std::string(text::trim(name)), Metatype::Other, Polarity::Affect, false};
    }

    bool contains(std::string_view name) const { return types_.contains(text::key(name)); }
    size_t size() const { return types_.size(); }
    bool empty() const { return types_.empty(); }

    // Configured types ordered by folded name.
    std::vector<RelationType> types() const {
        std::vector<RelationType> out;
        out.reserve(types_.size());
        for (const auto& [_, t] : types_) out.push_back(t);
        return out;
    }

    friend bool operator==(const Taxonomy&, const Taxonomy&) = default;

private:
    std::map<std::string, RelationType> types_;
};

// Parses `{"relation_types": [{"name", "metatype", "polarity"}, ...]}`.
// An empty document (or empty object) yields an empty taxonomy.
inline Taxonomy load_taxonomy(std::string_view document) {
    if (text::trim(document).empty()) return Taxonomy{};
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("taxonomy is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("taxonomy root must be an object");
    if (!root.contains("relation_types")) return Taxonomy{};
    const auto& list = root["relation_types"];
    if (!list.is_array()) throw ConfigError("relation_types must be a list", "relation_types");

    std::vector<RelationType> types;
    for (size_t i = 0; i < list.size(); ++i) {
        const auto& entry = list[i];
        const std::string where = "relation_types[" + std::to_string(i) + "]";
        if (!entry.is_object()) throw ConfigError(where + " must be an object", where);
        auto str = [&](const char* key) -> std::string {
            if (!entry.contains(key) || !entry[key].is_string()) {
                throw ConfigError(where + " is missing string field '" + key + "'", where);
            }
            return entry[key].get<std::string>();
        };
        RelationType t;
        t.name = std::string(text::trim(str("name")));
        const auto meta = str("metatype");
        const auto pol = str("polarity");
        auto m = parse_metatype(meta);
        if (!m) throw ConfigError(where + " (" + t.name + "): unknown metatype '" + meta + "'", where);
        auto p = parse_polarity(pol);
        if (!p) throw ConfigError(where + " (" + t.name + "): unknown polarity '" + pol + "'", where);
        t.metatype = *m;
        t.polarity = *p;
        types.push_back(std::move(t));
    }
    return Taxonomy(std::move(types));
}

inline constexpr std::string_view kDefaultTaxonomyJson = R"TAXONOMY(
{
  "relation_types": [
    {"name": "Activation", "metatype": "regulate_activity", "polarity": "increase"},
    {"name": "Inhibition", "metatype": "regulate_activity", "polarity": "decrease"},
    {"name": "Phosphorylation", "metatype": "modification", "polarity": "increase"},
    {"name": "Dephosphorylation", "metatype": "modification", "polarity": "decrease"},
    {"name": "Autophosphorylation", "metatype": "modification", "polarity": "increase"},
    {"name": "Transphosphorylation", "metatype": "modification", "polarity": "increase"},
    {"name": "Ubiquitination", "metatype": "modification", "polarity": "increase"},
    {"name": "Deubiquitination", "metatype": "modification", "polarity": "decrease"},
    {"name": "Acetylation", "metatype": "modification", "polarity": "increase"},
    {"name": "Deacetylation", "metatype": "modification", "polarity": "decrease"},
    {"name": "Methylation", "metatype": "modification", "polarity": "increase"},
    {"name": "Demethylation", "metatype": "modification", "polarity": "decrease"},
    {"name": "Glycosylation", "metatype": "modification", "polarity": "increase"},
    {"name": "Deglycosylation", "metatype": "modification", "polarity": "decrease"},
    {"name": "Hydroxylation", "metatype": "modification", "polarity": "increase"},
    {"name": "Dehydroxylation", "metatype": "modification", "polarity": "decrease"},
    {"name": "Sumoylation", "metatype": "modification", "polarity": "increase"},
    {"name": "Desumoylation", "metatype": "modification", "polarity": "decrease"},
    {"name": "Palmitoylation", "metatype": "modification", "polarity": "increase"},
    {"name": "Depalmitoylation", "metatype": "modification", "polarity": "decrease"},
    {"name": "Complex", "metatype": "other", "polarity": "affect"},
    {"name": "IncreaseAmount", "metatype": "other", "polarity": "increase"},
    {"name": "DecreaseAmount", "metatype": "other", "polarity": "decrease"},
    {"name": "Translocation", "metatype": "other", "polarity": "affect"},
    {"name": "Increase Expression", "metatype": "other", "polarity": "increase"},
    {"name": "Decrease Expression", "metatype": "other", "polarity": "decrease"},
    {"name": "Affect Expression", "metatype": "other", "polarity": "affect"},
    {"name": "Increase Reaction", "metatype": "other", "polarity": "increase"},
    {"name": "Decrease Reaction", "metatype": "other", "polarity": "decrease"},
    {"name": "Affect Reaction", "metatype": "other", "polarity": "affect"},
    {"name": "Increase Activity", "metatype": "other", "polarity": "increase"},
    {"name": "Decrease Activity", "metatype": "other", "polarity": "decrease"},
    {"name": "Affect Binding", "metatype": "other", "polarity": "affect"}
  ]
}
)TAXONOMY";

// Covers every relation type named in the CORD-19 causal-assertion and
// Blender KG examples; extend through a config file for full datasets.
inline const Taxonomy& default_taxonomy() {
    static const Taxonomy taxonomy = load_taxonomy(kDefaultTaxonomyJson);
    return taxonomy;
}

} // namespace semviz

#pragma once
// SPARQL templates for the five retrieval primitives against Freebase.

#include <optional>
#include <string>
#include <string_view>

namespace pdrr::kg {

enum class Primitive {
    EntityMatch,
    HeadRelationSearch,
    TailRelationSearch,
    HeadEntitySearch,
    TailEntitySearch,
};

std::string_view primitive_name(Primitive p);

struct SparqlBindings {
    std::optional<std::string> entity_string;  // EntityMatch
    std::optional<std::string> head;           // HeadRelationSearch, TailEntitySearch
    std::optional<std::string> tail;           // TailRelationSearch, HeadEntitySearch
    std::optional<std::string> relation;       // HeadEntitySearch, TailEntitySearch
};

/// Render the query for `p`. Throws MissingBinding when a slot the primitive
/// needs is absent. Quotes and backslashes in the entity string are escaped.
std::string render_sparql(Primitive p, const SparqlBindings& bindings);

// Not one of the five primitives: fetches the English name of one entity.
std::string render_label_query(std::string_view entity);

}  // namespace pdrr::kg

#include "pdrr/sparql.hpp"

#include "pdrr/error.hpp"

namespace pdrr::kg {

namespace {

constexpr std::string_view kPrefix = "PREFIX ns: <http://rdf.freebase.com/ns/>\n";

const std::string& need(const std::optional<std::string>& v, std::string_view slot, Primitive p) {
    if (!v || v->empty()) {
        throw MissingBinding(std::string(primitive_name(p)) + " requires binding '" +
                             std::string(slot) + "'");
    }
    return *v;
}

std::string escape_literal(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string_view primitive_name(Primitive p) {
    switch (p) {
        case Primitive::EntityMatch: return "entity_match";
        case Primitive::HeadRelationSearch: return "head_relation_search";
        case Primitive::TailRelationSearch: return "tail_relation_search";
        case Primitive::HeadEntitySearch: return "head_entity_search";
        case Primitive::TailEntitySearch: return "tail_entity_search";
    }
    return "unknown";
}

std::string render_sparql(Primitive p, const SparqlBindings& b) {
    std::string q(kPrefix);
    switch (p) {
        case Primitive::EntityMatch: {
            const auto& s = need(b.entity_string, "entity_string", p);
            q += "SELECT DISTINCT ?entity ?label\n"
                 "WHERE {\n"
                 "    ?entity ns:type.object.name ?label .\n"
                 "    FILTER(LANG(?label) = \"en\") .\n"
                 "    FILTER(bif:contains(?label, \"" + escape_literal(s) + "\")) .\n"
                 "}\n";
            break;
        }
        case Primitive::HeadRelationSearch: {
            const auto& h = need(b.head, "head", p);
            q += "SELECT ?relation\n"
                 "WHERE {\n"
                 "    ns:" + h + " ?relation ?x .\n"
                 "}\n";
            break;
        }
        case Primitive::TailRelationSearch: {
            const auto& t = need(b.tail, "tail", p);
            q += "SELECT ?relation\n"
                 "WHERE {\n"
                 "    ?x ?relation ns:" + t + " .\n"
                 "}\n";
            break;
        }
        case Primitive::HeadEntitySearch: {
            const auto& r = need(b.relation, "relation", p);
            const auto& t = need(b.tail, "tail", p);
            q += "SELECT ?headEntity\n"
                 "WHERE {\n"
                 "    ?headEntity ns:" + r + " ns:" + t + " .\n"
                 "}\n";
            break;
        }
        case Primitive::TailEntitySearch: {
            const auto& h = need(b.head, "head", p);
            const auto& r = need(b.relation, "relation", p);
            q += "SELECT ?tailEntity\n"
                 "WHERE {\n"
                 "    ns:" + h + " ns:" + r + " ?tailEntity .\n"
                 "}\n";
            break;
        }
    }
    return q;
}

std::string render_label_query(std::string_view entity) {
    std::string q(kPrefix);
    q += "SELECT ?label\n"
         "WHERE {\n"
         "    ns:" + std::string(entity) + " ns:type.object.name ?label .\n"
         "    FILTER(LANG(?label) = \"en\") .\n"
         "}\n";
    return q;
}

}  // namespace pdrr::kg

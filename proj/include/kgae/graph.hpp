#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgae/error.hpp"
#include "kgae/io.hpp"
#include "kgae/matrix.hpp"

namespace kgae {

// Undirected graph of entities carrying M continuous properties each.
// Edge weights come from co-occurrence counts; no self loops.
class KnowledgeGraph {
 public:
  struct Edge {
    std::size_t u, v;
    double weight;
  };

  KnowledgeGraph() = default;
  explicit KnowledgeGraph(std::vector<std::string> property_names)
      : property_names_(std::move(property_names)) {}

  std::size_t property_count() const { return property_names_.size(); }
  std::size_t entity_count() const { return ids_.size(); }
  const std::vector<std::string>& property_names() const { return property_names_; }
  const std::vector<std::string>& entity_ids() const { return ids_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const double> properties_of(std::size_t entity) const {
    return {props_.data() + entity * property_count(), property_count()};
  }

  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::invalid_argument("unknown entity id: " + id);
    return it->second;
  }

  std::size_t add_entity(const std::string& id, std::span<const double> properties) {
    if (properties.size() != property_count())
      throw std::invalid_argument("entity '" + id + "' has " + std::to_string(properties.size()) +
                                  " properties, expected " + std::to_string(property_count()));
    for (double v : properties)
      if (!std::isfinite(v)) throw std::invalid_argument("entity '" + id + "' has non-finite property");
    if (index_.contains(id)) throw std::invalid_argument("duplicate entity id: " + id);
    index_.emplace(id, ids_.size());
    ids_.push_back(id);
    props_.insert(props_.end(), properties.begin(), properties.end());
    return ids_.size() - 1;
  }

  void add_edge(const std::string& a, const std::string& b, double weight) {
    const std::size_t u = index_of(a), v = index_of(b);
    if (u == v) throw std::invalid_argument("self loop on entity: " + a);
    if (!(weight >= 0.0)) throw std::invalid_argument("negative or non-finite edge weight");
    edges_.push_back({u, v, weight});
  }

 private:
  std::vector<std::string> property_names_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> props_;  // entity-major, M per entity
  std::vector<Edge> edges_;
};

// Line format:
//   kgae-graph v1
//   properties <name>...
//   entity <id> <float>{M}
//   edge <id> <id> <weight>
//   end
inline KnowledgeGraph read_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "kgae-graph v1")
    throw io_error("graph: missing 'kgae-graph v1' header");

  KnowledgeGraph kg;
  bool have_props = false, have_end = false;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto where = [&] { return " (line " + std::to_string(lineno) + ")"; };
    auto tok = split(line, ' ');
    const std::string_view kind = tok[0];
    if (kind == "properties") {
      if (have_props) throw io_error("graph: duplicate properties line" + where());
      std::vector<std::string> names(tok.begin() + 1, tok.end());
      if (names.empty()) throw io_error("graph: properties line needs at least one name" + where());
      kg = KnowledgeGraph(std::move(names));
      have_props = true;
    } else if (kind == "entity") {
      if (!have_props) throw io_error("graph: entity before properties" + where());
      if (tok.size() != 2 + kg.property_count())
        throw io_error("graph: entity record needs id + " +
                       std::to_string(kg.property_count()) + " values" + where());
      std::vector<double> vals;
      for (std::size_t i = 2; i < tok.size(); ++i)
        vals.push_back(parse_double(tok[i], "property value"));
      kg.add_entity(std::string(tok[1]), vals);
    } else if (kind == "edge") {
      if (tok.size() != 4) throw io_error("graph: edge record needs two ids and a weight" + where());
      kg.add_edge(std::string(tok[1]), std::string(tok[2]),
                  parse_double(tok[3], "edge weight"));
    } else if (kind == "end") {
      have_end = true;
      break;
    } else {
      throw io_error("graph: unknown record '" + std::string(kind) + "'" + where());
    }
  }
  if (!have_props) throw io_error("graph: no properties line");
  if (!have_end) throw io_error("graph: missing 'end'");
  return kg;
}

inline void write_graph(std::ostream& out, const KnowledgeGraph& kg) {
  out << "kgae-graph v1\n";
  out << "properties";
  for (const auto& name : kg.property_names()) out << ' ' << name;
  out << '\n';
  for (std::size_t i = 0; i < kg.entity_count(); ++i) {
    out << "entity " << kg.entity_ids()[i];
    for (double v : kg.properties_of(i)) out << ' ' << format_double(v);
    out << '\n';
  }
  for (const auto& e : kg.edges())
    out << "edge " << kg.entity_ids()[e.u] << ' ' << kg.entity_ids()[e.v] << ' '
        << format_double(e.weight) << '\n';
  out << "end\n";
}

}  // namespace kgae

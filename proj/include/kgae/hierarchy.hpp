#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgae/graph.hpp"
#include "kgae/io.hpp"

namespace kgae {

// How binary thresholds are chosen: a fixed user value per property, or
// the per-node median for balanced splits.
struct EtaPolicy {
  enum class Mode { fixed, median };
  Mode mode = Mode::median;
  std::vector<double> fixed_eta;  // one value (broadcast) or one per property

  static EtaPolicy median_policy() { return {}; }
  static EtaPolicy fixed_policy(std::vector<double> eta) {
    for (double v : eta)
      if (!std::isfinite(v)) throw std::invalid_argument("eta policy: non-finite fixed value");
    if (eta.empty()) throw std::invalid_argument("eta policy: fixed mode needs at least one value");
    return {Mode::fixed, std::move(eta)};
  }
};

// Fixed mode returns the configured value; median mode returns the middle
// order statistic (odd n) or the midpoint of the two middle ones (even n).
inline double choose_eta(std::span<const double> values, const EtaPolicy& policy,
                         std::size_t property = 0) {
  if (policy.mode == EtaPolicy::Mode::fixed) {
    const auto& eta = policy.fixed_eta;
    return eta.size() == 1 ? eta[0] : eta.at(property);
  }
  if (values.empty()) throw std::invalid_argument("choose_eta: empty value list");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted)
    if (!std::isfinite(v)) throw std::invalid_argument("choose_eta: non-finite value");
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

namespace detail {
struct HierarchyBuilder;
}

// Alternating sibling/binary tree over a knowledge graph: the root fans out
// one branch per property, each branch splits binary at its eta, and the
// children fan out over the properties not yet used on that path. Every
// root-to-leaf path uses each property exactly once, so a non-empty graph
// has exactly M! * 2^M leaves (empty splits are kept as empty leaves).
class Hierarchy {
 public:
  enum class Kind { sibling, binary, leaf };

  struct Node {
    Kind kind;
    // sibling: (property index, binary child) per unused property
    std::vector<std::pair<std::size_t, std::size_t>> branches;
    // binary
    std::size_t property = 0;
    double eta = 0.0;
    std::size_t low = 0, high = 0;
    std::string path;  // split decisions taken before this node, e.g. "x</y>="
    // leaf
    std::vector<std::string> members;
    std::size_t leaf_index = 0;
  };

  struct EtaEntry {
    std::string path;      // decisions above the split
    std::string property;  // property split at this node
    double eta;
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::size_t id) const { return nodes_[id]; }
  std::size_t root() const { return root_; }
  const std::vector<std::size_t>& leaf_ids() const { return leaf_ids_; }
  std::size_t leaf_count() const { return leaf_ids_.size(); }
  const std::vector<std::string>& property_names() const { return property_names_; }
  std::size_t property_count() const { return property_names_.size(); }
  std::size_t entity_count() const { return entity_count_; }

  // True when the input graph had no entities: the hierarchy is a bare
  // root with zero leaves.
  bool empty_input() const { return entity_count_ == 0; }

  std::vector<EtaEntry> eta_table() const {
    std::vector<EtaEntry> table;
    for (const auto& n : nodes_)
      if (n.kind == Kind::binary)
        table.push_back({n.path, property_names_[n.property], n.eta});
    return table;
  }

  struct RoutePath {
    std::vector<std::size_t> ordering;  // property visit order
    std::vector<std::size_t> nodes;     // node ids, root to leaf
    std::size_t leaf = 0;               // leaf node id
  };

  struct RouteResult {
    std::vector<RoutePath> paths;  // one per property ordering (M! total)

    // The path following properties in declaration order.
    const RoutePath& canonical() const {
      for (const auto& p : paths) {
        bool inorder = true;
        for (std::size_t i = 0; i + 1 < p.ordering.size(); ++i)
          if (p.ordering[i] > p.ordering[i + 1]) inorder = false;
        if (inorder) return p;
      }
      throw std::logic_error("route: no canonical ordering path");
    }
  };

  // Routes a point through every property ordering. Boundary values take
  // the high branch: the split is {x < eta} / {x >= eta}.
  RouteResult route(std::span<const double> point) const {
    if (point.size() != property_count())
      throw std::invalid_argument("route: point has wrong dimension");
    for (double v : point)
      if (!std::isfinite(v)) throw std::invalid_argument("route: non-finite component");
    if (empty_input()) throw std::invalid_argument("route: hierarchy built from an empty graph");
    RouteResult result;
    RoutePath current;
    walk(root_, point, current, result);
    return result;
  }

 private:
  void walk(std::size_t id, std::span<const double> point, RoutePath& current,
            RouteResult& out) const {
    const Node& n = nodes_[id];
    current.nodes.push_back(id);
    switch (n.kind) {
      case Kind::leaf:
        current.leaf = id;
        out.paths.push_back(current);
        break;
      case Kind::binary: {
        current.ordering.push_back(n.property);
        walk(point[n.property] < n.eta ? n.low : n.high, point, current, out);
        current.ordering.pop_back();
        break;
      }
      case Kind::sibling:
        for (const auto& [prop, child] : n.branches) walk(child, point, current, out);
        break;
    }
    current.nodes.pop_back();
  }

  friend Hierarchy build_hierarchy(const KnowledgeGraph&, const EtaPolicy&);
  friend struct detail::HierarchyBuilder;

  std::vector<Node> nodes_;
  std::size_t root_ = 0;
  std::vector<std::size_t> leaf_ids_;
  std::vector<std::string> property_names_;
  std::size_t entity_count_ = 0;
};

namespace detail {

struct HierarchyBuilder {
  const KnowledgeGraph& kg;
  const EtaPolicy& policy;
  Hierarchy& h;

  std::size_t sibling(const std::vector<std::size_t>& entities,
                      const std::vector<std::size_t>& unused, const std::string& path) {
    const std::size_t id = add(Hierarchy::Kind::sibling, path);
    for (std::size_t prop : unused) {
      const std::size_t child = binary(entities, unused, prop, path);
      h.nodes_[id].branches.emplace_back(prop, child);
    }
    return id;
  }

  std::size_t binary(const std::vector<std::size_t>& entities,
                     const std::vector<std::size_t>& unused, std::size_t prop,
                     const std::string& path) {
    const std::size_t id = add(Hierarchy::Kind::binary, path);
    h.nodes_[id].property = prop;
    // An empty subset still needs a threshold for routing; zero is as good
    // as any since no member constrains it.
    double eta = 0.0;
    if (policy.mode == EtaPolicy::Mode::fixed) {
      eta = choose_eta({}, policy, prop);
    } else if (!entities.empty()) {
      std::vector<double> values;
      values.reserve(entities.size());
      for (std::size_t e : entities) values.push_back(kg.properties_of(e)[prop]);
      eta = choose_eta(values, policy, prop);
    }
    h.nodes_[id].eta = eta;

    std::vector<std::size_t> low, high;
    for (std::size_t e : entities)
      (kg.properties_of(e)[prop] < eta ? low : high).push_back(e);

    std::vector<std::size_t> rest;
    for (std::size_t p : unused)
      if (p != prop) rest.push_back(p);

    const std::string& name = kg.property_names()[prop];
    const std::string sep = path.empty() ? "" : "/";
    h.nodes_[id].low = child(low, rest, path + sep + name + "<");
    h.nodes_[id].high = child(high, rest, path + sep + name + ">=");
    return id;
  }

  std::size_t child(const std::vector<std::size_t>& entities,
                    const std::vector<std::size_t>& rest, const std::string& path) {
    if (rest.empty()) return leaf(entities, path);
    return sibling(entities, rest, path);
  }

  std::size_t leaf(const std::vector<std::size_t>& entities, const std::string& path) {
    const std::size_t id = add(Hierarchy::Kind::leaf, path);
    h.nodes_[id].leaf_index = h.leaf_ids_.size();
    for (std::size_t e : entities) h.nodes_[id].members.push_back(kg.entity_ids()[e]);
    h.leaf_ids_.push_back(id);
    return id;
  }

  std::size_t add(Hierarchy::Kind kind, const std::string& path) {
    h.nodes_.push_back({});
    h.nodes_.back().kind = kind;
    h.nodes_.back().path = path;
    return h.nodes_.size() - 1;
  }
};

}  // namespace detail

inline Hierarchy build_hierarchy(const KnowledgeGraph& kg, const EtaPolicy& policy) {
  const std::size_t m = kg.property_count();
  if (m < 1) throw std::invalid_argument("build_hierarchy: graph has no properties");
  if (policy.mode == EtaPolicy::Mode::fixed && policy.fixed_eta.size() != 1 &&
      policy.fixed_eta.size() != m)
    throw std::invalid_argument("build_hierarchy: fixed eta needs 1 or M values");

  Hierarchy h;
  h.property_names_ = kg.property_names();
  h.entity_count_ = kg.entity_count();
  if (kg.entity_count() == 0) {
    h.nodes_.push_back({});
    h.nodes_.back().kind = Hierarchy::Kind::sibling;
    h.root_ = 0;
    return h;
  }

  std::vector<std::size_t> entities(kg.entity_count());
  for (std::size_t i = 0; i < entities.size(); ++i) entities[i] = i;
  std::vector<std::size_t> unused(m);
  for (std::size_t i = 0; i < m; ++i) unused[i] = i;

  detail::HierarchyBuilder builder{kg, policy, h};
  h.root_ = builder.sibling(entities, unused, "");
  return h;
}

namespace detail {

inline void json_escape(std::ostream& out, const std::string& s) {
  out << '"';
  for (char c : s) {
    switch (c) {
      case '"': out << "\\\""; break;
      case '\\': out << "\\\\"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out << buf;
        } else {
          out << c;
        }
    }
  }
  out << '"';
}

inline void write_node(std::ostream& out, const Hierarchy& h, std::size_t id, int indent) {
  const auto& n = h.node(id);
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad2(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (n.kind) {
    case Hierarchy::Kind::sibling: {
      out << "{\n" << pad2 << "\"type\": \"sibling\",\n" << pad2 << "\"branches\": [";
      for (std::size_t i = 0; i < n.branches.size(); ++i) {
        if (i) out << ',';
        out << '\n' << pad2 << "  {\"property\": ";
        json_escape(out, h.property_names()[n.branches[i].first]);
        out << ", \"node\": ";
        write_node(out, h, n.branches[i].second, indent + 2);
        out << '}';
      }
      if (!n.branches.empty()) out << '\n' << pad2;
      out << "]\n" << pad << '}';
      break;
    }
    case Hierarchy::Kind::binary: {
      out << "{\n" << pad2 << "\"type\": \"binary\",\n" << pad2 << "\"property\": ";
      json_escape(out, h.property_names()[n.property]);
      out << ",\n" << pad2 << "\"eta\": " << format_double(n.eta) << ",\n";
      out << pad2 << "\"low\": ";
      write_node(out, h, n.low, indent + 1);
      out << ",\n" << pad2 << "\"high\": ";
      write_node(out, h, n.high, indent + 1);
      out << '\n' << pad << '}';
      break;
    }
    case Hierarchy::Kind::leaf: {
      out << "{\"type\": \"leaf\", \"id\": " << n.leaf_index << ", \"members\": [";
      for (std::size_t i = 0; i < n.members.size(); ++i) {
        if (i) out << ", ";
        json_escape(out, n.members[i]);
      }
      out << "]}";
      break;
    }
  }
}

}  // namespace detail

// Nested JSON export: node type, split property, eta and leaf memberships.
inline void write_hierarchy(std::ostream& out, const Hierarchy& h) {
  out << "{\n  \"format\": \"kgae-hierarchy v1\",\n  \"properties\": [";
  for (std::size_t i = 0; i < h.property_count(); ++i) {
    if (i) out << ", ";
    detail::json_escape(out, h.property_names()[i]);
  }
  out << "],\n  \"entities\": " << h.entity_count() << ",\n  \"leaf_count\": " << h.leaf_count()
      << ",\n  \"root\": ";
  detail::write_node(out, h, h.root(), 1);
  out << "\n}\n";
}

}  // namespace kgae

#include "onto/ontology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "json.hpp"
#include "onto/errors.hpp"
#include "onto/jsonw.hpp"
#include "onto/textio.hpp"

namespace onto {

namespace {

using EdgeKey = std::tuple<std::string, std::size_t, std::string>;

OntologyEdge edge_of(const EdgeKey& key, double confidence) {
  OntologyEdge e;
  e.head = std::get<0>(key);
  e.label = static_cast<RelationLabel>(std::get<1>(key));
  e.tail = std::get<2>(key);
  e.confidence = confidence;
  return e;
}

void ensure_node(OntologyGraph& graph, const std::string& canonical) {
  auto it = graph.nodes.find(canonical);
  if (it == graph.nodes.end()) {
    ConceptNode node;
    node.canonical = canonical;
    graph.nodes.emplace(canonical, std::move(node));
  }
}

void insert_edge_max(OntologyGraph& graph, const EdgeKey& key, double confidence) {
  auto [it, inserted] = graph.edges.emplace(key, confidence);
  if (!inserted) it->second = std::max(it->second, confidence);
}

// Union-find over node names, used by merge_equals.
class Partition {
 public:
  void add(const std::string& name) { parent_.emplace(name, name); }

  const std::string& find(const std::string& name) {
    std::string& p = parent_.at(name);
    if (p == name) return p;
    const std::string root = find(p);
    p = root;
    return parent_.at(name);
  }

  void unite(const std::string& a, const std::string& b) {
    const std::string ra = find(a);
    const std::string rb = find(b);
    if (ra != rb) parent_.at(rb) = ra;
  }

 private:
  std::map<std::string, std::string> parent_;
};

}  // namespace

void add_concept(OntologyGraph& graph, const std::string& canonical, double score) {
  if (canonical.empty()) throw ArgumentError("add_concept: empty concept text");
  ensure_node(graph, canonical);
  graph.nodes.at(canonical).score = score;
}

void add_triple(OntologyGraph& graph, const RelationTriple& triple) {
  if (triple.head.empty() || triple.tail.empty()) {
    throw ArgumentError("add_triple: empty concept text");
  }
  if (triple.head == triple.tail && triple.label != RelationLabel::Different_of) {
    throw ArgumentError("add_triple: head equals tail for non-Different_of triple '" +
                        triple.head + "'");
  }
  if (!(triple.confidence >= 0.0 && triple.confidence <= 1.0)) {
    throw ArgumentError("add_triple: confidence outside [0, 1]");
  }
  ensure_node(graph, triple.head);
  ensure_node(graph, triple.tail);
  insert_edge_max(graph, {triple.head, static_cast<std::size_t>(triple.label), triple.tail},
                  triple.confidence);
}

OntologyGraph build_ontology(const std::vector<RelationTriple>& triples,
                             const std::vector<ConceptCandidate>& concepts) {
  OntologyGraph graph;
  for (const ConceptCandidate& c : concepts) add_concept(graph, c.norm_text, c.score);
  for (const RelationTriple& t : triples) add_triple(graph, t);
  return graph;
}

std::vector<OntologyEdge> edge_list(const OntologyGraph& graph) {
  std::vector<OntologyEdge> out;
  out.reserve(graph.edges.size());
  for (const auto& [key, confidence] : graph.edges) out.push_back(edge_of(key, confidence));
  return out;
}

OntologyGraph merge_equals(OntologyGraph graph) {
  constexpr std::size_t kEqual = static_cast<std::size_t>(RelationLabel::Equal);

  Partition partition;
  for (const auto& [name, node] : graph.nodes) partition.add(name);
  bool any = false;
  for (const auto& [key, confidence] : graph.edges) {
    if (std::get<1>(key) == kEqual) {
      partition.unite(std::get<0>(key), std::get<2>(key));
      any = true;
    }
  }
  if (!any) return graph;

  // Component members, keyed by the union-find root.
  std::map<std::string, std::vector<const ConceptNode*>> components;
  for (const auto& [name, node] : graph.nodes) {
    components[partition.find(name)].push_back(&node);
  }

  // Representative per component: highest score, ties to the lexicographically
  // smallest canonical (members arrive in map order, so '<' keeps the first).
  std::map<std::string, std::string> rep_of;  // root -> representative
  OntologyGraph merged;
  for (const auto& [root, members] : components) {
    const ConceptNode* rep = members.front();
    for (const ConceptNode* m : members) {
      if (m->score > rep->score) rep = m;
    }
    ConceptNode node;
    node.canonical = rep->canonical;
    node.score = rep->score;
    std::set<std::string> aliases;
    for (const ConceptNode* m : members) {
      aliases.insert(m->aliases.begin(), m->aliases.end());
      if (m != rep) aliases.insert(m->canonical);
    }
    aliases.erase(node.canonical);
    node.aliases.assign(aliases.begin(), aliases.end());
    rep_of.emplace(root, node.canonical);
    merged.nodes.emplace(node.canonical, std::move(node));
  }

  for (const auto& [key, confidence] : graph.edges) {
    if (std::get<1>(key) == kEqual) continue;  // consumed by the merge
    const std::string& head = rep_of.at(partition.find(std::get<0>(key)));
    const std::string& tail = rep_of.at(partition.find(std::get<2>(key)));
    if (head == tail && std::get<1>(key) != static_cast<std::size_t>(RelationLabel::Different_of)) {
      continue;  // a collapsed pair cannot keep a non-homonym edge
    }
    insert_edge_max(merged, {head, std::get<1>(key), tail}, confidence);
  }
  return merged;
}

namespace {

// The lexicographically first cycle found by DFS over Is_A edges, as a list of
// edge keys, or empty when the sub-graph is acyclic.
std::vector<EdgeKey> find_isa_cycle(const OntologyGraph& graph) {
  constexpr std::size_t kIsA = static_cast<std::size_t>(RelationLabel::Is_A);
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [key, confidence] : graph.edges) {
    if (std::get<1>(key) == kIsA) adj[std::get<0>(key)].push_back(std::get<2>(key));
  }

  std::set<std::string> done;
  std::vector<std::string> stack;
  std::set<std::string> on_stack;

  // Iterative DFS that tracks the current path; returns the cycle when a
  // path node is revisited.
  const std::function<std::vector<EdgeKey>(const std::string&)> visit =
      [&](const std::string& node) -> std::vector<EdgeKey> {
    stack.push_back(node);
    on_stack.insert(node);
    const auto it = adj.find(node);
    if (it != adj.end()) {
      for (const std::string& next : it->second) {
        if (on_stack.count(next) != 0) {
          // Cycle: the stack suffix from `next` plus the closing edge.
          std::vector<EdgeKey> cycle;
          const auto begin = std::find(stack.begin(), stack.end(), next);
          for (auto p = begin; p + 1 != stack.end(); ++p) {
            cycle.emplace_back(*p, kIsA, *(p + 1));
          }
          cycle.emplace_back(node, kIsA, next);
          return cycle;
        }
        if (done.count(next) == 0) {
          std::vector<EdgeKey> cycle = visit(next);
          if (!cycle.empty()) return cycle;
        }
      }
    }
    on_stack.erase(node);
    stack.pop_back();
    done.insert(node);
    return {};
  };

  for (const auto& [node, targets] : adj) {
    if (done.count(node) != 0) continue;
    std::vector<EdgeKey> cycle = visit(node);
    if (!cycle.empty()) return cycle;
  }
  return {};
}

}  // namespace

IsaDagResult enforce_isa_dag(OntologyGraph graph) {
  IsaDagResult result;
  while (true) {
    const std::vector<EdgeKey> cycle = find_isa_cycle(graph);
    if (cycle.empty()) break;
    // Minimum confidence on the cycle; ties fall to the lexicographically
    // smallest (head, tail).
    const EdgeKey* victim = nullptr;
    double victim_conf = 0.0;
    for (const EdgeKey& key : cycle) {
      const double conf = graph.edges.at(key);
      if (victim == nullptr || conf < victim_conf ||
          (conf == victim_conf &&
           std::tie(std::get<0>(key), std::get<2>(key)) <
               std::tie(std::get<0>(*victim), std::get<2>(*victim)))) {
        victim = &key;
        victim_conf = conf;
      }
    }
    result.dropped.push_back(edge_of(*victim, victim_conf));
    graph.edges.erase(*victim);
  }
  result.graph = std::move(graph);
  return result;
}

std::optional<std::vector<std::string>> isa_topological_order(const OntologyGraph& graph) {
  constexpr std::size_t kIsA = static_cast<std::size_t>(RelationLabel::Is_A);
  std::map<std::string, std::size_t> indegree;  // over tails: edges point head -> tail
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [name, node] : graph.nodes) indegree.emplace(name, 0);
  for (const auto& [key, confidence] : graph.edges) {
    if (std::get<1>(key) != kIsA) continue;
    out[std::get<0>(key)].push_back(std::get<2>(key));
    ++indegree.at(std::get<2>(key));
  }

  std::set<std::string> ready;
  for (const auto& [name, deg] : indegree) {
    if (deg == 0) ready.insert(name);
  }
  std::vector<std::string> order;
  order.reserve(indegree.size());
  while (!ready.empty()) {
    const std::string node = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(node);
    const auto it = out.find(node);
    if (it == out.end()) continue;
    for (const std::string& next : it->second) {
      if (--indegree.at(next) == 0) ready.insert(next);
    }
  }
  if (order.size() != indegree.size()) return std::nullopt;  // cycle remains
  return order;
}

std::string export_ntriples(const OntologyGraph& graph) {
  std::string out;
  for (const auto& [key, confidence] : graph.edges) {
    out += "<urn:onto:c:";
    out += percent_encode(std::get<0>(key));
    out += "> <urn:onto:r:";
    out += relation_name(static_cast<RelationLabel>(std::get<1>(key)));
    out += "> <urn:onto:c:";
    out += percent_encode(std::get<2>(key));
    out += "> .\n";
  }
  return out;
}

std::string export_graph(const OntologyGraph& graph) {
  std::string out = "{\n  \"version\": 1,\n  \"nodes\": [";
  bool first = true;
  for (const auto& [name, node] : graph.nodes) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "    {\"canonical\": ";
    out += json_quote(node.canonical);
    out += ", \"score\": ";
    out += format_double(node.score);
    out += ", \"aliases\": [";
    for (std::size_t i = 0; i < node.aliases.size(); ++i) {
      if (i > 0) out += ", ";
      out += json_quote(node.aliases[i]);
    }
    out += "]}";
  }
  out += first ? "],\n" : "\n  ],\n";
  out += "  \"edges\": [";
  first = true;
  for (const auto& [key, confidence] : graph.edges) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "    {\"head\": ";
    out += json_quote(std::get<0>(key));
    out += ", \"label\": ";
    out += json_quote(std::string(relation_name(static_cast<RelationLabel>(std::get<1>(key)))));
    out += ", \"tail\": ";
    out += json_quote(std::get<2>(key));
    out += ", \"confidence\": ";
    out += format_double(confidence);
    out += '}';
  }
  out += first ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

OntologyGraph import_graph(std::string_view bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph file: ") + e.what());
  }

  try {
    if (!j.is_object()) throw ParseError("graph file: top level must be an object");
    if (!j.contains("version") || !j.at("version").is_number_integer() ||
        j.at("version").get<int>() != 1) {
      throw ParseError("graph file: missing or unsupported version (expected 1)");
    }
    if (!j.contains("nodes") || !j.at("nodes").is_array() || !j.contains("edges") ||
        !j.at("edges").is_array()) {
      throw ParseError("graph file: nodes and edges arrays are required");
    }

    OntologyGraph graph;
    std::set<std::string> claimed;  // canonicals and aliases must not collide
    for (const auto& jn : j.at("nodes")) {
      ConceptNode node;
      node.canonical = jn.at("canonical").get<std::string>();
      if (node.canonical.empty()) throw ParseError("graph file: empty canonical");
      node.score = jn.at("score").get<double>();
      if (!std::isfinite(node.score)) throw ParseError("graph file: non-finite score");
      for (const auto& ja : jn.at("aliases")) {
        node.aliases.push_back(ja.get<std::string>());
      }
      if (!std::is_sorted(node.aliases.begin(), node.aliases.end()) ||
          std::adjacent_find(node.aliases.begin(), node.aliases.end()) != node.aliases.end()) {
        throw ParseError("graph file: aliases of '" + node.canonical +
                         "' must be sorted and unique");
      }
      for (const std::string& alias : node.aliases) {
        if (alias == node.canonical) {
          throw ParseError("graph file: node '" + node.canonical + "' lists itself as an alias");
        }
      }
      if (!claimed.insert(node.canonical).second) {
        throw ParseError("graph file: name '" + node.canonical + "' appears twice");
      }
      for (const std::string& alias : node.aliases) {
        if (!claimed.insert(alias).second) {
          throw ParseError("graph file: name '" + alias + "' appears twice");
        }
      }
      graph.nodes.emplace(node.canonical, std::move(node));
    }

    for (const auto& je : j.at("edges")) {
      const std::string head = je.at("head").get<std::string>();
      const std::string tail = je.at("tail").get<std::string>();
      const std::string label_name = je.at("label").get<std::string>();
      const std::optional<RelationLabel> label = relation_from_name(label_name);
      if (!label) throw ParseError("graph file: unknown relation label '" + label_name + "'");
      if (graph.nodes.count(head) == 0 || graph.nodes.count(tail) == 0) {
        throw ParseError("graph file: edge endpoint without a node entry");
      }
      if (head == tail && *label != RelationLabel::Different_of) {
        throw ParseError("graph file: self-loop on non-Different_of edge '" + head + "'");
      }
      const double confidence = je.at("confidence").get<double>();
      if (!(confidence >= 0.0 && confidence <= 1.0)) {
        throw ParseError("graph file: confidence outside [0, 1]");
      }
      const EdgeKey key{head, static_cast<std::size_t>(*label), tail};
      if (graph.edges.count(key) != 0) {
        throw ParseError("graph file: duplicate edge " + head + " -> " + tail);
      }
      graph.edges.emplace(key, confidence);
    }
    return graph;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph file: ") + e.what());
  }
}

}  // namespace onto

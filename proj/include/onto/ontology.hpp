#ifndef ONTO_ONTOLOGY_HPP
#define ONTO_ONTOLOGY_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "onto/concepts.hpp"
#include "onto/extraction.hpp"

namespace onto {

// One ontology node: a representative concept plus the Equal-merged names it
// absorbed. canonical never appears among its own aliases, and alias sets are
// pairwise disjoint across nodes.
struct ConceptNode {
  std::string canonical;
  std::vector<std::string> aliases;  // sorted, unique
  double score = 0.0;                // TF/IDF of the representative

  friend bool operator==(const ConceptNode&, const ConceptNode&) = default;
};

struct OntologyEdge {
  std::string head;
  RelationLabel label = RelationLabel::Equal;
  std::string tail;
  double confidence = 1.0;

  friend bool operator==(const OntologyEdge&, const OntologyEdge&) = default;
};

// Nodes keyed by canonical name; edges keyed by (head, label index, tail) so
// both iterate in canonical order. Duplicate edges keep the max confidence.
struct OntologyGraph {
  std::map<std::string, ConceptNode> nodes;
  std::map<std::tuple<std::string, std::size_t, std::string>, double> edges;

  friend bool operator==(const OntologyGraph&, const OntologyGraph&) = default;
};

// Creates/updates a node; an existing node keeps its aliases, the score is
// overwritten. Throws ArgumentError on empty canonical.
void add_concept(OntologyGraph& graph, const std::string& canonical, double score);

// Creates missing endpoint nodes (score 0) and inserts or confidence-max-
// merges the edge. Throws ArgumentError on an invalid triple (empty text,
// non-Different_of self-pair, confidence outside [0, 1]).
void add_triple(OntologyGraph& graph, const RelationTriple& triple);

// Nodes for every concept (with scores), then every triple.
OntologyGraph build_ontology(const std::vector<RelationTriple>& triples,
                             const std::vector<ConceptCandidate>& concepts = {});

// Edges in canonical (head, label, tail) order.
std::vector<OntologyEdge> edge_list(const OntologyGraph& graph);

// Collapses every connected component under Equal edges into one node. The
// representative is the member with the highest score (tie: lexicographically
// smallest canonical); the rest become aliases. Non-Equal edges are
// re-targeted to representatives with confidence-max merging; re-targeting
// that produces a self-loop drops the edge unless its label is Different_of.
// Idempotent, and independent of edge insertion order.
OntologyGraph merge_equals(OntologyGraph graph);

struct IsaDagResult {
  OntologyGraph graph;
  std::vector<OntologyEdge> dropped;  // in drop order
};

// While the Is_A sub-graph has a cycle, drops the minimum-confidence edge on
// one cycle (tie: lexicographic by head, then tail). Non-Is_A edges are never
// touched.
IsaDagResult enforce_isa_dag(OntologyGraph graph);

// Node canonicals ordered so every Is_A edge's head precedes its tail, or
// nullopt while the Is_A sub-graph still has a cycle. Deterministic: ties
// resolve lexicographically.
std::optional<std::vector<std::string>> isa_topological_order(const OntologyGraph& graph);

// One `<urn:onto:c:head> <urn:onto:r:Label> <urn:onto:c:tail> .` line per
// edge, percent-encoded, in canonical edge order.
std::string export_ntriples(const OntologyGraph& graph);

// Canonical JSON graph document; export ∘ import is the identity and equal
// graphs export byte-identically.
std::string export_graph(const OntologyGraph& graph);
OntologyGraph import_graph(std::string_view bytes);

}  // namespace onto

#endif  // ONTO_ONTOLOGY_HPP

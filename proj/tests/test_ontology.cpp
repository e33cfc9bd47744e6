#include "onto/ontology.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "onto/errors.hpp"
#include "onto/rng.hpp"

using namespace onto;

namespace {

RelationTriple triple_of(std::string head, RelationLabel label, std::string tail,
                         double confidence = 1.0) {
  RelationTriple t;
  t.head = std::move(head);
  t.label = label;
  t.tail = std::move(tail);
  t.confidence = confidence;
  return t;
}

// Index of a node's position in the topological order; REQUIREs presence.
std::size_t order_pos(const std::vector<std::string>& order, const std::string& name) {
  const auto it = std::find(order.begin(), order.end(), name);
  REQUIRE(it != order.end());
  return static_cast<std::size_t>(it - order.begin());
}

}  // namespace

TEST_CASE("add_triple: nodes, confidence-max merge, self-loop rules") {
  OntologyGraph graph;
  add_triple(graph, triple_of("bubble sort", RelationLabel::Is_A, "sorting algorithm", 0.6));
  CHECK(graph.nodes.size() == 2);
  CHECK(graph.edges.size() == 1);
  CHECK(graph.nodes.count("bubble sort") == 1);
  CHECK(graph.nodes.count("sorting algorithm") == 1);

  // Duplicate keeps the max confidence, in either arrival order.
  add_triple(graph, triple_of("bubble sort", RelationLabel::Is_A, "sorting algorithm", 0.8));
  REQUIRE(graph.edges.size() == 1);
  CHECK(edge_list(graph)[0].confidence == 0.8);
  add_triple(graph, triple_of("bubble sort", RelationLabel::Is_A, "sorting algorithm", 0.3));
  CHECK(edge_list(graph)[0].confidence == 0.8);

  // The homonym self-pair is the one permitted self-loop.
  OntologyGraph homonym;
  add_triple(homonym, triple_of("plant", RelationLabel::Different_of, "plant", 0.9));
  CHECK(homonym.nodes.size() == 1);
  CHECK(homonym.edges.size() == 1);

  OntologyGraph bad;
  CHECK_THROWS_AS(add_triple(bad, triple_of("plant", RelationLabel::Is_A, "plant")),
                  ArgumentError);
  CHECK_THROWS_AS(add_triple(bad, triple_of("", RelationLabel::Is_A, "x")), ArgumentError);
  CHECK_THROWS_AS(add_triple(bad, triple_of("a", RelationLabel::Is_A, "b", 1.5)), ArgumentError);
  CHECK_THROWS_AS(add_triple(bad, triple_of("a", RelationLabel::Is_A, "b", -0.1)), ArgumentError);
  CHECK(bad.nodes.empty());

  // add_concept stores scores and is idempotent on aliases.
  OntologyGraph scored;
  add_concept(scored, "data", 1.5);
  add_concept(scored, "data", 2.5);
  CHECK(scored.nodes.at("data").score == 2.5);
  CHECK_THROWS_AS(add_concept(scored, "", 1.0), ArgumentError);

  ConceptCandidate c;
  c.norm_text = "information";
  c.score = 0.7;
  const OntologyGraph built =
      build_ontology({triple_of("data", RelationLabel::Equal, "information")}, {c});
  CHECK(built.nodes.at("information").score == 0.7);
  CHECK(built.nodes.at("data").score == 0.0);
}

TEST_CASE("merge_equals: representative by score, aliases, edge retargeting") {
  OntologyGraph graph;
  add_concept(graph, "data", 2.0);
  add_concept(graph, "information", 1.0);
  add_triple(graph, triple_of("data", RelationLabel::Equal, "information", 0.9));
  add_triple(graph, triple_of("information", RelationLabel::Used_by, "database", 0.8));
  add_triple(graph, triple_of("data", RelationLabel::Used_by, "database", 0.5));

  const OntologyGraph merged = merge_equals(graph);
  REQUIRE(merged.nodes.size() == 2);  // "data" and "database"
  const ConceptNode& rep = merged.nodes.at("data");
  CHECK(rep.aliases == std::vector<std::string>{"information"});
  CHECK(rep.score == 2.0);
  CHECK(merged.nodes.count("information") == 0);

  // Both Used_by edges land on (data, database) and keep the max confidence.
  const std::vector<OntologyEdge> edges = edge_list(merged);
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].head == "data");
  CHECK(edges[0].label == RelationLabel::Used_by);
  CHECK(edges[0].tail == "database");
  CHECK(edges[0].confidence == 0.8);

  // No Equal edges: the graph passes through untouched.
  OntologyGraph plain;
  add_triple(plain, triple_of("room", RelationLabel::Part_of, "house"));
  CHECK(merge_equals(plain) == plain);

  // Idempotence.
  CHECK(merge_equals(merged) == merged);
  CHECK(export_graph(merge_equals(merged)) == export_graph(merged));
}

TEST_CASE("merge_equals: chains, score ties, self-loop filtering") {
  // a = b = c chain collapses to one component even without a direct a-c edge.
  OntologyGraph chain;
  add_concept(chain, "alpha", 1.0);
  add_concept(chain, "beta", 3.0);
  add_concept(chain, "gamma", 2.0);
  add_triple(chain, triple_of("alpha", RelationLabel::Equal, "beta"));
  add_triple(chain, triple_of("beta", RelationLabel::Equal, "gamma"));
  const OntologyGraph collapsed = merge_equals(chain);
  REQUIRE(collapsed.nodes.size() == 1);
  const ConceptNode& node = collapsed.nodes.at("beta");  // top score wins
  CHECK(node.aliases == std::vector<std::string>{"alpha", "gamma"});

  // Equal scores: lexicographically smallest canonical represents.
  OntologyGraph tie;
  add_triple(tie, triple_of("zebra", RelationLabel::Equal, "aardvark"));
  const OntologyGraph tied = merge_equals(tie);
  REQUIRE(tied.nodes.size() == 1);
  CHECK(tied.nodes.count("aardvark") == 1);

  // An intra-component non-homonym edge vanishes; Different_of survives as a
  // self-loop.
  OntologyGraph loops;
  add_triple(loops, triple_of("car", RelationLabel::Equal, "automobile"));
  add_triple(loops, triple_of("car", RelationLabel::Has_A, "automobile", 0.7));
  add_triple(loops, triple_of("car", RelationLabel::Different_of, "automobile", 0.6));
  const OntologyGraph looped = merge_equals(loops);
  const std::vector<OntologyEdge> kept = edge_list(looped);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].label == RelationLabel::Different_of);
  CHECK(kept[0].head == "automobile");
  CHECK(kept[0].tail == "automobile");
}

TEST_CASE("merge_equals is order-independent") {
  const std::vector<RelationTriple> equal_edges = {
      triple_of("a", RelationLabel::Equal, "b"),
      triple_of("c", RelationLabel::Equal, "b"),
      triple_of("d", RelationLabel::Equal, "e"),
  };
  const std::vector<RelationTriple> other = {
      triple_of("a", RelationLabel::Use_A, "d", 0.4),
      triple_of("e", RelationLabel::Result_of, "c", 0.9),
  };

  std::vector<std::size_t> order = {0, 1, 2};
  std::set<std::string> exports;
  do {
    OntologyGraph graph;
    for (const std::size_t i : order) add_triple(graph, equal_edges[i]);
    for (const RelationTriple& t : other) add_triple(graph, t);
    exports.insert(export_graph(merge_equals(graph)));
  } while (std::next_permutation(order.begin(), order.end()));
  CHECK(exports.size() == 1);  // every insertion order yields the same bytes
}

TEST_CASE("enforce_isa_dag: drops the weakest edge of each cycle") {
  // Two-cycle: the 0.4 edge loses.
  OntologyGraph two;
  add_triple(two, triple_of("a", RelationLabel::Is_A, "b", 0.9));
  add_triple(two, triple_of("b", RelationLabel::Is_A, "a", 0.4));
  const IsaDagResult repaired = enforce_isa_dag(two);
  REQUIRE(repaired.dropped.size() == 1);
  CHECK(repaired.dropped[0].head == "b");
  CHECK(repaired.dropped[0].tail == "a");
  CHECK(repaired.dropped[0].confidence == 0.4);
  CHECK(repaired.graph.edges.size() == 1);
  CHECK(isa_topological_order(repaired.graph).has_value());

  // Already acyclic: nothing dropped, graph unchanged.
  OntologyGraph dag;
  add_triple(dag, triple_of("a", RelationLabel::Is_A, "b"));
  add_triple(dag, triple_of("b", RelationLabel::Is_A, "c"));
  add_triple(dag, triple_of("c", RelationLabel::Part_of, "a"));  // non-Is_A closes no cycle
  const IsaDagResult untouched = enforce_isa_dag(dag);
  CHECK(untouched.dropped.empty());
  CHECK(untouched.graph == dag);

  // Confidence tie on a cycle: lexicographic (head, tail) decides.
  OntologyGraph tie;
  add_triple(tie, triple_of("x", RelationLabel::Is_A, "y", 0.5));
  add_triple(tie, triple_of("y", RelationLabel::Is_A, "x", 0.5));
  const IsaDagResult tied = enforce_isa_dag(tie);
  REQUIRE(tied.dropped.size() == 1);
  CHECK(tied.dropped[0].head == "x");
}

TEST_CASE("enforce_isa_dag: 3-cycles drop exactly the minimum, exhaustively") {
  // Every assignment of three distinct confidences to the triangle's edges:
  // exactly one drop, always the smallest confidence.
  const std::vector<std::string> names = {"a", "b", "c"};
  std::vector<double> confs = {0.3, 0.6, 0.9};
  std::sort(confs.begin(), confs.end());
  do {
    OntologyGraph graph;
    for (std::size_t i = 0; i < 3; ++i) {
      add_triple(graph, triple_of(names[i], RelationLabel::Is_A, names[(i + 1) % 3], confs[i]));
    }
    const IsaDagResult result = enforce_isa_dag(graph);
    REQUIRE(result.dropped.size() == 1);
    CHECK(result.dropped[0].confidence == 0.3);
    CHECK(result.graph.edges.size() == 2);
    CHECK(isa_topological_order(result.graph).has_value());
  } while (std::next_permutation(confs.begin(), confs.end()));
}

TEST_CASE("isa_topological_order: heads precede tails, cycles yield nullopt") {
  OntologyGraph graph;
  add_triple(graph, triple_of("bubble sort", RelationLabel::Is_A, "sorting algorithm"));
  add_triple(graph, triple_of("sorting algorithm", RelationLabel::Is_A, "algorithm"));
  add_triple(graph, triple_of("quick sort", RelationLabel::Is_A, "sorting algorithm"));
  const auto order = isa_topological_order(graph);
  REQUIRE(order.has_value());
  CHECK(order->size() == graph.nodes.size());
  CHECK(order_pos(*order, "bubble sort") < order_pos(*order, "sorting algorithm"));
  CHECK(order_pos(*order, "quick sort") < order_pos(*order, "sorting algorithm"));
  CHECK(order_pos(*order, "sorting algorithm") < order_pos(*order, "algorithm"));

  OntologyGraph cyclic;
  add_triple(cyclic, triple_of("a", RelationLabel::Is_A, "b"));
  add_triple(cyclic, triple_of("b", RelationLabel::Is_A, "a"));
  CHECK_FALSE(isa_topological_order(cyclic).has_value());
  // Non-Is_A edges do not constrain the order.
  OntologyGraph mixed;
  add_triple(mixed, triple_of("a", RelationLabel::Part_of, "b"));
  add_triple(mixed, triple_of("b", RelationLabel::Part_of, "a"));
  CHECK(isa_topological_order(mixed).has_value());
}

TEST_CASE("export_ntriples: exact line format and canonical order") {
  OntologyGraph graph;
  add_triple(graph, triple_of("bubble sort", RelationLabel::Is_A, "sorting algorithm", 0.9));
  CHECK(export_ntriples(graph) ==
        "<urn:onto:c:bubble%20sort> <urn:onto:r:Is_A> <urn:onto:c:sorting%20algorithm> .\n");

  CHECK(export_ntriples(OntologyGraph{}).empty());

  // Non-ASCII concept text is percent-encoded bytewise.
  OntologyGraph utf8;
  add_triple(utf8, triple_of("caf\xC3\xA9", RelationLabel::Equal, "coffeehouse"));
  CHECK(export_ntriples(utf8) ==
        "<urn:onto:c:caf%C3%A9> <urn:onto:r:Equal> <urn:onto:c:coffeehouse> .\n");

  // Multiple edges arrive sorted by head, then label, then tail.
  OntologyGraph multi;
  add_triple(multi, triple_of("b", RelationLabel::Is_A, "c"));
  add_triple(multi, triple_of("a", RelationLabel::Use_A, "b"));
  add_triple(multi, triple_of("a", RelationLabel::Equal, "z"));
  const std::string lines = export_ntriples(multi);
  const std::size_t first = lines.find("urn:onto:c:a> <urn:onto:r:Equal");
  const std::size_t second = lines.find("urn:onto:c:a> <urn:onto:r:Use_A");
  const std::size_t third = lines.find("urn:onto:c:b> <urn:onto:r:Is_A");
  REQUIRE(first != std::string::npos);
  REQUIRE(second != std::string::npos);
  REQUIRE(third != std::string::npos);
  CHECK(first < second);
  CHECK(second < third);
}

TEST_CASE("graph file: round-trip identity and canonical bytes") {
  OntologyGraph graph;
  add_concept(graph, "data", 1.5);
  add_triple(graph, triple_of("data", RelationLabel::Equal, "information", 0.95));
  add_triple(graph, triple_of("bubble sort", RelationLabel::Is_A, "sorting algorithm", 0.625));
  add_triple(graph, triple_of("plant", RelationLabel::Different_of, "plant", 0.5));
  const OntologyGraph merged = merge_equals(graph);  // gives one node an alias

  const std::string bytes = export_graph(merged);
  const OntologyGraph back = import_graph(bytes);
  CHECK(back == merged);
  CHECK(export_graph(back) == bytes);

  const OntologyGraph empty_back = import_graph(export_graph(OntologyGraph{}));
  CHECK(empty_back == OntologyGraph{});
}

TEST_CASE("graph file: malformed inputs are rejected") {
  CHECK_THROWS_AS(import_graph("{"), ParseError);
  CHECK_THROWS_AS(import_graph("[]"), ParseError);
  CHECK_THROWS_AS(import_graph(R"({"version": 2, "nodes": [], "edges": []})"), ParseError);
  CHECK_THROWS_AS(import_graph(R"({"version": 1, "nodes": []})"), ParseError);

  const auto nodes = [](const std::string& inner) {
    return std::string(R"({"version": 1, "nodes": [)") + inner + R"(], "edges": []})";
  };
  CHECK_THROWS_AS(import_graph(nodes(R"({"canonical": "", "score": 0, "aliases": []})")),
                  ParseError);
  CHECK_THROWS_AS(
      import_graph(nodes(R"({"canonical": "a", "score": 0, "aliases": ["a"]})")),
      ParseError);  // self-alias
  CHECK_THROWS_AS(
      import_graph(nodes(R"({"canonical": "a", "score": 0, "aliases": ["c", "b"]})")),
      ParseError);  // unsorted aliases
  CHECK_THROWS_AS(
      import_graph(nodes(R"({"canonical": "a", "score": 0, "aliases": []},
                             {"canonical": "a", "score": 0, "aliases": []})")),
      ParseError);  // duplicate canonical
  CHECK_THROWS_AS(
      import_graph(nodes(R"({"canonical": "a", "score": 0, "aliases": ["x"]},
                             {"canonical": "b", "score": 0, "aliases": ["x"]})")),
      ParseError);  // alias claimed twice
  CHECK_THROWS_AS(
      import_graph(nodes(R"({"canonical": "a", "score": 0, "aliases": ["b"]},
                             {"canonical": "b", "score": 0, "aliases": []})")),
      ParseError);  // alias collides with a canonical

  const auto with_edge = [](const std::string& edge) {
    return std::string(
               R"({"version": 1, "nodes": [{"canonical": "a", "score": 0, "aliases": []},)") +
           R"({"canonical": "b", "score": 0, "aliases": []}], "edges": [)" + edge + "]}";
  };
  CHECK_THROWS_AS(
      import_graph(with_edge(R"({"head": "a", "label": "Near", "tail": "b", "confidence": 1})")),
      ParseError);
  CHECK_THROWS_AS(
      import_graph(with_edge(R"({"head": "a", "label": "Is_A", "tail": "c", "confidence": 1})")),
      ParseError);  // endpoint without node
  CHECK_THROWS_AS(
      import_graph(with_edge(R"({"head": "a", "label": "Is_A", "tail": "a", "confidence": 1})")),
      ParseError);  // self Is_A
  CHECK_THROWS_AS(
      import_graph(with_edge(R"({"head": "a", "label": "Is_A", "tail": "b", "confidence": 2})")),
      ParseError);
  CHECK_THROWS_AS(
      import_graph(with_edge(R"({"head": "a", "label": "Is_A", "tail": "b"})")), ParseError);
  CHECK_THROWS_AS(import_graph(with_edge(
                      R"({"head": "a", "label": "Is_A", "tail": "b", "confidence": 1},
                         {"head": "a", "label": "Is_A", "tail": "b", "confidence": 1})")),
                  ParseError);  // duplicate edge
}

namespace {

// Random graph over a small name pool. Equal edges optional so the fixture
// serves both the merge and DAG properties.
OntologyGraph random_graph(Rng& rng, bool with_equals) {
  const std::vector<std::string> pool = {"n0", "n1", "n2", "n3", "n4", "n5", "n6", "n7"};
  OntologyGraph graph;
  const std::size_t node_count = 2 + rng.next_below(pool.size() - 2);
  for (std::size_t i = 0; i < node_count; ++i) {
    add_concept(graph, pool[i], static_cast<double>(rng.next_below(5)));
  }
  const std::size_t edge_count = rng.next_below(12);
  for (std::size_t i = 0; i < edge_count; ++i) {
    const std::string& head = pool[rng.next_below(node_count)];
    const std::string& tail = pool[rng.next_below(node_count)];
    std::size_t label = rng.next_below(kRelationCount);
    if (!with_equals && label == static_cast<std::size_t>(RelationLabel::Equal)) {
      label = static_cast<std::size_t>(RelationLabel::Is_A);
    }
    if (head == tail) label = static_cast<std::size_t>(RelationLabel::Different_of);
    const double confidence = static_cast<double>(rng.next_below(101)) / 100.0;
    add_triple(graph, triple_of(head, static_cast<RelationLabel>(label), tail, confidence));
  }
  return graph;
}

}  // namespace

TEST_CASE("randomized graph properties") {
  Rng rng(20240817);
  for (int trial = 0; trial < 150; ++trial) {
    // merge_equals: idempotent, and alias sets stay disjoint.
    OntologyGraph graph = random_graph(rng, true);
    const OntologyGraph merged = merge_equals(graph);
    CHECK(merge_equals(merged) == merged);
    std::set<std::string> names;
    for (const auto& [name, node] : merged.nodes) {
      CHECK(names.insert(name).second);
      for (const std::string& alias : node.aliases) {
        CHECK(alias != node.canonical);
        CHECK(names.insert(alias).second);
      }
    }

    // enforce_isa_dag: acyclic afterwards, dropped + kept = original Is_A set.
    const IsaDagResult repaired = enforce_isa_dag(merged);
    const auto order = isa_topological_order(repaired.graph);
    REQUIRE(order.has_value());
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order->size(); ++i) pos[(*order)[i]] = i;
    std::size_t kept_isa = 0;
    for (const OntologyEdge& e : edge_list(repaired.graph)) {
      if (e.label != RelationLabel::Is_A) continue;
      ++kept_isa;
      CHECK(pos.at(e.head) < pos.at(e.tail));  // constructive acyclicity
    }
    std::size_t original_isa = 0;
    for (const OntologyEdge& e : edge_list(merged)) {
      if (e.label == RelationLabel::Is_A) ++original_isa;
    }
    CHECK(kept_isa + repaired.dropped.size() == original_isa);

    // Round-trip at every stage.
    const std::string bytes = export_graph(repaired.graph);
    CHECK(export_graph(import_graph(bytes)) == bytes);
  }
}

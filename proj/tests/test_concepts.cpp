#include "onto/concepts.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "onto/corpus.hpp"
#include "onto/errors.hpp"
#include "onto/rng.hpp"

using namespace onto;

namespace {

Corpus corpus_of(std::vector<Document> docs) {
  Corpus c;
  c.documents = std::move(docs);
  return c;
}

// Independent sliding-window enumeration used as the extraction oracle.
// Deliberately structured differently from the library implementation: one
// pass per gram order, window checks done by re-scanning the window.
std::vector<ConceptCandidate> brute_force_candidates(const Corpus& corpus, std::size_t n_max) {
  std::map<std::string, std::uint64_t> tf;
  std::map<std::string, std::set<std::size_t>> docs_with;
  for (std::size_t n = 1; n <= n_max; ++n) {
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
      for (const Sentence& s : corpus.documents[d].sentences) {
        if (s.tokens.size() < n) continue;
        for (std::size_t i = 0; i + n <= s.tokens.size(); ++i) {
          const Token& first = s.tokens[i];
          const Token& last = s.tokens[i + n - 1];
          if (first.is_stopword || first.pos == Pos::Punct) continue;
          if (last.is_stopword || last.pos == Pos::Punct) continue;
          bool noun = false;
          for (std::size_t j = i; j < i + n; ++j)
            if (s.tokens[j].pos == Pos::Noun) noun = true;
          if (!noun) continue;
          std::string key;
          for (std::size_t j = i; j < i + n; ++j) {
            if (j > i) key += ' ';
            key += s.tokens[j].norm;
          }
          ++tf[key];
          docs_with[key].insert(d);
        }
      }
    }
  }
  std::vector<ConceptCandidate> out;
  for (const auto& [key, count] : tf) {
    ConceptCandidate c;
    c.norm_text = key;
    c.n = static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')) + 1;
    c.tf_total = count;
    c.df = docs_with[key].size();
    out.push_back(std::move(c));
  }
  return out;
}

bool same_candidates(const std::vector<ConceptCandidate>& a,
                     const std::vector<ConceptCandidate>& b) {
  if (a.size() != b.size()) return false;
  auto key = [](const ConceptCandidate& c) {
    return std::tuple<std::string, std::uint64_t, std::uint64_t, std::size_t>(
        c.norm_text, c.tf_total, c.df, c.n);
  };
  std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t, std::size_t>> ka, kb;
  for (const auto& c : a) ka.push_back(key(c));
  for (const auto& c : b) kb.push_back(key(c));
  std::sort(ka.begin(), ka.end());
  std::sort(kb.begin(), kb.end());
  return ka == kb;
}

std::set<std::string> texts_of(const std::vector<ConceptCandidate>& cs) {
  std::set<std::string> out;
  for (const auto& c : cs) out.insert(c.norm_text);
  return out;
}

}  // namespace

TEST_CASE("extract_ngram_candidates enumerates all valid windows") {
  // three all-NOUN non-stopword tokens
  const Document doc = load_tagged_tsv("alpha\tNOUN\tNP\nbeta\tNOUN\tNP\ngamma\tNOUN\tNP\n", "d");
  ConceptConfig cfg;
  cfg.n_max = 2;
  const auto cands = extract_ngram_candidates(corpus_of({doc}), cfg);
  CHECK(texts_of(cands) ==
        std::set<std::string>{"alpha", "beta", "gamma", "alpha beta", "beta gamma"});
  for (const auto& c : cands) {
    CHECK(c.tf_total == 1);
    CHECK(c.df == 1);
  }
}

TEST_CASE("boundary stopwords and punctuation are excluded") {
  // "is a sorting algorithm" with "is"/"a" stopwords, sorting+algorithm NOUN
  const Document doc = load_tagged_tsv(
      "is\tVERB\tVP\n"
      "a\tDET\tNP\n"
      "sorting\tNOUN\tNP\n"
      "algorithm\tNOUN\tNP\n",
      "d");
  ConceptConfig cfg;
  cfg.n_max = 2;
  const auto cands = extract_ngram_candidates(corpus_of({doc}), cfg);
  CHECK(texts_of(cands) == std::set<std::string>{"sorting", "algorithm", "sorting algorithm"});
}

TEST_CASE("n-grams need at least one NOUN") {
  const Document doc = load_tagged_tsv("running\tVERB\tVP\nfast\tADJ\tO\n", "d");
  ConceptConfig cfg;
  cfg.n_max = 2;
  CHECK(extract_ngram_candidates(corpus_of({doc}), cfg).empty());
}

TEST_CASE("empty corpus yields no candidates") {
  ConceptConfig cfg;
  CHECK(extract_ngram_candidates(Corpus{}, cfg).empty());
}

TEST_CASE("counts aggregate across sentences and documents") {
  const Document d1 = load_tagged_tsv("graph\tNOUN\tNP\n\ngraph\tNOUN\tNP\n", "d1");
  const Document d2 = load_tagged_tsv("graph\tNOUN\tNP\n", "d2");
  ConceptConfig cfg;
  cfg.n_max = 1;
  const auto cands = extract_ngram_candidates(corpus_of({d1, d2}), cfg);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].norm_text == "graph");
  CHECK(cands[0].tf_total == 3);
  CHECK(cands[0].df == 2);
}

TEST_CASE("tfidf matches hand-computed values bit-for-bit") {
  CHECK(tfidf(5, 7, 7) == 0.0);                     // term in every document
  CHECK(tfidf(1, 1, 2) == 0.6931471805599453);      // ln 2
  CHECK(tfidf(3, 2, 10) == 4.828313737302301);      // 3 ln 5
}

TEST_CASE("tfidf rejects violated preconditions") {
  CHECK_THROWS_AS(tfidf(1, 0, 1), ArgumentError);
  CHECK_THROWS_AS(tfidf(1, 3, 2), ArgumentError);
  CHECK_THROWS_AS(tfidf(0, 1, 1), ArgumentError);
}

TEST_CASE("tfidf is monotone in tf and antitone in df") {
  for (std::uint64_t tf = 1; tf < 20; ++tf)
    CHECK(tfidf(tf + 1, 3, 10) > tfidf(tf, 3, 10));
  for (std::uint64_t df = 1; df < 10; ++df)
    CHECK(tfidf(4, df + 1, 10) < tfidf(4, df, 10));
}

TEST_CASE("rank_top_k sorts by score then lexicographic norm_text") {
  auto make = [](const std::string& text, double score) {
    ConceptCandidate c;
    c.norm_text = text;
    c.score = score;
    return c;
  };
  const auto r1 = rank_top_k({make("a", 2.0), make("b", 1.0)}, 1);
  REQUIRE(r1.size() == 1);
  CHECK(r1[0].norm_text == "a");

  const auto r2 = rank_top_k({make("b", 1.0), make("a", 1.0)}, 1);
  REQUIRE(r2.size() == 1);
  CHECK(r2[0].norm_text == "a");  // lexicographic tie-break

  const auto r3 = rank_top_k({make("b", 1.0), make("a", 2.0)}, 10);
  REQUIRE(r3.size() == 2);
  CHECK(r3[0].norm_text == "a");
  CHECK(r3[1].norm_text == "b");
}

TEST_CASE("rank_top_k is deterministic under permutation") {
  std::vector<ConceptCandidate> cands;
  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    ConceptCandidate c;
    c.norm_text = "t" + std::to_string(i);
    c.score = static_cast<double>(rng.next_below(5));  // many ties
    cands.push_back(c);
  }
  const auto baseline = rank_top_k(cands, 20);
  for (int trial = 0; trial < 5; ++trial) {
    for (std::size_t i = cands.size(); i > 1; --i)
      std::swap(cands[i - 1], cands[rng.next_below(i)]);
    const auto ranked = rank_top_k(cands, 20);
    REQUIRE(ranked.size() == baseline.size());
    for (std::size_t i = 0; i < ranked.size(); ++i)
      CHECK(ranked[i].norm_text == baseline[i].norm_text);
  }
}

TEST_CASE("extraction matches the brute-force oracle on random corpora") {
  const char* pool[] = {"graph", "node",  "edge",   "fast",  "sorting", "is",
                        "the",   "model", "vector", "layer", "deep",    "a",
                        "index", "query", "data",   "of",    "tree",    "run"};
  const std::size_t pool_size = sizeof(pool) / sizeof(pool[0]);
  Rng rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Document> docs;
    const std::size_t n_docs = 5 + rng.next_below(10);
    for (std::size_t d = 0; d < n_docs; ++d) {
      std::string text;
      const std::size_t n_sent = 1 + rng.next_below(6);
      for (std::size_t s = 0; s < n_sent; ++s) {
        const std::size_t n_words = 1 + rng.next_below(12);
        for (std::size_t w = 0; w < n_words; ++w) {
          if (w) text += ' ';
          text += pool[rng.next_below(pool_size)];
        }
        text += ". ";
        text += "Next one starts here. ";
      }
      docs.push_back(load_plain_text(text, "doc" + std::to_string(d)));
    }
    const Corpus corpus = corpus_of(std::move(docs));
    ConceptConfig cfg;
    cfg.n_max = 3;
    const auto got = extract_ngram_candidates(corpus, cfg);
    const auto want = brute_force_candidates(corpus, cfg.n_max);
    CHECK(same_candidates(got, want));
  }
}

TEST_CASE("score_candidates applies min_df and find_concepts composes") {
  const Document d1 = load_tagged_tsv("alpha\tNOUN\tNP\nbeta\tNOUN\tNP\n", "d1");
  const Document d2 = load_tagged_tsv("alpha\tNOUN\tNP\n", "d2");
  const Corpus corpus = corpus_of({d1, d2});
  ConceptConfig cfg;
  cfg.n_max = 1;
  cfg.k = 10;
  cfg.min_df = 2;
  const auto concepts = find_concepts(corpus, cfg);
  REQUIRE(concepts.size() == 1);  // beta has df=1 < 2
  CHECK(concepts[0].norm_text == "alpha");
  CHECK(concepts[0].score == tfidf(2, 2, 2));
}

TEST_CASE("concept TSV export/parse round-trip") {
  const Document doc =
      load_tagged_tsv("alpha\tNOUN\tNP\nbeta\tNOUN\tNP\nalpha\tNOUN\tNP\n", "d");
  ConceptConfig cfg;
  cfg.n_max = 2;
  cfg.k = 100;
  const auto concepts = find_concepts(corpus_of({doc}), cfg);
  REQUIRE_FALSE(concepts.empty());
  const std::string tsv = export_concepts_tsv(concepts);
  const auto back = parse_concepts_tsv(tsv);
  REQUIRE(back.size() == concepts.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].norm_text == concepts[i].norm_text);
    CHECK(back[i].tf_total == concepts[i].tf_total);
    CHECK(back[i].df == concepts[i].df);
    CHECK(back[i].n == concepts[i].n);
    CHECK(back[i].score == concepts[i].score);  // bit-exact via %.17g
  }
  CHECK(export_concepts_tsv(back) == tsv);
}

TEST_CASE("parse_concepts_tsv reports malformed lines") {
  CHECK_THROWS_AS(parse_concepts_tsv("1.0\t2\tgraph\n"), ParseError);
  try {
    parse_concepts_tsv("1.0\t1\t1\tok\nnot-a-score\t1\t1\tbad\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

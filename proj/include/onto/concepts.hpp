#ifndef ONTO_CONCEPTS_HPP
#define ONTO_CONCEPTS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "onto/corpus.hpp"

namespace onto {

// An n-gram with corpus-wide statistics and a TF/IDF relevance score.
struct ConceptCandidate {
  std::string norm_text;     // space-joined normalized tokens
  std::size_t n = 1;         // gram order
  std::uint64_t tf_total = 0;  // occurrences across the corpus
  std::uint64_t df = 0;        // documents containing it
  double score = 0.0;
};

struct ConceptConfig {
  std::size_t n_max = 3;
  std::size_t k = 50;       // concepts kept after ranking
  std::uint64_t min_df = 1;
};

// All within-sentence n-grams (1 <= n <= n_max) whose boundary tokens are
// non-stopword and non-PUNCT and which contain at least one NOUN token,
// aggregated by norm_text. Scores are left at 0. Deterministic order:
// ascending norm_text.
std::vector<ConceptCandidate> extract_ngram_candidates(const Corpus& corpus,
                                                       const ConceptConfig& config);

// tf_total * ln(doc_count / df), natural log. Throws ArgumentError when
// df < 1, doc_count < df, or tf_total < 1.
double tfidf(std::uint64_t tf_total, std::uint64_t df, std::uint64_t doc_count);

// Applies tfidf() to every candidate, dropping those with df < min_df.
std::vector<ConceptCandidate> score_candidates(std::vector<ConceptCandidate> candidates,
                                               std::uint64_t doc_count, std::uint64_t min_df);

// Descending score, ties broken by ascending norm_text; keeps min(k, size).
std::vector<ConceptCandidate> rank_top_k(std::vector<ConceptCandidate> candidates, std::size_t k);

// Convenience: extract, score, rank.
std::vector<ConceptCandidate> find_concepts(const Corpus& corpus, const ConceptConfig& config);

// One candidate per line: score<TAB>df<TAB>tf<TAB>norm_text, descending score.
std::string export_concepts_tsv(const std::vector<ConceptCandidate>& concepts);
std::vector<ConceptCandidate> parse_concepts_tsv(std::string_view bytes);

}  // namespace onto

#endif  // ONTO_CONCEPTS_HPP

#ifndef ONTO_FEATURES_HPP
#define ONTO_FEATURES_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "onto/concepts.hpp"
#include "onto/corpus.hpp"

namespace onto {

// Binary feature layout for a concept pair. Slot ranges with T = term count:
//   [0,    T)      head term bag
//   [T,    2T)     tail term bag
//   [2T,   3T)     context term bag
//   [3T,      3T+15)  head tag bag   (11 POS slots in enum order, then 4 chunks)
//   [3T+15,   3T+30)  tail tag bag
//   [3T+30,   3T+45)  context tag bag
// dims = 3T + 45.
struct FeatureSpace {
  std::vector<std::string> terms;  // ascending lexicographic; slot = index
  std::size_t context_window = 10;  // context tokens kept nearest each mention

  std::size_t term_count() const { return terms.size(); }
  std::size_t dims() const { return 3 * terms.size() + 3 * (kPosCount + kChunkCount); }

  // Slot of a term (binary search over the sorted list), or npos when absent.
  std::size_t term_slot(std::string_view norm) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // FNV-1a over the canonical serialization; hex form is 16 lowercase digits.
  std::uint64_t fingerprint() const;
  std::string fingerprint_hex() const;
};

// A concept mention as a half-open token span within one sentence.
struct Mention {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct InstanceVector {
  std::vector<std::size_t> active_slots;  // strictly ascending
  std::size_t label = 0;
  std::string head;  // c1 norm_text
  std::string tail;  // c2 norm_text
  std::string doc_id;
  std::size_t sentence_index = 0;
};

struct TrainingSet {
  std::size_t dims = 0;
  std::vector<std::string> class_names;
  std::vector<InstanceVector> instances;
};

// Vocabulary = every distinct unigram inside a kept concept, plus every
// non-stopword corpus unigram with document frequency >= min_df. Throws
// ArgumentError on an empty concept list.
FeatureSpace build_feature_space(const std::vector<ConceptCandidate>& concepts,
                                 const Corpus& corpus, std::uint64_t min_df = 1);

// Builds the binary instance for one ordered mention pair. label is left 0.
// Throws ArgumentError when a span is empty/out of range or the spans overlap.
InstanceVector vectorize_pair(const Sentence& sentence, const Mention& head, const Mention& tail,
                              const FeatureSpace& space);

// SVT sparse-vector text: `#dims=D`, `#classes=C`, `#names=a,b,...`, then one
// `label<TAB>slot slot ...` line per instance (no TAB when no slots).
std::string format_training_file(const TrainingSet& set);
std::size_t write_training_file(const TrainingSet& set, const std::string& path);
TrainingSet parse_training_file(std::string_view bytes);
TrainingSet read_training_file(const std::string& path);

// Canonical JSON serialization of a FeatureSpace.
std::string export_feature_space(const FeatureSpace& space);
FeatureSpace parse_feature_space(std::string_view bytes);

}  // namespace onto

#endif  // ONTO_FEATURES_HPP

#ifndef ONTO_EXTRACTION_HPP
#define ONTO_EXTRACTION_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "onto/concepts.hpp"
#include "onto/corpus.hpp"
#include "onto/dbn.hpp"
#include "onto/features.hpp"

namespace onto {

// The closed relation taxonomy. "Used_to - Used_by" is split into two
// directed labels; declaration order is the canonical class order everywhere.
enum class RelationLabel {
  Equal,
  Is_A,
  Has_A,
  Different_of,
  Part_of,
  Used_to,
  Used_by,
  Result_of,
  Compared_to,
  Use_A,
  Depend_On,
};
inline constexpr std::size_t kRelationCount = 11;

std::string_view relation_name(RelationLabel label);
// The linguistic-relation name each label carries (Synonyms, Meronyms, ...).
std::string_view linguistic_name(RelationLabel label);
std::optional<RelationLabel> relation_from_name(std::string_view name);
// The 11 relation names in declared order.
const std::vector<std::string>& relation_class_names();

struct RelationTriple {
  std::string head;  // c1
  RelationLabel label = RelationLabel::Equal;
  std::string tail;  // c2
  double confidence = 1.0;
  std::string doc_id;
  std::size_t sentence_index = 0;
};

struct ExtractionConfig {
  double detect_threshold = 0.5;  // boundary-inclusive; must be in (0, 1)
  std::size_t k = 50;             // most-relevant-concept count, mirrors ConceptConfig
  double negative_ratio = 1.0;    // sampled negatives per positive
  std::uint64_t seed = 42;
};

struct LabelScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t tp = 0;
  std::uint64_t pred = 0;
  std::uint64_t gold = 0;
};

// Confusion matrix is (11 labels + "none") squared, row = gold, col =
// predicted; row/col index 11 is "none". An exact match lands on the
// diagonal, a missed gold triple in [gold][none], a spurious prediction in
// [none][pred], so the total equals |predicted ∪ gold|.
struct Metrics {
  std::vector<LabelScore> per_label;  // size 11, declared label order
  LabelScore micro;
  std::vector<std::uint64_t> confusion;  // 12x12 row-major
};

// A located concept mention.
struct ConceptMention {
  Mention span;
  std::string text;  // concept norm_text
};

// Greedy longest-match, non-overlapping, left to right.
std::vector<ConceptMention> find_concept_mentions(const Sentence& sentence,
                                                  const std::vector<ConceptCandidate>& concepts);

// Base 12-class training set over ["none"] + the 11 labels. Every ordered
// pair of distinct mentions in a sentence becomes an instance. With gold
// triples supplied, matching (head, tail) pairs get their label and the
// remaining pairs are downsampled to negative_ratio x positives using
// derive_seed(cfg.seed, "negatives"); without gold, all pairs are kept
// unlabeled (label 0) for inference.
TrainingSet generate_pair_instances(const Corpus& corpus,
                                    const std::vector<ConceptCandidate>& concepts,
                                    const FeatureSpace& space,
                                    const std::vector<RelationTriple>& gold,
                                    const ExtractionConfig& cfg);

// Per-model training sets derived from the base set.
TrainingSet derive_relation_detect_set(const TrainingSet& base);     // ["no","yes"]
TrainingSet derive_relation_classify_set(const TrainingSet& base);   // 11 labels
TrainingSet derive_concept_detect_set(const TrainingSet& base);      // yes iff Is_A
// Classes = candidate parent concepts; instances are Is_A pairs whose tail is
// a candidate parent.
TrainingSet derive_concept_classify_set(const TrainingSet& base,
                                        const std::vector<std::string>& candidate_parents);

// Taxonomy levels 2-3: the top-k concepts in rank order, then any further
// Is_A gold/detected parents not already present, ascending lexicographic.
std::vector<std::string> candidate_parents(const std::vector<ConceptCandidate>& concepts,
                                           const std::vector<RelationTriple>& isa_triples);

// Two-output detectors. "yes" iff P(yes) >= detect_threshold (inclusive).
// Throws CompatibilityError on fingerprint mismatch or wrong class list.
std::pair<bool, double> detect_concept_subsumption(const DbnModel& model,
                                                   const InstanceVector& inst,
                                                   const FeatureSpace& space,
                                                   const ExtractionConfig& cfg);
std::pair<bool, double> detect_relation(const DbnModel& model, const InstanceVector& inst,
                                        const FeatureSpace& space, const ExtractionConfig& cfg);

// argmax over the candidate parents (model classes must equal the list).
std::pair<std::string, double> classify_parent_concept(
    const DbnModel& model, const InstanceVector& inst, const FeatureSpace& space,
    const std::vector<std::string>& parents);

// argmax over the 11 relation labels; emits the triple with provenance.
RelationTriple classify_relation(const DbnModel& model, const InstanceVector& inst,
                                 const FeatureSpace& space);

struct PipelineModels {
  DbnModel concept_detect;
  DbnModel concept_classify;
  DbnModel relation_detect;
  DbnModel relation_classify;
};

struct PipelineResult {
  std::vector<RelationTriple> triples;  // subsumption Is_A triples first
  std::uint64_t pairs_total = 0;
  std::uint64_t concept_detected = 0;
  std::uint64_t concept_classified = 0;
  std::uint64_t relation_detected = 0;
  std::uint64_t relation_classified = 0;
};

// concepts -> pairs -> detect -> classify, on both routes. All four models
// are fingerprint-checked against the space before any inference.
PipelineResult run_pipeline(const Corpus& corpus, const PipelineModels& models,
                            const FeatureSpace& space, const ConceptConfig& concept_cfg,
                            const ExtractionConfig& cfg);

// Exact-match scoring on (head, label, tail); duplicates count once.
Metrics evaluate(const std::vector<RelationTriple>& predicted,
                 const std::vector<RelationTriple>& gold);

// Triples TSV: head<TAB>label<TAB>tail<TAB>confidence (confidence optional on
// input, always written on output).
std::string export_triples_tsv(const std::vector<RelationTriple>& triples);
std::vector<RelationTriple> parse_triples_tsv(std::string_view bytes);

// Canonical JSON metrics document.
std::string format_metrics(const Metrics& metrics);

}  // namespace onto

#endif  // ONTO_EXTRACTION_HPP

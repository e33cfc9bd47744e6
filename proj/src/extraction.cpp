#include "onto/extraction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "onto/errors.hpp"
#include "onto/jsonw.hpp"
#include "onto/rng.hpp"
#include "onto/textio.hpp"

namespace onto {

namespace {

constexpr std::array<std::string_view, kRelationCount> kRelationNames = {
    "Equal",   "Is_A",    "Has_A",      "Different_of", "Part_of",  "Used_to",
    "Used_by", "Result_of", "Compared_to", "Use_A",      "Depend_On",
};

constexpr std::array<std::string_view, kRelationCount> kLinguisticNames = {
    "Synonyms", "Hyponyms/Hypernyms", "Holonyms", "Homonyms",   "Meronyms", "Usage",
    "Usage",    "Result",             "Comparison", "Model",    "Dependence",
};

std::size_t label_index(RelationLabel label) {
  return static_cast<std::size_t>(label);
}

// (head, label index, tail) key for exact-match set operations.
using TripleKey = std::tuple<std::string, std::size_t, std::string>;

TripleKey key_of(const RelationTriple& t) {
  return {t.head, label_index(t.label), t.tail};
}

void check_threshold(const ExtractionConfig& cfg) {
  if (!(cfg.detect_threshold > 0.0 && cfg.detect_threshold < 1.0)) {
    throw ArgumentError("detect_threshold must lie strictly inside (0, 1), got " +
                        format_double(cfg.detect_threshold));
  }
}

// Fingerprint/width compatibility between a model and the feature space the
// instances were vectorized in. `what` names the model in error messages.
void check_space(const DbnModel& model, const FeatureSpace& space, const std::string& what) {
  const std::string fp = space.fingerprint_hex();
  if (model.space_fingerprint != fp) {
    throw CompatibilityError(what + ": feature-space fingerprint mismatch (model " +
                             model.space_fingerprint + ", space " + fp + ")");
  }
  if (model.dims != space.dims()) {
    throw CompatibilityError(what + ": input width mismatch (model " +
                             std::to_string(model.dims) + ", space " +
                             std::to_string(space.dims()) + ")");
  }
}

void check_detector_classes(const DbnModel& model, const std::string& what) {
  if (model.class_names != std::vector<std::string>{"no", "yes"}) {
    throw CompatibilityError(what + ": detector must have class_names [no, yes]");
  }
}

void check_relation_classes(const DbnModel& model, const std::string& what) {
  if (model.class_names != relation_class_names()) {
    throw CompatibilityError(what + ": class_names must be the " +
                             std::to_string(kRelationCount) + " relation labels in order");
  }
}

// P(yes) of a two-class detector on one instance; no validation.
double yes_probability(const DbnModel& model, const InstanceVector& inst) {
  const std::vector<double> p = forward(model, to_dense(inst, model.dims));
  return p[1];
}

// The 12-class base set every per-model set is derived from.
const std::vector<std::string>& base_class_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    v.reserve(1 + kRelationCount);
    v.emplace_back("none");
    for (std::string_view name : kRelationNames) v.emplace_back(name);
    return v;
  }();
  return names;
}

void check_base_set(const TrainingSet& base, const char* where) {
  if (base.class_names != base_class_names()) {
    throw ArgumentError(std::string(where) +
                        ": expected the 12-class pair set (none + 11 relation labels)");
  }
}

constexpr std::size_t kBaseIsA = 1 + static_cast<std::size_t>(RelationLabel::Is_A);

}  // namespace

std::string_view relation_name(RelationLabel label) {
  return kRelationNames[label_index(label)];
}

std::string_view linguistic_name(RelationLabel label) {
  return kLinguisticNames[label_index(label)];
}

std::optional<RelationLabel> relation_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kRelationCount; ++i) {
    if (kRelationNames[i] == name) return static_cast<RelationLabel>(i);
  }
  return std::nullopt;
}

const std::vector<std::string>& relation_class_names() {
  static const std::vector<std::string> names(kRelationNames.begin(), kRelationNames.end());
  return names;
}

std::vector<ConceptMention> find_concept_mentions(const Sentence& sentence,
                                                  const std::vector<ConceptCandidate>& concepts) {
  std::set<std::string, std::less<>> texts;
  std::size_t max_n = 0;
  for (const ConceptCandidate& c : concepts) {
    texts.insert(c.norm_text);
    max_n = std::max(max_n, c.n);
  }

  std::vector<ConceptMention> out;
  const std::vector<Token>& toks = sentence.tokens;
  std::size_t i = 0;
  while (i < toks.size()) {
    // Longest match starting at i; the key grows one token at a time.
    std::size_t best = 0;
    std::string best_text;
    std::string key;
    const std::size_t limit = std::min(max_n, toks.size() - i);
    for (std::size_t n = 1; n <= limit; ++n) {
      if (n > 1) key += ' ';
      key += toks[i + n - 1].norm;
      if (texts.find(key) != texts.end()) {
        best = n;
        best_text = key;
      }
    }
    if (best > 0) {
      out.push_back(ConceptMention{Mention{i, i + best}, std::move(best_text)});
      i += best;  // non-overlapping: resume after the match
    } else {
      ++i;
    }
  }
  return out;
}

TrainingSet generate_pair_instances(const Corpus& corpus,
                                    const std::vector<ConceptCandidate>& concepts,
                                    const FeatureSpace& space,
                                    const std::vector<RelationTriple>& gold,
                                    const ExtractionConfig& cfg) {
  TrainingSet out;
  out.dims = space.dims();
  out.class_names = base_class_names();

  // First gold triple per (head, tail) wins.
  std::map<std::pair<std::string, std::string>, std::size_t> gold_label;
  for (const RelationTriple& t : gold) {
    gold_label.emplace(std::make_pair(t.head, t.tail), 1 + label_index(t.label));
  }

  std::vector<InstanceVector> instances;
  std::vector<std::size_t> negative_at;  // indices of unlabeled pairs
  std::size_t positives = 0;
  for (const Document& doc : corpus.documents) {
    for (const Sentence& sentence : doc.sentences) {
      const std::vector<ConceptMention> mentions = find_concept_mentions(sentence, concepts);
      for (std::size_t a = 0; a < mentions.size(); ++a) {
        for (std::size_t b = 0; b < mentions.size(); ++b) {
          if (a == b) continue;
          InstanceVector inst =
              vectorize_pair(sentence, mentions[a].span, mentions[b].span, space);
          inst.doc_id = doc.id;
          const auto it = gold_label.find(std::make_pair(inst.head, inst.tail));
          if (it != gold_label.end()) {
            inst.label = it->second;
            ++positives;
          } else {
            inst.label = 0;
            negative_at.push_back(instances.size());
          }
          instances.push_back(std::move(inst));
        }
      }
    }
  }

  if (gold.empty()) {
    // Inference mode: keep every pair.
    out.instances = std::move(instances);
    return out;
  }

  // Seeded uniform choice of negative_ratio x positives unlabeled pairs,
  // keeping the survivors in enumeration order.
  std::size_t want = static_cast<std::size_t>(
      std::llround(cfg.negative_ratio * static_cast<double>(positives)));
  want = std::min(want, negative_at.size());
  Rng rng(derive_seed(cfg.seed, "negatives"));
  for (std::size_t i = negative_at.size(); i > 1; --i) {
    std::swap(negative_at[i - 1], negative_at[rng.next_below(i)]);
  }
  negative_at.resize(want);
  std::sort(negative_at.begin(), negative_at.end());

  std::set<std::size_t> keep(negative_at.begin(), negative_at.end());
  out.instances.reserve(positives + want);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].label != 0 || keep.count(i) != 0) {
      out.instances.push_back(std::move(instances[i]));
    }
  }
  return out;
}

TrainingSet derive_relation_detect_set(const TrainingSet& base) {
  check_base_set(base, "derive_relation_detect_set");
  TrainingSet out;
  out.dims = base.dims;
  out.class_names = {"no", "yes"};
  out.instances = base.instances;
  for (InstanceVector& inst : out.instances) inst.label = inst.label == 0 ? 0 : 1;
  return out;
}

TrainingSet derive_relation_classify_set(const TrainingSet& base) {
  check_base_set(base, "derive_relation_classify_set");
  TrainingSet out;
  out.dims = base.dims;
  out.class_names = relation_class_names();
  for (const InstanceVector& inst : base.instances) {
    if (inst.label == 0) continue;
    out.instances.push_back(inst);
    out.instances.back().label = inst.label - 1;
  }
  return out;
}

TrainingSet derive_concept_detect_set(const TrainingSet& base) {
  check_base_set(base, "derive_concept_detect_set");
  TrainingSet out;
  out.dims = base.dims;
  out.class_names = {"no", "yes"};
  out.instances = base.instances;
  for (InstanceVector& inst : out.instances) inst.label = inst.label == kBaseIsA ? 1 : 0;
  return out;
}

TrainingSet derive_concept_classify_set(const TrainingSet& base,
                                        const std::vector<std::string>& candidate_parents) {
  check_base_set(base, "derive_concept_classify_set");
  if (candidate_parents.empty()) {
    throw ArgumentError("derive_concept_classify_set: no candidate parents");
  }
  std::map<std::string, std::size_t> parent_slot;
  for (std::size_t i = 0; i < candidate_parents.size(); ++i) {
    if (!parent_slot.emplace(candidate_parents[i], i).second) {
      throw ArgumentError("derive_concept_classify_set: duplicate candidate parent '" +
                          candidate_parents[i] + "'");
    }
  }
  TrainingSet out;
  out.dims = base.dims;
  out.class_names = candidate_parents;
  for (const InstanceVector& inst : base.instances) {
    if (inst.label != kBaseIsA) continue;
    const auto it = parent_slot.find(inst.tail);
    if (it == parent_slot.end()) continue;  // parent outside the candidate list
    out.instances.push_back(inst);
    out.instances.back().label = it->second;
  }
  return out;
}

std::vector<std::string> candidate_parents(const std::vector<ConceptCandidate>& concepts,
                                           const std::vector<RelationTriple>& isa_triples) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  // Level 2: the ranked concepts, in rank order.
  for (const ConceptCandidate& c : concepts) {
    if (seen.insert(c.norm_text).second) out.push_back(c.norm_text);
  }
  // Level 3: children of level-2 concepts, appended in lexicographic order.
  std::set<std::string> children;
  for (const RelationTriple& t : isa_triples) {
    if (t.label != RelationLabel::Is_A) continue;
    if (seen.count(t.tail) != 0 && seen.count(t.head) == 0) children.insert(t.head);
  }
  for (const std::string& c : children) out.push_back(c);
  return out;
}

std::pair<bool, double> detect_concept_subsumption(const DbnModel& model,
                                                   const InstanceVector& inst,
                                                   const FeatureSpace& space,
                                                   const ExtractionConfig& cfg) {
  check_threshold(cfg);
  check_detector_classes(model, "detect_concept_subsumption");
  check_space(model, space, "detect_concept_subsumption");
  const double p_yes = yes_probability(model, inst);
  return {p_yes >= cfg.detect_threshold, p_yes};
}

std::pair<bool, double> detect_relation(const DbnModel& model, const InstanceVector& inst,
                                        const FeatureSpace& space, const ExtractionConfig& cfg) {
  check_threshold(cfg);
  check_detector_classes(model, "detect_relation");
  check_space(model, space, "detect_relation");
  const double p_yes = yes_probability(model, inst);
  return {p_yes >= cfg.detect_threshold, p_yes};
}

std::pair<std::string, double> classify_parent_concept(
    const DbnModel& model, const InstanceVector& inst, const FeatureSpace& space,
    const std::vector<std::string>& parents) {
  if (model.class_names != parents) {
    throw CompatibilityError(
        "classify_parent_concept: candidate parent list differs from the model's classes");
  }
  check_space(model, space, "classify_parent_concept");
  const auto [idx, confidence] = predict(model, to_dense(inst, model.dims));
  return {model.class_names[idx], confidence};
}

RelationTriple classify_relation(const DbnModel& model, const InstanceVector& inst,
                                 const FeatureSpace& space) {
  check_relation_classes(model, "classify_relation");
  check_space(model, space, "classify_relation");
  const auto [idx, confidence] = predict(model, to_dense(inst, model.dims));
  RelationTriple t;
  t.head = inst.head;
  t.label = static_cast<RelationLabel>(idx);
  t.tail = inst.tail;
  t.confidence = confidence;
  t.doc_id = inst.doc_id;
  t.sentence_index = inst.sentence_index;
  return t;
}

PipelineResult run_pipeline(const Corpus& corpus, const PipelineModels& models,
                            const FeatureSpace& space, const ConceptConfig& concept_cfg,
                            const ExtractionConfig& cfg) {
  check_threshold(cfg);
  // Every model is checked against the space before any inference runs.
  check_detector_classes(models.concept_detect, "run_pipeline: concept_detect");
  check_space(models.concept_detect, space, "run_pipeline: concept_detect");
  if (models.concept_classify.class_count() == 0) {
    throw CompatibilityError("run_pipeline: concept_classify has no classes");
  }
  check_space(models.concept_classify, space, "run_pipeline: concept_classify");
  check_detector_classes(models.relation_detect, "run_pipeline: relation_detect");
  check_space(models.relation_detect, space, "run_pipeline: relation_detect");
  check_relation_classes(models.relation_classify, "run_pipeline: relation_classify");
  check_space(models.relation_classify, space, "run_pipeline: relation_classify");

  const std::vector<ConceptCandidate> concepts = find_concepts(corpus, concept_cfg);
  const TrainingSet pairs = generate_pair_instances(corpus, concepts, space, {}, cfg);

  PipelineResult res;
  res.pairs_total = pairs.instances.size();
  std::vector<RelationTriple> subsumption;
  std::vector<RelationTriple> relations;
  for (const InstanceVector& inst : pairs.instances) {
    // Concept route: does inst.head have a parent here?
    if (yes_probability(models.concept_detect, inst) >= cfg.detect_threshold) {
      ++res.concept_detected;
      const auto [pidx, pconf] =
          predict(models.concept_classify, to_dense(inst, models.concept_classify.dims));
      ++res.concept_classified;
      const std::string& parent = models.concept_classify.class_names[pidx];
      if (parent != inst.head) {
        RelationTriple t;
        t.head = inst.head;
        t.label = RelationLabel::Is_A;
        t.tail = parent;
        t.confidence = pconf;
        t.doc_id = inst.doc_id;
        t.sentence_index = inst.sentence_index;
        subsumption.push_back(std::move(t));
      }
    }
    // Relation route.
    if (yes_probability(models.relation_detect, inst) >= cfg.detect_threshold) {
      ++res.relation_detected;
      RelationTriple t = classify_relation(models.relation_classify, inst, space);
      ++res.relation_classified;
      if (t.head != t.tail || t.label == RelationLabel::Different_of) {
        relations.push_back(std::move(t));
      }
    }
  }

  res.triples = std::move(subsumption);
  res.triples.insert(res.triples.end(), std::make_move_iterator(relations.begin()),
                     std::make_move_iterator(relations.end()));
  return res;
}

Metrics evaluate(const std::vector<RelationTriple>& predicted,
                 const std::vector<RelationTriple>& gold) {
  std::set<TripleKey> pset;
  for (const RelationTriple& t : predicted) pset.insert(key_of(t));
  std::set<TripleKey> gset;
  for (const RelationTriple& t : gold) gset.insert(key_of(t));

  constexpr std::size_t kNone = kRelationCount;       // confusion row/col 11
  constexpr std::size_t kSide = kRelationCount + 1;   // 12
  Metrics m;
  m.per_label.assign(kRelationCount, LabelScore{});
  m.confusion.assign(kSide * kSide, 0);

  for (const TripleKey& g : gset) {
    const std::size_t li = std::get<1>(g);
    ++m.per_label[li].gold;
    if (pset.count(g) != 0) {
      ++m.per_label[li].tp;
      ++m.confusion[li * kSide + li];
    } else {
      ++m.confusion[li * kSide + kNone];  // missed
    }
  }
  for (const TripleKey& p : pset) {
    const std::size_t li = std::get<1>(p);
    ++m.per_label[li].pred;
    if (gset.count(p) == 0) ++m.confusion[kNone * kSide + li];  // spurious
  }

  const auto fill = [](LabelScore& s) {
    s.precision = s.pred > 0 ? static_cast<double>(s.tp) / static_cast<double>(s.pred) : 0.0;
    s.recall = s.gold > 0 ? static_cast<double>(s.tp) / static_cast<double>(s.gold) : 0.0;
    s.f1 = s.precision + s.recall > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
  };
  for (LabelScore& s : m.per_label) {
    fill(s);
    m.micro.tp += s.tp;
  }
  m.micro.pred = pset.size();
  m.micro.gold = gset.size();
  fill(m.micro);
  return m;
}

std::string export_triples_tsv(const std::vector<RelationTriple>& triples) {
  std::string out;
  for (const RelationTriple& t : triples) {
    for (const std::string* side : {&t.head, &t.tail}) {
      if (side->empty() || side->find('\t') != std::string::npos ||
          side->find('\n') != std::string::npos) {
        throw ArgumentError("export_triples_tsv: concept text empty or contains TAB/newline");
      }
    }
    if (t.head == t.tail && t.label != RelationLabel::Different_of) {
      throw ArgumentError("export_triples_tsv: head equals tail for non-Different_of triple '" +
                          t.head + "'");
    }
    if (!(t.confidence >= 0.0 && t.confidence <= 1.0)) {
      throw ArgumentError("export_triples_tsv: confidence outside [0, 1]");
    }
    out += t.head;
    out += '\t';
    out += relation_name(t.label);
    out += '\t';
    out += t.tail;
    out += '\t';
    out += format_double(t.confidence);
    out += '\n';
  }
  return out;
}

std::vector<RelationTriple> parse_triples_tsv(std::string_view bytes) {
  if (!is_valid_utf8(bytes)) throw DecodeError("triples file is not valid UTF-8");
  std::vector<RelationTriple> out;
  const std::vector<std::string> lines = split_lines(bytes);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (lines[i].empty()) continue;
    const std::vector<std::string> fields = split(lines[i], '\t');
    if (fields.size() != 3 && fields.size() != 4) {
      throw ParseError("expected 3 or 4 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    RelationTriple t;
    t.head = fields[0];
    t.tail = fields[2];
    if (t.head.empty() || t.tail.empty()) {
      throw ParseError("empty concept text", line_no);
    }
    const std::optional<RelationLabel> label = relation_from_name(fields[1]);
    if (!label) throw ParseError("unknown relation label '" + fields[1] + "'", line_no);
    t.label = *label;
    if (t.head == t.tail && t.label != RelationLabel::Different_of) {
      throw ParseError("head equals tail for non-Different_of triple", line_no);
    }
    if (fields.size() == 4) {
      bool ok = false;
      t.confidence = parse_double(fields[3], ok);
      if (!ok || !(t.confidence >= 0.0 && t.confidence <= 1.0)) {
        throw ParseError("confidence must be a number in [0, 1], got '" + fields[3] + "'",
                         line_no);
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

void append_score(std::string& out, const std::string& name, const LabelScore& s,
                  const char* indent) {
  out += indent;
  out += "{\"label\": ";
  out += json_quote(name);
  out += ", \"precision\": ";
  out += format_double(s.precision);
  out += ", \"recall\": ";
  out += format_double(s.recall);
  out += ", \"f1\": ";
  out += format_double(s.f1);
  out += ", \"tp\": ";
  out += std::to_string(s.tp);
  out += ", \"pred\": ";
  out += std::to_string(s.pred);
  out += ", \"gold\": ";
  out += std::to_string(s.gold);
  out += '}';
}

}  // namespace

std::string format_metrics(const Metrics& metrics) {
  if (metrics.per_label.size() != kRelationCount ||
      metrics.confusion.size() != (kRelationCount + 1) * (kRelationCount + 1)) {
    throw ArgumentError("format_metrics: wrong per-label or confusion shape");
  }
  constexpr std::size_t kSide = kRelationCount + 1;
  std::string out = "{\n  \"labels\": [\n";
  for (std::size_t i = 0; i < kRelationCount; ++i) {
    append_score(out, std::string(kRelationNames[i]), metrics.per_label[i], "    ");
    out += i + 1 < kRelationCount ? ",\n" : "\n";
  }
  out += "  ],\n  \"micro\": ";
  append_score(out, "micro", metrics.micro, "");
  out += ",\n  \"confusion_classes\": [";
  for (std::size_t i = 0; i < kSide; ++i) {
    if (i > 0) out += ", ";
    out += json_quote(i < kRelationCount ? std::string(kRelationNames[i]) : std::string("none"));
  }
  out += "],\n  \"confusion\": [\n";
  for (std::size_t r = 0; r < kSide; ++r) {
    out += "    [";
    for (std::size_t c = 0; c < kSide; ++c) {
      if (c > 0) out += ", ";
      out += std::to_string(metrics.confusion[r * kSide + c]);
    }
    out += r + 1 < kSide ? "],\n" : "]\n";
  }
  out += "  ]\n}\n";
  return out;
}

}  // namespace onto

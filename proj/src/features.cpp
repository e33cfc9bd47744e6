#include "onto/features.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"
#include "onto/errors.hpp"
#include "onto/jsonw.hpp"
#include "onto/rng.hpp"
#include "onto/textio.hpp"

namespace onto {

std::size_t FeatureSpace::term_slot(std::string_view norm) const {
  const auto it = std::lower_bound(terms.begin(), terms.end(), norm);
  if (it == terms.end() || *it != norm) return npos;
  return static_cast<std::size_t>(it - terms.begin());
}

std::uint64_t FeatureSpace::fingerprint() const { return fnv1a64(export_feature_space(*this)); }

std::string FeatureSpace::fingerprint_hex() const {
  static const char* hex = "0123456789abcdef";
  const std::uint64_t h = fingerprint();
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[15 - i] = hex[(h >> (4 * i)) & 0xf];
  return out;
}

FeatureSpace build_feature_space(const std::vector<ConceptCandidate>& concepts,
                                 const Corpus& corpus, std::uint64_t min_df) {
  if (concepts.empty()) throw ArgumentError("build_feature_space: empty concept list");
  std::set<std::string> vocab;
  for (const ConceptCandidate& c : concepts)
    for (const std::string& unigram : split(c.norm_text, ' '))
      if (!unigram.empty()) vocab.insert(unigram);
  std::map<std::string, std::uint64_t> df;
  for (const Document& doc : corpus.documents) {
    std::set<std::string> seen;
    for (const Sentence& s : doc.sentences)
      for (const Token& t : s.tokens)
        if (!t.is_stopword) seen.insert(t.norm);
    for (const std::string& norm : seen) ++df[norm];
  }
  for (const auto& [norm, count] : df)
    if (count >= min_df) vocab.insert(norm);
  FeatureSpace space;
  space.terms.assign(vocab.begin(), vocab.end());
  return space;
}

namespace {

std::string join_norms(const Sentence& sentence, const Mention& m) {
  std::string out;
  for (std::size_t i = m.begin; i < m.end; ++i) {
    if (i > m.begin) out += ' ';
    out += sentence.tokens[i].norm;
  }
  return out;
}

}  // namespace

InstanceVector vectorize_pair(const Sentence& sentence, const Mention& head, const Mention& tail,
                              const FeatureSpace& space) {
  const std::size_t n = sentence.tokens.size();
  if (head.begin >= head.end || head.end > n)
    throw ArgumentError("vectorize_pair: bad head span");
  if (tail.begin >= tail.end || tail.end > n)
    throw ArgumentError("vectorize_pair: bad tail span");
  const bool head_first = head.end <= tail.begin;
  const bool tail_first = tail.end <= head.begin;
  if (!head_first && !tail_first) throw ArgumentError("vectorize_pair: overlapping mentions");

  const std::size_t t_count = space.term_count();
  const std::size_t tag_base = 3 * t_count;
  const std::size_t tag_width = kPosCount + kChunkCount;
  std::set<std::size_t> slots;
  const auto add_region = [&](std::size_t b, std::size_t e, std::size_t term_off,
                              std::size_t tag_off) {
    for (std::size_t i = b; i < e; ++i) {
      const Token& tok = sentence.tokens[i];
      const std::size_t s = space.term_slot(tok.norm);
      if (s != FeatureSpace::npos) slots.insert(term_off + s);
      slots.insert(tag_off + static_cast<std::size_t>(tok.pos));
      slots.insert(tag_off + kPosCount + static_cast<std::size_t>(tok.chunk));
    }
  };
  add_region(head.begin, head.end, 0, tag_base);
  add_region(tail.begin, tail.end, t_count, tag_base + tag_width);

  const std::size_t gap_b = head_first ? head.end : tail.end;
  const std::size_t gap_e = head_first ? tail.begin : head.begin;
  const std::size_t w = space.context_window;
  if (gap_e - gap_b > 2 * w) {
    add_region(gap_b, gap_b + w, 2 * t_count, tag_base + 2 * tag_width);
    add_region(gap_e - w, gap_e, 2 * t_count, tag_base + 2 * tag_width);
  } else {
    add_region(gap_b, gap_e, 2 * t_count, tag_base + 2 * tag_width);
  }

  InstanceVector inst;
  inst.active_slots.assign(slots.begin(), slots.end());
  inst.head = join_norms(sentence, head);
  inst.tail = join_norms(sentence, tail);
  inst.sentence_index = sentence.index;
  return inst;
}

namespace {

void validate_training_set(const TrainingSet& set) {
  if (set.class_names.empty()) throw ArgumentError("training set: no classes");
  for (const std::string& name : set.class_names)
    if (name.empty() || name.find(',') != std::string::npos ||
        name.find('\n') != std::string::npos)
      throw ArgumentError("training set: class name unrepresentable in SVT: '" + name + "'");
  for (const InstanceVector& inst : set.instances) {
    if (inst.label >= set.class_names.size())
      throw ArgumentError("training set: label out of range");
    std::size_t prev = FeatureSpace::npos;
    for (std::size_t s : inst.active_slots) {
      if (s >= set.dims) throw ArgumentError("training set: slot out of range");
      if (prev != FeatureSpace::npos && s <= prev)
        throw ArgumentError("training set: slots not strictly ascending");
      prev = s;
    }
  }
}

}  // namespace

std::string format_training_file(const TrainingSet& set) {
  validate_training_set(set);
  std::string out;
  out += "#dims=" + std::to_string(set.dims) + "\n";
  out += "#classes=" + std::to_string(set.class_names.size()) + "\n";
  out += "#names=";
  for (std::size_t i = 0; i < set.class_names.size(); ++i) {
    if (i) out += ',';
    out += set.class_names[i];
  }
  out += '\n';
  for (const InstanceVector& inst : set.instances) {
    out += std::to_string(inst.label);
    if (!inst.active_slots.empty()) {
      out += '\t';
      for (std::size_t i = 0; i < inst.active_slots.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(inst.active_slots[i]);
      }
    }
    out += '\n';
  }
  return out;
}

std::size_t write_training_file(const TrainingSet& set, const std::string& path) {
  const std::string bytes = format_training_file(set);
  write_file(path, bytes);
  return bytes.size();
}

TrainingSet parse_training_file(std::string_view bytes) {
  const std::vector<std::string> lines = split_lines(bytes);
  if (lines.size() < 3) throw ParseError("SVT file needs the 3 header lines", lines.size());
  const auto header_value = [&lines](std::size_t idx, std::string_view prefix) {
    const std::string& line = lines[idx];
    if (line.rfind(prefix, 0) != 0)
      throw ParseError("expected header '" + std::string(prefix) + "'", idx + 1);
    return line.substr(prefix.size());
  };
  TrainingSet set;
  bool ok = false;
  set.dims = parse_u64(header_value(0, "#dims="), ok);
  if (!ok) throw ParseError("bad #dims value", 1);
  const std::uint64_t classes = parse_u64(header_value(1, "#classes="), ok);
  if (!ok || classes < 1) throw ParseError("bad #classes value", 2);
  set.class_names = split(header_value(2, "#names="), ',');
  if (set.class_names.size() != classes)
    throw ParseError("#names count does not match #classes", 3);
  for (const std::string& name : set.class_names)
    if (name.empty()) throw ParseError("empty class name", 3);

  for (std::size_t li = 3; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    const std::string& line = lines[li];
    if (line.empty()) throw ParseError("empty instance line", line_no);
    const std::vector<std::string> cols = split(line, '\t');
    if (cols.size() > 2) throw ParseError("too many tab fields", line_no);
    InstanceVector inst;
    inst.label = parse_u64(cols[0], ok);
    if (!ok) throw ParseError("bad label '" + cols[0] + "'", line_no);
    if (inst.label >= classes) throw ParseError("label out of range", line_no);
    if (cols.size() == 2 && !cols[1].empty()) {
      std::size_t prev = FeatureSpace::npos;
      for (const std::string& field : split(cols[1], ' ')) {
        const std::uint64_t slot = parse_u64(field, ok);
        if (!ok) throw ParseError("bad slot '" + field + "'", line_no);
        if (slot >= set.dims) throw ParseError("slot out of range", line_no);
        if (prev != FeatureSpace::npos && slot <= prev)
          throw ParseError("slots not strictly ascending", line_no);
        inst.active_slots.push_back(slot);
        prev = slot;
      }
    }
    set.instances.push_back(std::move(inst));
  }
  return set;
}

TrainingSet read_training_file(const std::string& path) {
  return parse_training_file(read_file(path));
}

std::string export_feature_space(const FeatureSpace& space) {
  std::string out;
  out += "{\n";
  out += "  \"version\": 1,\n";
  out += "  \"context_window\": " + std::to_string(space.context_window) + ",\n";
  out += "  \"terms\": [";
  for (std::size_t i = 0; i < space.terms.size(); ++i) {
    if (i) out += ", ";
    out += json_quote(space.terms[i]);
  }
  out += "]\n}\n";
  return out;
}

FeatureSpace parse_feature_space(std::string_view bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("feature space: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version") || !j["version"].is_number_integer() ||
      j["version"].get<int>() != 1)
    throw ParseError("feature space: unsupported or missing version");
  if (!j.contains("context_window") || !j["context_window"].is_number_unsigned())
    throw ParseError("feature space: bad context_window");
  if (!j.contains("terms") || !j["terms"].is_array())
    throw ParseError("feature space: missing terms array");
  FeatureSpace space;
  space.context_window = j["context_window"].get<std::size_t>();
  for (const auto& item : j["terms"]) {
    if (!item.is_string()) throw ParseError("feature space: non-string term");
    space.terms.push_back(item.get<std::string>());
  }
  for (std::size_t i = 1; i < space.terms.size(); ++i)
    if (!(space.terms[i - 1] < space.terms[i]))
      throw ParseError("feature space: terms not strictly ascending");
  return space;
}

}  // namespace onto

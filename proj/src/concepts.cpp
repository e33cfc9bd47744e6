#include "onto/concepts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "onto/errors.hpp"
#include "onto/textio.hpp"

namespace onto {

namespace {

bool valid_boundary(const Token& t) { return !t.is_stopword && t.pos != Pos::Punct; }

std::size_t gram_order(const std::string& norm_text) {
  return static_cast<std::size_t>(std::count(norm_text.begin(), norm_text.end(), ' ')) + 1;
}

}  // namespace

std::vector<ConceptCandidate> extract_ngram_candidates(const Corpus& corpus,
                                                       const ConceptConfig& config) {
  struct Stat {
    std::uint64_t tf = 0;
    std::uint64_t df = 0;
  };
  // ordered map so the output comes out in ascending norm_text
  std::map<std::string, Stat> stats;
  for (const Document& doc : corpus.documents) {
    std::set<std::string> seen_in_doc;
    for (const Sentence& sentence : doc.sentences) {
      const std::vector<Token>& toks = sentence.tokens;
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (!valid_boundary(toks[i])) continue;
        bool has_noun = false;
        std::string key;
        for (std::size_t n = 1; n <= config.n_max && i + n <= toks.size(); ++n) {
          const Token& last = toks[i + n - 1];
          if (last.pos == Pos::Noun) has_noun = true;
          if (n > 1) key += ' ';
          key += last.norm;
          if (!valid_boundary(last)) continue;  // can still extend to a valid end
          if (!has_noun) continue;
          Stat& s = stats[key];
          ++s.tf;
          seen_in_doc.insert(key);
        }
      }
    }
    for (const std::string& key : seen_in_doc) ++stats[key].df;
  }
  std::vector<ConceptCandidate> out;
  out.reserve(stats.size());
  for (const auto& [key, stat] : stats) {
    ConceptCandidate c;
    c.norm_text = key;
    c.n = gram_order(key);
    c.tf_total = stat.tf;
    c.df = stat.df;
    out.push_back(std::move(c));
  }
  return out;
}

double tfidf(std::uint64_t tf_total, std::uint64_t df, std::uint64_t doc_count) {
  if (df < 1) throw ArgumentError("tfidf: df must be >= 1");
  if (doc_count < df) throw ArgumentError("tfidf: doc_count must be >= df");
  if (tf_total < 1) throw ArgumentError("tfidf: tf_total must be >= 1");
  return static_cast<double>(tf_total) *
         std::log(static_cast<double>(doc_count) / static_cast<double>(df));
}

std::vector<ConceptCandidate> score_candidates(std::vector<ConceptCandidate> candidates,
                                               std::uint64_t doc_count, std::uint64_t min_df) {
  std::vector<ConceptCandidate> out;
  out.reserve(candidates.size());
  for (ConceptCandidate& c : candidates) {
    if (c.df < min_df) continue;
    c.score = tfidf(c.tf_total, c.df, doc_count);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ConceptCandidate> rank_top_k(std::vector<ConceptCandidate> candidates, std::size_t k) {
  std::sort(candidates.begin(), candidates.end(),
            [](const ConceptCandidate& a, const ConceptCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.norm_text < b.norm_text;
            });
  if (candidates.size() > k) candidates.resize(k);
  return candidates;
}

std::vector<ConceptCandidate> find_concepts(const Corpus& corpus, const ConceptConfig& config) {
  std::vector<ConceptCandidate> candidates = extract_ngram_candidates(corpus, config);
  candidates = score_candidates(std::move(candidates), corpus.doc_count(), config.min_df);
  return rank_top_k(std::move(candidates), config.k);
}

std::string export_concepts_tsv(const std::vector<ConceptCandidate>& concepts) {
  std::string out;
  for (const ConceptCandidate& c : concepts) {
    out += format_double(c.score);
    out += '\t';
    out += std::to_string(c.df);
    out += '\t';
    out += std::to_string(c.tf_total);
    out += '\t';
    out += c.norm_text;
    out += '\n';
  }
  return out;
}

std::vector<ConceptCandidate> parse_concepts_tsv(std::string_view bytes) {
  std::vector<ConceptCandidate> out;
  const std::vector<std::string> lines = split_lines(bytes);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    if (line.empty()) continue;
    const std::size_t line_no = li + 1;
    const std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 4)
      throw ParseError("concept line needs 4 tab-separated columns", line_no);
    bool ok = false;
    ConceptCandidate c;
    c.score = parse_double(cols[0], ok);
    if (!ok) throw ParseError("bad score '" + cols[0] + "'", line_no);
    c.df = parse_u64(cols[1], ok);
    if (!ok) throw ParseError("bad df '" + cols[1] + "'", line_no);
    c.tf_total = parse_u64(cols[2], ok);
    if (!ok) throw ParseError("bad tf '" + cols[2] + "'", line_no);
    if (cols[3].empty()) throw ParseError("empty concept text", line_no);
    c.norm_text = cols[3];
    c.n = gram_order(c.norm_text);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace onto

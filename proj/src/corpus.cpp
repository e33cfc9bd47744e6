#include "onto/corpus.hpp"

#include <unordered_map>

#include "onto/errors.hpp"
#include "onto/textio.hpp"

namespace onto {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool ends_with(const std::string& w, std::string_view suffix) {
  // the stem must be non-empty, so "ed" itself is not a -ed form
  return w.size() > suffix.size() && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool all_digits(const std::string& w) {
  if (w.empty()) return false;
  for (char c : w)
    if (c < '0' || c > '9') return false;
  return true;
}

bool all_punct(const std::string& w) {
  if (w.empty()) return false;
  for (char c : w)
    if (!is_ascii_punct(c)) return false;
  return true;
}

// Bundled closed-class lexicon, keyed by norm. One tag per word; words with
// several uses get their most frequent closed-class reading.
const std::unordered_map<std::string, Pos>& closed_class_lexicon() {
  static const std::unordered_map<std::string, Pos> lex = [] {
    std::unordered_map<std::string, Pos> m;
    auto add = [&m](std::initializer_list<const char*> words, Pos p) {
      for (const char* w : words) m.emplace(w, p);
    };
    add({"the", "a",  "an",    "this",  "that",   "these",   "those", "each",  "every",
         "either", "neither", "both", "all", "some", "any", "no", "such", "another",
         "other", "its", "my", "your", "his", "her", "our", "their", "whose", "which",
         "what", "few", "several", "many", "much", "more", "most", "less", "least",
         "enough", "certain"},
        Pos::Det);
    add({"of",      "in",      "on",      "at",        "by",        "for",     "with",
         "from",    "to",      "into",    "onto",      "over",      "under",   "above",
         "below",   "between", "among",   "amongst",   "through",   "throughout",
         "during",  "before",  "after",   "against",   "about",     "across",  "along",
         "around",  "behind",  "beneath", "beside",    "besides",   "beyond",  "despite",
         "except",  "inside",  "outside", "near",      "off",       "past",    "per",
         "since",   "till",    "until",   "toward",    "towards",   "upon",    "via",
         "within",  "without", "amid",    "concerning", "regarding", "alongside",
         "underneath", "unto", "atop"},
        Pos::Prep);
    add({"and", "or", "but", "nor", "so", "yet", "if", "while", "whereas", "although",
         "though", "because", "unless", "whether", "once", "when", "whenever", "where",
         "wherever", "as", "than", "albeit", "lest", "provided"},
        Pos::Conj);
    add({"i",        "you",      "he",        "she",        "it",        "we",
         "they",     "me",       "him",       "us",         "them",      "myself",
         "yourself", "himself",  "herself",   "itself",     "ourselves", "themselves",
         "yourselves", "who",    "whom",      "someone",    "anyone",    "everyone",
         "something", "anything", "everything", "nothing",  "nobody",    "somebody",
         "anybody",  "everybody", "none",     "oneself",    "mine",      "yours",
         "hers",     "ours",     "theirs",    "whoever",    "whomever"},
        Pos::Pron);
    add({"is",   "am",    "are",  "was",   "were",  "be",     "been",   "being", "has",
         "have", "had",   "having", "do",  "does",  "did",    "done",   "doing", "can",
         "could", "will", "would", "shall", "should", "may",  "might",  "must",  "ought",
         "cannot"},
        Pos::Verb);
    add({"not",      "very",      "too",       "also",      "just",     "only",
         "now",      "then",      "here",      "there",     "again",    "often",
         "always",   "never",     "sometimes", "usually",   "already",  "still",
         "almost",   "quite",     "rather",    "soon",      "perhaps",  "maybe",
         "however",  "therefore", "thus",      "hence",     "moreover", "furthermore",
         "nevertheless", "nonetheless", "meanwhile", "otherwise", "instead", "indeed",
         "even",     "well",      "further",   "together",  "away",     "back",
         "forth",    "twice",     "seldom",    "rarely",    "somewhat", "somehow",
         "anywhere", "everywhere", "nowhere",  "else"},
        Pos::Adv);
    add({"zero",    "one",     "two",      "three",    "four",     "five",    "six",
         "seven",   "eight",   "nine",     "ten",      "eleven",   "twelve",  "thirteen",
         "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
         "thirty",  "forty",   "fifty",    "sixty",    "seventy",  "eighty",  "ninety",
         "hundred", "thousand", "million", "billion",  "first",    "second",  "third",
         "fourth",  "fifth"},
        Pos::Num);
    return m;
  }();
  return lex;
}

}  // namespace

std::string_view pos_name(Pos p) {
  switch (p) {
    case Pos::Noun: return "NOUN";
    case Pos::Verb: return "VERB";
    case Pos::Adj: return "ADJ";
    case Pos::Adv: return "ADV";
    case Pos::Det: return "DET";
    case Pos::Prep: return "PREP";
    case Pos::Conj: return "CONJ";
    case Pos::Pron: return "PRON";
    case Pos::Num: return "NUM";
    case Pos::Punct: return "PUNCT";
    case Pos::Other: return "OTHER";
  }
  return "OTHER";
}

std::string_view chunk_name(Chunk c) {
  switch (c) {
    case Chunk::NP: return "NP";
    case Chunk::VP: return "VP";
    case Chunk::PP: return "PP";
    case Chunk::O: return "O";
  }
  return "O";
}

Pos pos_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kPosCount; ++i) {
    const Pos p = static_cast<Pos>(i);
    if (pos_name(p) == name) return p;
  }
  return Pos::Other;
}

Chunk chunk_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kChunkCount; ++i) {
    const Chunk c = static_cast<Chunk>(i);
    if (chunk_name(c) == name) return c;
  }
  return Chunk::O;
}

const StopwordList& default_stopwords() {
  static const StopwordList words = {
      "a",        "about",    "above",   "after",    "again",      "against",  "all",
      "am",       "an",       "and",     "any",      "are",        "as",       "at",
      "be",       "because",  "been",    "before",   "being",      "below",    "between",
      "both",     "but",      "by",      "can",      "could",      "did",      "do",
      "does",     "doing",    "down",    "during",   "each",       "few",      "for",
      "from",     "further",  "had",     "has",      "have",       "having",   "he",
      "her",      "here",     "hers",    "herself",  "him",        "himself",  "his",
      "how",      "i",        "if",      "in",       "into",       "is",       "it",
      "its",      "itself",   "just",    "me",       "more",       "most",     "my",
      "myself",   "no",       "nor",     "not",      "now",        "of",       "off",
      "on",       "once",     "only",    "or",       "other",      "our",      "ours",
      "ourselves", "out",     "over",    "own",      "same",       "she",      "should",
      "so",       "some",     "such",    "than",     "that",       "the",      "their",
      "theirs",   "them",     "themselves", "then",  "there",      "these",    "they",
      "this",     "those",    "through", "to",       "too",        "under",    "until",
      "up",       "very",     "was",     "we",       "were",       "what",     "when",
      "where",    "which",    "while",   "who",      "whom",       "why",      "will",
      "with",     "would",    "you",     "your",     "yours",      "yourself", "yourselves"};
  return words;
}

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '.' || c == '?' || c == '!') {
      std::size_t j = i + 1;
      while (j < text.size() && is_space(text[j])) ++j;
      if (j > i + 1 && j < text.size() && text[j] >= 'A' && text[j] <= 'Z') {
        out.emplace_back(text.substr(start, i + 1 - start));
        start = j;
        i = j;
        continue;
      }
    }
    ++i;
  }
  if (start < text.size()) out.emplace_back(text.substr(start));
  return out;
}

std::vector<Token> tokenize(std::string_view sentence) {
  std::vector<Token> out;
  auto emit = [&out](std::string_view s) {
    Token t;
    t.surface.assign(s);
    t.norm = to_lower(s);
    out.push_back(std::move(t));
  };
  std::size_t i = 0;
  const std::size_t n = sentence.size();
  while (i < n) {
    while (i < n && is_space(sentence[i])) ++i;
    std::size_t j = i;
    while (j < n && !is_space(sentence[j])) ++j;
    if (j == i) break;
    const std::string_view w = sentence.substr(i, j - i);
    std::size_t b = 0;
    std::size_t e = w.size();
    while (b < e && is_ascii_punct(w[b])) {
      emit(w.substr(b, 1));
      ++b;
    }
    std::size_t t = e;
    while (t > b && is_ascii_punct(w[t - 1])) --t;
    if (t > b) emit(w.substr(b, t - b));
    for (std::size_t k = t; k < e; ++k) emit(w.substr(k, 1));
    i = j;
  }
  return out;
}

void tag_pos(std::vector<Token>& tokens) {
  const auto& lex = closed_class_lexicon();
  for (Token& t : tokens) {
    const auto it = lex.find(t.norm);
    if (it != lex.end()) {
      t.pos = it->second;
      continue;
    }
    const std::string& w = t.norm;
    if (ends_with(w, "ing") || ends_with(w, "ed") || ends_with(w, "ize")) {
      t.pos = Pos::Verb;
    } else if (ends_with(w, "ly")) {
      t.pos = Pos::Adv;
    } else if (ends_with(w, "ous") || ends_with(w, "ful") || ends_with(w, "ive") ||
               ends_with(w, "al")) {
      t.pos = Pos::Adj;
    } else if (all_digits(w)) {
      t.pos = Pos::Num;
    } else if (all_punct(w)) {
      t.pos = Pos::Punct;
    } else {
      t.pos = Pos::Noun;
    }
  }
}

namespace {

// Length of a DET? ADJ* NOUN+ run starting at i, 0 if none.
std::size_t np_run_length(const std::vector<Token>& tokens, std::size_t i) {
  std::size_t j = i;
  if (j < tokens.size() && tokens[j].pos == Pos::Det) ++j;
  while (j < tokens.size() && tokens[j].pos == Pos::Adj) ++j;
  std::size_t nouns = 0;
  while (j < tokens.size() && tokens[j].pos == Pos::Noun) {
    ++j;
    ++nouns;
  }
  return nouns > 0 ? j - i : 0;
}

}  // namespace

void tag_chunks(std::vector<Token>& tokens) {
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (const std::size_t np = np_run_length(tokens, i); np > 0) {
      for (std::size_t k = i; k < i + np; ++k) tokens[k].chunk = Chunk::NP;
      i += np;
    } else if (tokens[i].pos == Pos::Verb) {
      std::size_t j = i;
      while (j < tokens.size() && tokens[j].pos == Pos::Verb) ++j;
      for (std::size_t k = i; k < j; ++k) tokens[k].chunk = Chunk::VP;
      i = j;
    } else if (tokens[i].pos == Pos::Prep && np_run_length(tokens, i + 1) > 0) {
      tokens[i].chunk = Chunk::PP;
      ++i;
    } else {
      tokens[i].chunk = Chunk::O;
      ++i;
    }
  }
}

void mark_stopwords(std::vector<Token>& tokens, const StopwordList& stopwords) {
  for (Token& t : tokens) t.is_stopword = stopwords.count(t.norm) > 0;
}

Document load_plain_text(std::string_view bytes, const std::string& doc_id,
                         const std::string& source_path) {
  if (!is_valid_utf8(bytes)) throw DecodeError("document " + doc_id + " is not valid UTF-8");
  Document doc;
  doc.id = doc_id;
  doc.source_path = source_path;
  for (const std::string& seg : segment_sentences(bytes)) {
    std::vector<Token> tokens = tokenize(seg);
    if (tokens.empty()) continue;
    tag_pos(tokens);
    tag_chunks(tokens);
    mark_stopwords(tokens, default_stopwords());
    doc.sentences.push_back(Sentence{std::move(tokens), doc.sentences.size()});
  }
  return doc;
}

namespace {

// Parses one document starting at lines[li]; advances li past the document
// terminator. line numbers are 1-based over the whole stream.
Document parse_tsv_document(const std::vector<std::string>& lines, std::size_t& li,
                            const std::string& doc_id, const std::string& source_path) {
  Document doc;
  doc.id = doc_id;
  doc.source_path = source_path;
  Sentence cur;
  auto close_sentence = [&] {
    if (!cur.tokens.empty()) {
      cur.index = doc.sentences.size();
      doc.sentences.push_back(std::move(cur));
      cur = Sentence{};
    }
  };
  while (li < lines.size()) {
    const std::string& line = lines[li];
    const std::size_t line_no = li + 1;
    if (line.empty()) {
      ++li;
      if (cur.tokens.empty()) break;  // second blank in a row: document end
      close_sentence();
      continue;
    }
    const std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 3)
      throw ParseError("expected 3 tab-separated columns, got " + std::to_string(cols.size()),
                       line_no);
    if (cols[0].empty()) throw ParseError("empty token surface", line_no);
    Token t;
    t.surface = cols[0];
    t.norm = to_lower(cols[0]);
    t.pos = pos_from_name(cols[1]);
    t.chunk = chunk_from_name(cols[2]);
    cur.tokens.push_back(std::move(t));
    ++li;
  }
  close_sentence();
  for (Sentence& s : doc.sentences) mark_stopwords(s.tokens, default_stopwords());
  return doc;
}

}  // namespace

Document load_tagged_tsv(std::string_view bytes, const std::string& doc_id,
                         const std::string& source_path) {
  if (!is_valid_utf8(bytes)) throw DecodeError("document " + doc_id + " is not valid UTF-8");
  const std::vector<std::string> lines = split_lines(bytes);
  std::size_t li = 0;
  return parse_tsv_document(lines, li, doc_id, source_path);
}

std::vector<Document> load_tagged_tsv_multi(std::string_view bytes, const std::string& base_id,
                                            const std::string& source_path) {
  if (!is_valid_utf8(bytes)) throw DecodeError("document " + base_id + " is not valid UTF-8");
  const std::vector<std::string> lines = split_lines(bytes);
  std::vector<Document> docs;
  std::size_t li = 0;
  std::size_t k = 0;
  while (li < lines.size()) {
    const std::string id = k == 0 ? base_id : base_id + "." + std::to_string(k);
    Document doc = parse_tsv_document(lines, li, id, source_path);
    if (!doc.sentences.empty()) {
      docs.push_back(std::move(doc));
      ++k;
    }
  }
  return docs;
}

std::string export_tagged_tsv(const Document& doc) {
  std::string out;
  for (const Sentence& s : doc.sentences) {
    for (const Token& t : s.tokens) {
      out += t.surface;
      out += '\t';
      out += pos_name(t.pos);
      out += '\t';
      out += chunk_name(t.chunk);
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::string export_tagged_tsv(const Corpus& corpus) {
  std::string out;
  bool first = true;
  for (const Document& doc : corpus.documents) {
    if (!first) out += '\n';
    first = false;
    out += export_tagged_tsv(doc);
  }
  return out;
}

}  // namespace onto

#ifndef ONTO_CORPUS_HPP
#define ONTO_CORPUS_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace onto {

enum class Pos { Noun, Verb, Adj, Adv, Det, Prep, Conj, Pron, Num, Punct, Other };
enum class Chunk { NP, VP, PP, O };

inline constexpr std::size_t kPosCount = 11;
inline constexpr std::size_t kChunkCount = 4;

std::string_view pos_name(Pos p);
std::string_view chunk_name(Chunk c);
// Unknown names map to Other / O (the fallback rule for externally tagged input).
Pos pos_from_name(std::string_view name);
Chunk chunk_from_name(std::string_view name);

struct Token {
  std::string surface;
  std::string norm;  // lowercased surface, never empty
  Pos pos = Pos::Other;
  Chunk chunk = Chunk::O;
  bool is_stopword = false;
};

struct Sentence {
  std::vector<Token> tokens;  // non-empty
  std::size_t index = 0;      // position within document
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::string source_path;
};

struct Corpus {
  std::vector<Document> documents;
  std::size_t doc_count() const { return documents.size(); }
};

using StopwordList = std::unordered_set<std::string>;

// Bundled default English stopword list.
const StopwordList& default_stopwords();

// Splits at '.', '?' or '!' followed by whitespace and an ASCII uppercase
// letter. The terminator stays with the left sentence; only the splitting
// whitespace is dropped. Abbreviations before capitalized words split too
// ("Dr. Smith") -- a documented limitation of the rule.
std::vector<std::string> segment_sentences(std::string_view text);

// Whitespace split, then leading/trailing ASCII punctuation peeled off into
// their own tokens. Internal punctuation ("state-of-the-art", "tf/idf") stays.
// pos/chunk are left at their defaults.
std::vector<Token> tokenize(std::string_view sentence);

// Closed-class lexicon lookup first, then suffix rules (-ing/-ed/-ize VERB,
// -ly ADV, -ous/-ful/-ive/-al ADJ, all digits NUM, all punctuation PUNCT),
// default NOUN.
void tag_pos(std::vector<Token>& tokens);

// Maximal runs: DET? ADJ* NOUN+ -> NP, VERB+ -> VP, PREP before an NP run ->
// PP on the PREP token, everything else O. Requires pos set.
void tag_chunks(std::vector<Token>& tokens);

// Marks is_stopword by norm membership; never removes tokens.
void mark_stopwords(std::vector<Token>& tokens, const StopwordList& stopwords);

// Full ingestion: UTF-8 check, segmentation, tokenization, tagging, stopword
// marking with the default list. Empty input yields a document with no
// sentences. Throws DecodeError on invalid UTF-8.
Document load_plain_text(std::string_view bytes, const std::string& doc_id,
                         const std::string& source_path = "");

// One token per line, surface<TAB>pos<TAB>chunk. Blank line ends a sentence;
// two consecutive blank lines or EOF end the document. Unknown tag strings map
// to OTHER / O. Throws ParseError (with line number) on malformed rows.
Document load_tagged_tsv(std::string_view bytes, const std::string& doc_id,
                         const std::string& source_path = "");

// Parses a whole multi-document stream. Ids: base_id, base_id.1, base_id.2, ...
std::vector<Document> load_tagged_tsv_multi(std::string_view bytes, const std::string& base_id,
                                            const std::string& source_path = "");

// Canonical form: every sentence is followed by one blank line; documents are
// separated by one extra blank line. export then parse is the identity, and
// parse then export is byte-identical for canonical input with closed-set tags.
std::string export_tagged_tsv(const Document& doc);
std::string export_tagged_tsv(const Corpus& corpus);

}  // namespace onto

#endif  // ONTO_CORPUS_HPP

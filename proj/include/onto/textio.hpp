#ifndef ONTO_TEXTIO_HPP
#define ONTO_TEXTIO_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace onto {

// True iff bytes form valid UTF-8 (rejects overlongs, surrogates, > U+10FFFF).
bool is_valid_utf8(std::string_view bytes);

// Shortest decimal form with up to 17 significant digits ("%.17g"); parses
// back to the identical double. Used by every text format that carries floats.
std::string format_double(double x);

// strtod with full-consumption check.
double parse_double(std::string_view text, bool& ok);

// Non-negative integer; ok=false on junk or overflow.
std::uint64_t parse_u64(std::string_view text, bool& ok);

// Splits on a separator, keeping empty fields.
std::vector<std::string> split(std::string_view text, char sep);

// Splits text into lines at '\n'; a trailing newline does not add an empty line.
std::vector<std::string> split_lines(std::string_view text);

// ASCII-only lowercase; non-ASCII bytes pass through untouched.
std::string to_lower(std::string_view text);

bool is_ascii_punct(char c);

// Percent-encodes every byte outside RFC 3986 unreserved [A-Za-z0-9._~-].
std::string percent_encode(std::string_view text);

// Whole-file read/write. Throw IoError on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace onto

#endif  // ONTO_TEXTIO_HPP

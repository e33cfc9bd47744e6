#ifndef ONTO_JSONW_HPP
#define ONTO_JSONW_HPP

#include <string>
#include <string_view>

namespace onto {

// Quoted JSON string with the mandatory escapes (backslash, quote, control
// characters). All serialized files are written by hand so their byte layout
// is canonical; this is the only escaping they need.
inline std::string json_quote(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static const char* hex = "0123456789abcdef";
          out += "\\u00";
          out += hex[(c >> 4) & 0xf];
          out += hex[c & 0xf];
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

}  // namespace onto

#endif  // ONTO_JSONW_HPP

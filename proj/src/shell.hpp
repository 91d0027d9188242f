#pragma once

#include <string>

namespace nbsat::detail {

/// POSIX single-quote escaping for paths passed to std::system.
inline std::string shellQuote(const std::string &s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

} // namespace nbsat::detail

#include "nbsat/cnf.hpp"
#include "nbsat/union_find.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace nbsat {

//===----------------------------------------------------------------------===//
// CnfFormula / Assignment
//===----------------------------------------------------------------------===//

bool CnfFormula::isTautology(std::size_t clause) const {
  const Clause &c = clauses.at(clause);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (c[i] == ~c[j])
        return true;
  return false;
}

std::vector<std::size_t> CnfFormula::tautologicalClauses() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < clauses.size(); ++i)
    if (isTautology(i))
      out.push_back(i);
  return out;
}

Assignment Assignment::fromBits(const std::vector<bool> &bits) {
  Assignment a(static_cast<Var>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i)
    a.values_[i] = bits[i] ? 1 : 0;
  return a;
}

bool Assignment::value(Var v) const {
  std::int8_t x = values_.at(v - 1);
  if (x == kUnset)
    throw std::logic_error("variable " + std::to_string(v) + " is unassigned");
  return x == 1;
}

bool Assignment::isTotal() const {
  for (auto x : values_)
    if (x == kUnset)
      return false;
  return true;
}

//===----------------------------------------------------------------------===//
// DIMACS
//===----------------------------------------------------------------------===//

namespace {

std::vector<std::string_view> splitTokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start)
      out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parseInt(std::string_view tok, long long &out) {
  const char *end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

} // namespace

CnfFormula parseDimacs(std::string_view text,
                       std::vector<std::string> *warnings) {
  CnfFormula f;
  bool haveHeader = false;
  long long declaredClauses = 0;
  Clause current;
  std::vector<char> seen; // per-variable polarity bits for the open clause
  std::size_t lineNo = 0;

  auto closeClause = [&] {
    for (Literal l : current)
      seen[l.var] = 0;
    f.clauses.push_back(std::move(current));
    current.clear();
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineNo;

    auto tokens = splitTokens(line);
    if (tokens.empty())
      continue;
    if (tokens[0].front() == 'c')
      continue;
    if (tokens[0] == "%") // SATLIB trailer
      break;
    if (tokens[0] == "p") {
      if (haveHeader)
        throw DimacsError(lineNo, "duplicate header");
      long long nv = 0;
      if (tokens.size() != 4 || tokens[1] != "cnf" || !parseInt(tokens[2], nv) ||
          !parseInt(tokens[3], declaredClauses) || nv < 0 ||
          declaredClauses < 0 || nv > std::numeric_limits<int>::max())
        throw DimacsError(lineNo, "malformed header");
      f.numVars = static_cast<Var>(nv);
      seen.assign(f.numVars + 1, 0);
      haveHeader = true;
      continue;
    }
    if (!haveHeader)
      throw DimacsError(lineNo, "clause data before 'p cnf' header");

    for (auto tok : tokens) {
      long long v = 0;
      if (!parseInt(tok, v))
        throw DimacsError(lineNo, "non-integer token '" + std::string(tok) + "'");
      if (v == 0) {
        closeClause();
        continue;
      }
      long long mag = v < 0 ? -v : v;
      if (mag > static_cast<long long>(f.numVars))
        throw DimacsError(lineNo, "literal " + std::string(tok) +
                                      " exceeds declared variable count " +
                                      std::to_string(f.numVars));
      Literal l(static_cast<Var>(mag), v < 0);
      char bit = l.negative ? 2 : 1;
      if (seen[l.var] & bit)
        continue;
      seen[l.var] |= bit;
      current.push_back(l);
    }
  }

  if (!haveHeader)
    throw DimacsError(lineNo, "missing 'p cnf' header");
  if (!current.empty()) {
    if (warnings)
      warnings->push_back("last clause is not terminated by 0");
    closeClause();
  }
  if (static_cast<long long>(f.clauses.size()) != declaredClauses && warnings)
    warnings->push_back("header declares " + std::to_string(declaredClauses) +
                        " clauses but " + std::to_string(f.clauses.size()) +
                        " were read");
  return f;
}

CnfFormula readDimacsFile(const std::string &path,
                          std::vector<std::string> *warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseDimacs(ss.str(), warnings);
}

std::string writeDimacs(const CnfFormula &f) {
  std::string out = "p cnf " + std::to_string(f.numVars) + " " +
                    std::to_string(f.clauses.size()) + "\n";
  for (const Clause &c : f.clauses) {
    for (Literal l : c) {
      out += std::to_string(l.toDimacs());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

std::vector<std::string> listCnfFiles(const std::filesystem::path &dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw std::invalid_argument(dir.string() + " is not a directory");
  std::vector<std::string> out;
  for (const auto &de : fs::recursive_directory_iterator(dir)) {
    if (!de.is_regular_file())
      continue;
    auto ext = de.path().extension();
    if (ext == ".cnf" || ext == ".dimacs")
      out.push_back(fs::relative(de.path(), dir).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

//===----------------------------------------------------------------------===//
// Semantics
//===----------------------------------------------------------------------===//

bool evaluate(const CnfFormula &f, const Assignment &a) {
  if (a.numVars() < f.numVars)
    throw std::invalid_argument("assignment covers fewer variables than formula");
  for (Var v = 1; v <= f.numVars; ++v)
    if (!a.isAssigned(v))
      throw std::invalid_argument("assignment is partial: variable " +
                                  std::to_string(v) + " unassigned");
  for (const Clause &c : f.clauses) {
    bool sat = false;
    for (Literal l : c)
      if (a.satisfies(l)) {
        sat = true;
        break;
      }
    if (!sat)
      return false;
  }
  return true;
}

DualResult dualFormula(const CnfFormula &f, const BackboneLabeling &backbone) {
  std::vector<char> flip(f.numVars + 1, 0);
  BackboneLabeling labels;
  for (auto [v, phase] : backbone) {
    if (v == 0 || v > f.numVars)
      throw std::invalid_argument("backbone variable " + std::to_string(v) +
                                  " is not a variable of the formula");
    flip[v] = 1;
    labels.emplace(v, !phase);
  }
  DualResult out{f, std::move(labels)};
  for (Clause &c : out.formula.clauses)
    for (Literal &l : c)
      if (flip[l.var])
        l = ~l;
  return out;
}

Components connectedComponents(const CnfFormula &f) {
  // Elements 0..n-1 are variables, n..n+m-1 clauses.
  const std::size_t n = f.numVars, m = f.clauses.size();
  UnionFind uf(n + m);
  for (std::size_t ci = 0; ci < m; ++ci)
    for (Literal l : f.clauses[ci])
      uf.unite(l.var - 1, n + ci);

  Components out;
  out.ofVar.resize(n);
  out.ofClause.resize(m);
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> idOfRoot(n + m, kNone);
  auto assign = [&](std::size_t elem) {
    std::size_t root = uf.find(elem);
    if (idOfRoot[root] == kNone)
      idOfRoot[root] = out.count++;
    return idOfRoot[root];
  };
  for (std::size_t v = 0; v < n; ++v)
    out.ofVar[v] = assign(v);
  for (std::size_t ci = 0; ci < m; ++ci)
    out.ofClause[ci] = assign(n + ci);
  return out;
}

} // namespace nbsat

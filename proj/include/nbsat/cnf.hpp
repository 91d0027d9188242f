#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nbsat {

using Var = std::uint32_t;

/// A variable or its complement. Variables are numbered from 1.
struct Literal {
  Var var = 0;
  bool negative = false;

  constexpr Literal() = default;
  constexpr Literal(Var v, bool neg) : var(v), negative(neg) {}

  static Literal fromDimacs(int lit) {
    return Literal(static_cast<Var>(std::abs(lit)), lit < 0);
  }
  int toDimacs() const {
    return negative ? -static_cast<int>(var) : static_cast<int>(var);
  }

  constexpr Literal operator~() const { return Literal(var, !negative); }
  /// Value of the literal when its variable takes `phase`.
  constexpr bool satisfiedBy(bool phase) const { return phase != negative; }

  friend constexpr bool operator==(Literal, Literal) = default;
  friend constexpr auto operator<=>(Literal, Literal) = default;
};

using Clause = std::vector<Literal>;

/// Conjunction of clauses over variables 1..numVars.
struct CnfFormula {
  Var numVars = 0;
  std::vector<Clause> clauses;

  std::size_t numClauses() const { return clauses.size(); }

  /// Indices of clauses that contain both a literal and its complement.
  std::vector<std::size_t> tautologicalClauses() const;
  bool isTautology(std::size_t clause) const;

  friend bool operator==(const CnfFormula &, const CnfFormula &) = default;
};

/// Partial or total assignment of phases to variables 1..numVars.
class Assignment {
public:
  Assignment() = default;
  explicit Assignment(Var numVars) : values_(numVars, kUnset) {}
  /// Total assignment from a bit vector indexed by var - 1.
  static Assignment fromBits(const std::vector<bool> &bits);

  Var numVars() const { return static_cast<Var>(values_.size()); }
  bool isAssigned(Var v) const { return values_.at(v - 1) != kUnset; }
  bool value(Var v) const;
  void set(Var v, bool phase) { values_.at(v - 1) = phase ? 1 : 0; }
  void unset(Var v) { values_.at(v - 1) = kUnset; }
  bool isTotal() const;
  /// Truth value of a literal whose variable is assigned.
  bool satisfies(Literal l) const { return l.satisfiedBy(value(l.var)); }

  friend bool operator==(const Assignment &, const Assignment &) = default;

private:
  static constexpr std::int8_t kUnset = -1;
  std::vector<std::int8_t> values_;
};

/// Backbone variable -> the phase it takes in every model.
using BackboneLabeling = std::map<Var, bool>;

class DimacsError : public std::runtime_error {
public:
  DimacsError(std::size_t line, const std::string &what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Parses DIMACS CNF. Duplicate literals inside a clause are dropped (first
/// occurrence kept); tautologies and empty clauses are preserved. A header
/// clause count that disagrees with the body is reported through `warnings`.
CnfFormula parseDimacs(std::string_view text,
                       std::vector<std::string> *warnings = nullptr);
CnfFormula readDimacsFile(const std::string &path,
                          std::vector<std::string> *warnings = nullptr);

std::string writeDimacs(const CnfFormula &f);

/// DIMACS files (*.cnf, *.dimacs) below dir as sorted '/'-separated relative
/// paths.
std::vector<std::string> listCnfFiles(const std::filesystem::path &dir);

/// Throws std::invalid_argument if `a` is not total over f's variables.
bool evaluate(const CnfFormula &f, const Assignment &a);

struct DualResult {
  CnfFormula formula;
  BackboneLabeling labels;
};

/// Flips every occurrence of each backbone variable and negates its label.
DualResult dualFormula(const CnfFormula &f, const BackboneLabeling &backbone);

/// Partition of variables and clauses into connected components. Two clauses
/// share a component iff linked by a chain of shared variables.
struct Components {
  std::size_t count = 0;
  std::vector<std::size_t> ofVar;    // indexed by var - 1
  std::vector<std::size_t> ofClause; // indexed by clause index
};

/// Components are numbered in discovery order: variables ascending, then
/// clauses without variables in file order.
Components connectedComponents(const CnfFormula &f);

} // namespace nbsat

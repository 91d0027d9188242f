#pragma once

#include "nbsat/cnf.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nbsat {

enum class SolveStatus { Sat, Unsat, Unknown };
const char *toString(SolveStatus s);

enum class PhaseDefault { False, True, Hints };
const char *toString(PhaseDefault p);
PhaseDefault phaseDefaultFromString(const std::string &s);

struct SolverConfig {
  std::uint64_t seed = 0;
  /// Activity decay; the increment grows by 1/varDecay per conflict.
  double varDecay = 0.95;
  /// Luby restart unit, in conflicts.
  std::uint64_t restartBase = 100;
  PhaseDefault phaseDefault = PhaseDefault::False;
  bool rephase = true;
  /// Conflicts between rephases (grows arithmetically).
  std::uint64_t rephaseInterval = 1000;
  /// Conflicts before the first learned-clause reduction, and the increment
  /// added to that interval after each reduction.
  std::uint64_t reduceFirst = 2000;
  std::uint64_t reduceIncrement = 300;
  /// Learned clauses with LBD at most this are never deleted.
  std::uint32_t keepLbd = 2;
  /// Seconds; <= 0 means unlimited.
  double timeLimit = 0;
  std::optional<std::uint64_t> conflictLimit;

  void validate() const;
};

struct PhaseHint {
  bool phase = false;
  double confidence = 0;
};

/// Predicted phases, indexed by variable. Missing variables have no hint.
struct PhaseHints {
  std::map<Var, PhaseHint> hints;

  static PhaseHints fromAssignment(const Assignment &a, double confidence = 1.0);
};

class HintError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Reads the "NBH 1" text format. Throws HintError on malformed input.
PhaseHints parseHints(std::string_view text);
PhaseHints readHintsFile(const std::string &path);
std::string writeHints(const PhaseHints &h);

struct SolverStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learnedClauses = 0;
  double wallTime = 0;

  /// Equality on the deterministic counters (wall time excluded).
  bool sameCounters(const SolverStats &o) const {
    return conflicts == o.conflicts && decisions == o.decisions &&
           propagations == o.propagations && restarts == o.restarts &&
           learnedClauses == o.learnedClauses;
  }
};

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  Assignment model; // total, SAT only
  SolverStats stats;
};

/// Incremental CDCL solver over a fixed formula. Learned clauses persist
/// across solve() calls. Not thread-safe; use one instance per thread.
class Solver {
public:
  Solver(const CnfFormula &f, SolverConfig cfg = {},
         const PhaseHints *hints = nullptr);
  ~Solver();
  Solver(Solver &&) noexcept;
  Solver &operator=(Solver &&) noexcept;

  /// Decides f under the assumptions. Statistics in the result cover this
  /// call only.
  SolveResult solve(std::span<const Literal> assumptions = {});

  /// Adds a clause implied by (or intended to strengthen) the formula.
  void addClause(std::span<const Literal> clause);

  /// Overrides the time limit for subsequent calls (seconds, <= 0 unlimited).
  void setTimeLimit(double seconds);

  /// Live learned clauses, for inspection in tests.
  std::vector<Clause> learnedClauses() const;

  /// Hints referencing variables beyond the formula.
  std::size_t ignoredHints() const;

  const SolverStats &totalStats() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SolveResult solve(const CnfFormula &f, const SolverConfig &cfg = {},
                  const PhaseHints *hints = nullptr);
SolveResult solveWithAssumptions(const CnfFormula &f,
                                 std::span<const Literal> assumptions,
                                 const SolverConfig &cfg = {});

/// True iff r is SAT and its model satisfies f.
bool checkModel(const CnfFormula &f, const SolveResult &r);

} // namespace nbsat

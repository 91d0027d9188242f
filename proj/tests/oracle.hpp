#pragma once

// Independent reference procedures for tests. Nothing here shares code with
// the CDCL solver or the backbone extractor.

#include "nbsat/cnf.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace nbsat::oracle {

/// Walks the full truth table 64 assignments at a time. Calls
/// `visit(block, satMask)` for every block with at least one model; bit i of
/// satMask is the assignment whose variables 1..6 are the bits of i and whose
/// variables 7..n are the bits of `block`. Requires numVars <= 26.
inline void forEachModelBlock(
    const CnfFormula &f,
    const std::function<void(std::uint64_t, std::uint64_t)> &visit) {
  const unsigned n = f.numVars;
  if (n > 26)
    throw std::invalid_argument("truth table too large");
  static constexpr std::uint64_t kPattern[6] = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  const std::uint64_t valid = n >= 6 ? ~0ull : ((1ull << (1u << n)) - 1);
  const std::uint64_t blocks = n > 6 ? (1ull << (n - 6)) : 1;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    std::uint64_t sat = valid;
    for (const Clause &c : f.clauses) {
      std::uint64_t cm = 0;
      for (Literal l : c) {
        std::uint64_t m;
        if (l.var <= 6)
          m = kPattern[l.var - 1];
        else
          m = ((b >> (l.var - 7)) & 1) ? ~0ull : 0;
        cm |= l.negative ? ~m : m;
      }
      sat &= cm;
      if (!sat)
        break;
    }
    if (sat)
      visit(b, sat);
  }
}

inline bool bitOf(std::uint64_t block, unsigned index, Var v) {
  return v <= 6 ? ((index >> (v - 1)) & 1) : ((block >> (v - 7)) & 1);
}

inline std::uint64_t countModels(const CnfFormula &f) {
  std::uint64_t n = 0;
  forEachModelBlock(f, [&](std::uint64_t, std::uint64_t sat) {
    n += static_cast<std::uint64_t>(__builtin_popcountll(sat));
  });
  return n;
}

/// Some model, or nullopt when unsatisfiable.
inline std::optional<Assignment> bruteForceModel(const CnfFormula &f) {
  std::optional<Assignment> out;
  forEachModelBlock(f, [&](std::uint64_t b, std::uint64_t sat) {
    if (out)
      return;
    unsigned i = static_cast<unsigned>(__builtin_ctzll(sat));
    Assignment a(f.numVars);
    for (Var v = 1; v <= f.numVars; ++v)
      a.set(v, bitOf(b, i, v));
    out = a;
  });
  return out;
}

/// Every model, explicitly. Only for tiny formulas.
inline std::vector<Assignment> allModels(const CnfFormula &f) {
  std::vector<Assignment> out;
  forEachModelBlock(f, [&](std::uint64_t b, std::uint64_t sat) {
    for (unsigned i = 0; i < 64; ++i)
      if ((sat >> i) & 1) {
        Assignment a(f.numVars);
        for (Var v = 1; v <= f.numVars; ++v)
          a.set(v, bitOf(b, i, v));
        out.push_back(std::move(a));
      }
  });
  return out;
}

/// Backbone by truth-table enumeration; nullopt when unsatisfiable.
inline std::optional<BackboneLabeling> enumerateBackbone(const CnfFormula &f) {
  static constexpr std::uint64_t kPattern[6] = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  std::vector<char> seenTrue(f.numVars + 1, 0), seenFalse(f.numVars + 1, 0);
  bool any = false;
  forEachModelBlock(f, [&](std::uint64_t b, std::uint64_t sat) {
    any = true;
    for (Var v = 1; v <= f.numVars; ++v) {
      if (v <= 6) {
        seenTrue[v] |= (sat & kPattern[v - 1]) != 0;
        seenFalse[v] |= (sat & ~kPattern[v - 1]) != 0;
      } else if ((b >> (v - 7)) & 1) {
        seenTrue[v] = 1;
      } else {
        seenFalse[v] = 1;
      }
    }
  });
  if (!any)
    return std::nullopt;
  BackboneLabeling bb;
  for (Var v = 1; v <= f.numVars; ++v)
    if (seenTrue[v] != seenFalse[v])
      bb.emplace(v, seenTrue[v] != 0);
  return bb;
}

/// Plain recursive DPLL with unit propagation, for formulas beyond truth-table
/// range.
class Dpll {
public:
  explicit Dpll(const CnfFormula &f) : f_(f), value_(f.numVars + 1, -1) {}

  std::optional<Assignment> solve() {
    if (!search())
      return std::nullopt;
    Assignment a(f_.numVars);
    for (Var v = 1; v <= f_.numVars; ++v)
      a.set(v, value_[v] == 1);
    return a;
  }

private:
  int litValue(Literal l) const {
    int x = value_[l.var];
    return x < 0 ? -1 : (l.satisfiedBy(x == 1) ? 1 : 0);
  }

  // Returns false on conflict; appends assigned variables to `trail`.
  bool propagate(std::vector<Var> &trail) {
    for (bool changed = true; changed;) {
      changed = false;
      for (const Clause &c : f_.clauses) {
        int unassigned = 0;
        Literal last;
        bool sat = false;
        for (Literal l : c) {
          int x = litValue(l);
          if (x == 1) {
            sat = true;
            break;
          }
          if (x < 0) {
            ++unassigned;
            last = l;
          }
        }
        if (sat)
          continue;
        if (unassigned == 0)
          return false;
        if (unassigned == 1) {
          value_[last.var] = last.negative ? 0 : 1;
          trail.push_back(last.var);
          changed = true;
        }
      }
    }
    return true;
  }

  bool search() {
    std::vector<Var> trail;
    if (!propagate(trail)) {
      undo(trail);
      return false;
    }
    // Branch on the most frequent variable among unsatisfied clauses.
    std::vector<int> score(f_.numVars + 1, 0);
    Var best = 0;
    for (const Clause &c : f_.clauses) {
      bool sat = false;
      for (Literal l : c)
        if (litValue(l) == 1)
          sat = true;
      if (sat)
        continue;
      for (Literal l : c)
        if (litValue(l) < 0 && ++score[l.var] > score[best])
          best = l.var;
    }
    if (best == 0) {
      for (Var v = 1; v <= f_.numVars; ++v)
        if (value_[v] < 0)
          value_[v] = 0;
      return true;
    }
    for (int phase : {1, 0}) {
      value_[best] = phase;
      if (search())
        return true;
    }
    value_[best] = -1;
    undo(trail);
    return false;
  }

  void undo(const std::vector<Var> &trail) {
    for (Var v : trail)
      value_[v] = -1;
  }

  const CnfFormula &f_;
  std::vector<int> value_;
};

inline std::optional<Assignment> dpllModel(const CnfFormula &f) {
  return Dpll(f).solve();
}

} // namespace nbsat::oracle

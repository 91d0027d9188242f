#include "nbsat/solver.hpp"
#include "nbsat/rng.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <sstream>

namespace nbsat {

const char *toString(SolveStatus s) {
  switch (s) {
  case SolveStatus::Sat:
    return "SAT";
  case SolveStatus::Unsat:
    return "UNSAT";
  case SolveStatus::Unknown:
    return "UNKNOWN";
  }
  return "?";
}

const char *toString(PhaseDefault p) {
  switch (p) {
  case PhaseDefault::False:
    return "false";
  case PhaseDefault::True:
    return "true";
  case PhaseDefault::Hints:
    return "hints";
  }
  return "?";
}

PhaseDefault phaseDefaultFromString(const std::string &s) {
  if (s == "false")
    return PhaseDefault::False;
  if (s == "true")
    return PhaseDefault::True;
  if (s == "hints")
    return PhaseDefault::Hints;
  throw std::invalid_argument("unknown phase default '" + s + "'");
}

void SolverConfig::validate() const {
  if (!(varDecay > 0 && varDecay < 1))
    throw std::invalid_argument("var_decay must lie in (0,1)");
  if (restartBase == 0)
    throw std::invalid_argument("restart base must be positive");
  if (rephaseInterval == 0)
    throw std::invalid_argument("rephase interval must be positive");
  if (reduceFirst == 0)
    throw std::invalid_argument("reduce interval must be positive");
  if (timeLimit < 0)
    throw std::invalid_argument("time limit must be nonnegative");
}

//===----------------------------------------------------------------------===//
// Hint files
//===----------------------------------------------------------------------===//

PhaseHints PhaseHints::fromAssignment(const Assignment &a, double confidence) {
  PhaseHints h;
  for (Var v = 1; v <= a.numVars(); ++v)
    if (a.isAssigned(v))
      h.hints[v] = PhaseHint{a.value(v), confidence};
  return h;
}

PhaseHints parseHints(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineNo = 0;
  auto fail = [&](const std::string &what) {
    throw HintError("hints line " + std::to_string(lineNo) + ": " + what);
  };
  if (!std::getline(in, line))
    fail("empty hint file");
  ++lineNo;
  {
    std::istringstream hs(line);
    std::string magic, extra;
    int version = 0;
    if (!(hs >> magic >> version) || magic != "NBH" || (hs >> extra))
      fail("expected 'NBH 1' header");
    if (version != 1)
      fail("unsupported hint format version " + std::to_string(version));
  }
  PhaseHints h;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    std::istringstream ls(line);
    long long var = 0;
    int phase = -1;
    double conf = -1;
    std::string extra;
    if (!(ls >> var >> phase >> conf) || (ls >> extra))
      fail("expected '<var> <phase> <confidence>'");
    if (var < 1 || var > std::numeric_limits<Var>::max())
      fail("variable index must be positive");
    if (phase != 0 && phase != 1)
      fail("phase must be 0 or 1");
    if (!(conf >= 0.0 && conf <= 1.0))
      fail("confidence must lie in [0,1]");
    if (!h.hints.emplace(static_cast<Var>(var), PhaseHint{phase == 1, conf})
             .second)
      fail("duplicate hint for variable " + std::to_string(var));
  }
  return h;
}

PhaseHints readHintsFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw HintError("cannot open hint file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseHints(ss.str());
}

std::string writeHints(const PhaseHints &h) {
  std::ostringstream out;
  out << "NBH 1\n";
  out.precision(6);
  for (auto &[v, hint] : h.hints)
    out << v << ' ' << (hint.phase ? 1 : 0) << ' ' << hint.confidence << '\n';
  return out.str();
}

//===----------------------------------------------------------------------===//
// Solver internals
//===----------------------------------------------------------------------===//

namespace {

// Internal literal: 2 * (var - 1) + negative.
using Lit = std::uint32_t;
using CRef = std::uint32_t;

constexpr CRef kNoReason = std::numeric_limits<CRef>::max();
constexpr std::int8_t kFalse = 0, kTrue = 1, kUndef = 2;

inline Lit mkLit(Literal l) { return 2 * (l.var - 1) + (l.negative ? 1 : 0); }
inline Literal toLiteral(Lit l) { return Literal((l >> 1) + 1, l & 1); }
inline std::uint32_t varOf(Lit l) { return l >> 1; }
inline Lit neg(Lit l) { return l ^ 1; }

struct ClauseData {
  std::vector<Lit> lits;
  std::uint32_t lbd = 0;
  bool learnt = false;
  bool deleted = false;
};

struct Watcher {
  CRef cref;
  Lit blocker;
};

/// Binary max-heap over variable indices, ordered by activity with ties
/// broken toward the lower index.
class VarHeap {
public:
  explicit VarHeap(const std::vector<double> &act) : act_(act) {}

  void grow(std::size_t n) { pos_.assign(n, -1); }
  bool empty() const { return heap_.empty(); }
  bool contains(std::uint32_t v) const { return pos_[v] >= 0; }

  void insert(std::uint32_t v) {
    if (contains(v))
      return;
    pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(heap_.size() - 1);
  }

  void increased(std::uint32_t v) {
    if (contains(v))
      up(static_cast<std::size_t>(pos_[v]));
  }

  std::uint32_t pop() {
    std::uint32_t top = heap_.front();
    pos_[top] = -1;
    std::uint32_t last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      pos_[last] = 0;
      down(0);
    }
    return top;
  }

private:
  bool before(std::uint32_t a, std::uint32_t b) const {
    return act_[a] > act_[b] || (act_[a] == act_[b] && a < b);
  }
  void up(std::size_t i) {
    std::uint32_t v = heap_[i];
    while (i > 0) {
      std::size_t p = (i - 1) / 2;
      if (!before(v, heap_[p]))
        break;
      heap_[i] = heap_[p];
      pos_[heap_[i]] = static_cast<int>(i);
      i = p;
    }
    heap_[i] = v;
    pos_[v] = static_cast<int>(i);
  }
  void down(std::size_t i) {
    std::uint32_t v = heap_[i];
    for (;;) {
      std::size_t c = 2 * i + 1;
      if (c >= heap_.size())
        break;
      if (c + 1 < heap_.size() && before(heap_[c + 1], heap_[c]))
        ++c;
      if (!before(heap_[c], v))
        break;
      heap_[i] = heap_[c];
      pos_[heap_[i]] = static_cast<int>(i);
      i = c;
    }
    heap_[i] = v;
    pos_[v] = static_cast<int>(i);
  }

  const std::vector<double> &act_;
  std::vector<std::uint32_t> heap_;
  std::vector<int> pos_;
};

double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i)
    r *= y;
  return r;
}

} // namespace

struct Solver::Impl {
  using Clock = std::chrono::steady_clock;

  CnfFormula formula;
  SolverConfig cfg;
  std::uint32_t nVars = 0;
  bool ok = true;
  std::size_t ignoredHints = 0;

  std::vector<ClauseData> clauses;
  std::vector<std::vector<Watcher>> watches; // by literal being watched

  std::vector<std::int8_t> assigns;
  std::vector<int> level;
  std::vector<CRef> reason;
  std::vector<Lit> trail;
  std::vector<std::size_t> trailLim;
  std::size_t qhead = 0;

  std::vector<double> activity;
  double varInc = 1.0;
  VarHeap heap{activity};

  std::vector<char> savedPhase;
  std::vector<char> initialPhase;

  std::vector<char> seen;
  std::vector<std::uint64_t> levelStamp;
  std::uint64_t stamp = 0;

  std::uint64_t totalConflicts = 0;
  std::uint64_t nextReduce = 0;
  std::uint64_t reduceInterval = 0;
  std::uint64_t nextRephase = 0;
  std::uint64_t rephaseCount = 0;
  std::uint64_t restartIndex = 0;

  SolverStats stats; // current call
  SolverStats total;

  std::optional<Clock::time_point> deadline;

  Impl(const CnfFormula &f, SolverConfig c, const PhaseHints *hints)
      : formula(f), cfg(c), nVars(f.numVars) {
    cfg.validate();
    watches.resize(2 * static_cast<std::size_t>(nVars));
    assigns.assign(nVars, kUndef);
    level.assign(nVars, 0);
    reason.assign(nVars, kNoReason);
    activity.assign(nVars, 0.0);
    seen.assign(nVars, 0);
    levelStamp.assign(nVars + 1, 0);
    heap.grow(nVars);

    if (cfg.seed != 0) {
      Rng rng(cfg.seed);
      for (auto &a : activity)
        a = rng.uniform() * 1e-5;
    }
    for (std::uint32_t v = 0; v < nVars; ++v)
      heap.insert(v);

    initialPhase.assign(nVars, cfg.phaseDefault == PhaseDefault::True ? 1 : 0);
    if (hints) {
      for (auto &[v, h] : hints->hints) {
        if (v == 0 || v > nVars) {
          ++ignoredHints;
          continue;
        }
        if (cfg.phaseDefault == PhaseDefault::Hints)
          initialPhase[v - 1] = h.phase ? 1 : 0;
      }
    }
    savedPhase = initialPhase;

    reduceInterval = cfg.reduceFirst;
    nextReduce = reduceInterval;
    nextRephase = cfg.rephaseInterval;

    for (const Clause &c : f.clauses) {
      std::vector<Literal> lits(c.begin(), c.end());
      addClause(lits);
      if (!ok)
        break;
    }
  }

  std::int8_t value(Lit l) const {
    std::int8_t a = assigns[varOf(l)];
    return a == kUndef ? kUndef : static_cast<std::int8_t>(a ^ (l & 1));
  }
  int decisionLevel() const { return static_cast<int>(trailLim.size()); }

  void enqueue(Lit l, CRef from) {
    std::uint32_t v = varOf(l);
    assigns[v] = (l & 1) ? kFalse : kTrue;
    level[v] = decisionLevel();
    reason[v] = from;
    trail.push_back(l);
  }

  void attach(CRef cr) {
    const auto &lits = clauses[cr].lits;
    watches[lits[0]].push_back({cr, lits[1]});
    watches[lits[1]].push_back({cr, lits[0]});
  }

  void addClause(std::span<const Literal> input) {
    if (!ok)
      return;
    assert(decisionLevel() == 0);
    std::vector<Lit> lits;
    for (Literal l : input) {
      if (l.var == 0 || l.var > nVars)
        throw std::invalid_argument("clause literal outside variable range");
      lits.push_back(mkLit(l));
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<Lit> kept;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i]))
        return; // tautology
      std::int8_t val = value(lits[i]);
      if (val == kTrue)
        return;
      if (val == kUndef)
        kept.push_back(lits[i]);
    }
    if (kept.empty()) {
      ok = false;
      return;
    }
    if (kept.size() == 1) {
      enqueue(kept[0], kNoReason);
      if (propagate() != kNoReason)
        ok = false;
      return;
    }
    CRef cr = static_cast<CRef>(clauses.size());
    clauses.push_back({std::move(kept), 0, false, false});
    attach(cr);
  }

  /// Two-watched-literal propagation. Returns the conflicting clause or
  /// kNoReason.
  CRef propagate() {
    CRef conflict = kNoReason;
    while (qhead < trail.size()) {
      Lit p = trail[qhead++];
      Lit falseLit = neg(p);
      ++stats.propagations;
      auto &ws = watches[falseLit];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        Watcher w = ws[i++];
        if (value(w.blocker) == kTrue) {
          ws[j++] = w;
          continue;
        }
        ClauseData &c = clauses[w.cref];
        if (c.deleted)
          continue;
        auto &lits = c.lits;
        if (lits[0] == falseLit)
          std::swap(lits[0], lits[1]);
        Lit first = lits[0];
        Watcher nw{w.cref, first};
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = nw;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < lits.size(); ++k) {
          if (value(lits[k]) != kFalse) {
            std::swap(lits[1], lits[k]);
            watches[lits[1]].push_back(nw);
            moved = true;
            break;
          }
        }
        if (moved)
          continue;
        ws[j++] = nw;
        if (value(first) == kFalse) {
          conflict = w.cref;
          qhead = trail.size();
          while (i < ws.size())
            ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != kNoReason)
        break;
    }
    return conflict;
  }

  void bumpVar(std::uint32_t v) {
    activity[v] += varInc;
    if (activity[v] > 1e100) {
      for (auto &a : activity)
        a *= 1e-100;
      varInc *= 1e-100;
    }
    heap.increased(v);
  }

  std::uint32_t computeLbd(const std::vector<Lit> &lits) {
    ++stamp;
    std::uint32_t n = 0;
    for (Lit l : lits) {
      int lv = level[varOf(l)];
      if (levelStamp[lv] != stamp) {
        levelStamp[lv] = stamp;
        ++n;
      }
    }
    return n;
  }

  /// First-UIP analysis. Fills `learnt` (asserting literal first) and
  /// returns the backjump level.
  int analyze(CRef confl, std::vector<Lit> &learnt) {
    learnt.clear();
    learnt.push_back(0); // placeholder for the UIP
    int pathCount = 0;
    Lit p = 0;
    bool haveP = false;
    std::size_t index = trail.size();
    std::vector<std::uint32_t> toClear;

    do {
      const ClauseData &c = clauses[confl];
      for (Lit q : c.lits) {
        if (haveP && q == p)
          continue;
        std::uint32_t v = varOf(q);
        if (seen[v] || level[v] == 0)
          continue;
        seen[v] = 1;
        toClear.push_back(v);
        bumpVar(v);
        if (level[v] >= decisionLevel())
          ++pathCount;
        else
          learnt.push_back(q);
      }
      while (!seen[varOf(trail[--index])])
        ;
      p = trail[index];
      haveP = true;
      confl = reason[varOf(p)];
      seen[varOf(p)] = 0;
      --pathCount;
    } while (pathCount > 0);
    learnt[0] = neg(p);

    // Drop literals whose reason is subsumed by the clause.
    std::size_t j = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
      CRef r = reason[varOf(learnt[i])];
      bool redundant = r != kNoReason;
      if (redundant)
        for (Lit q : clauses[r].lits) {
          std::uint32_t v = varOf(q);
          if (v != varOf(learnt[i]) && !seen[v] && level[v] > 0) {
            redundant = false;
            break;
          }
        }
      if (!redundant)
        learnt[j++] = learnt[i];
    }
    learnt.resize(j);
    for (auto v : toClear)
      seen[v] = 0;

    if (learnt.size() == 1)
      return 0;
    std::size_t maxI = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level[varOf(learnt[i])] > level[varOf(learnt[maxI])])
        maxI = i;
    std::swap(learnt[1], learnt[maxI]);
    return level[varOf(learnt[1])];
  }

  void cancelUntil(int lvl) {
    if (decisionLevel() <= lvl)
      return;
    for (std::size_t i = trail.size(); i-- > trailLim[lvl];) {
      std::uint32_t v = varOf(trail[i]);
      savedPhase[v] = (trail[i] & 1) ? 0 : 1;
      assigns[v] = kUndef;
      reason[v] = kNoReason;
      heap.insert(v);
    }
    trail.resize(trailLim[lvl]);
    trailLim.resize(lvl);
    qhead = trail.size();
  }

  std::optional<Lit> pickBranch() {
    while (!heap.empty()) {
      std::uint32_t v = heap.pop();
      if (assigns[v] == kUndef)
        return 2 * v + (savedPhase[v] ? 0 : 1);
    }
    return std::nullopt;
  }

  void reduceDb() {
    std::vector<CRef> cands;
    for (CRef cr = 0; cr < clauses.size(); ++cr) {
      const ClauseData &c = clauses[cr];
      if (c.learnt && !c.deleted && c.lbd > cfg.keepLbd)
        cands.push_back(cr);
    }
    std::stable_sort(cands.begin(), cands.end(), [&](CRef a, CRef b) {
      return clauses[a].lbd > clauses[b].lbd;
    });
    for (std::size_t i = 0; i < cands.size() / 2; ++i) {
      clauses[cands[i]].deleted = true;
      clauses[cands[i]].lits.clear();
      clauses[cands[i]].lits.shrink_to_fit();
    }
    for (auto &ws : watches)
      std::erase_if(ws, [&](const Watcher &w) { return clauses[w.cref].deleted; });
  }

  bool outOfTime() const { return deadline && Clock::now() >= *deadline; }

  SolveResult run(std::span<const Literal> assumptionsIn) {
    auto start = Clock::now();
    stats = {};
    deadline.reset();
    if (cfg.timeLimit > 0)
      deadline = start + std::chrono::duration_cast<Clock::duration>(
                             std::chrono::duration<double>(cfg.timeLimit));

    SolveResult result;
    result.status = search(assumptionsIn);
    if (result.status == SolveStatus::Sat) {
      Assignment model(nVars);
      for (std::uint32_t v = 0; v < nVars; ++v)
        model.set(v + 1, assigns[v] == kTrue);
      result.model = std::move(model);
    }
    cancelUntil(0);

    stats.wallTime = std::chrono::duration<double>(Clock::now() - start).count();
    result.stats = stats;
    total.conflicts += stats.conflicts;
    total.decisions += stats.decisions;
    total.propagations += stats.propagations;
    total.restarts += stats.restarts;
    total.learnedClauses += stats.learnedClauses;
    total.wallTime += stats.wallTime;

    if (result.status == SolveStatus::Sat) {
      if (!evaluate(formula, result.model))
        throw std::logic_error("internal error: model does not satisfy formula");
      for (Literal a : assumptionsIn)
        if (!result.model.satisfies(a))
          throw std::logic_error("internal error: model violates assumption");
    }
    return result;
  }

  SolveStatus search(std::span<const Literal> assumptionsIn) {
    std::vector<Lit> assumptions;
    for (Literal a : assumptionsIn) {
      if (a.var == 0 || a.var > nVars)
        throw std::invalid_argument("assumption variable out of range");
      assumptions.push_back(mkLit(a));
    }
    {
      std::vector<Lit> sorted = assumptions;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
        if (sorted[i + 1] == neg(sorted[i]))
          return SolveStatus::Unsat;
    }
    if (!ok)
      return SolveStatus::Unsat;
    if (propagate() != kNoReason) {
      ok = false;
      return SolveStatus::Unsat;
    }

    std::vector<Lit> learnt;
    std::uint64_t restartBudget =
        static_cast<std::uint64_t>(luby(2, restartIndex) * cfg.restartBase);
    std::uint64_t conflictsThisRestart = 0;
    std::uint64_t decisionsSinceCheck = 0;

    for (;;) {
      CRef confl = propagate();
      if (confl != kNoReason) {
        ++stats.conflicts;
        ++totalConflicts;
        ++conflictsThisRestart;
        if (decisionLevel() == 0) {
          ok = false;
          return SolveStatus::Unsat;
        }
        int back = analyze(confl, learnt);
        cancelUntil(back);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          CRef cr = static_cast<CRef>(clauses.size());
          clauses.push_back({learnt, computeLbd(learnt), true, false});
          attach(cr);
          enqueue(learnt[0], cr);
        }
        ++stats.learnedClauses;
        varInc /= cfg.varDecay;

        if (cfg.rephase && totalConflicts >= nextRephase) {
          savedPhase = initialPhase;
          ++rephaseCount;
          nextRephase = totalConflicts + cfg.rephaseInterval * (rephaseCount + 1);
        }
        if (cfg.conflictLimit && stats.conflicts >= *cfg.conflictLimit)
          return SolveStatus::Unknown;
        if (outOfTime())
          return SolveStatus::Unknown;
        continue;
      }

      if (conflictsThisRestart >= restartBudget) {
        cancelUntil(0);
        ++stats.restarts;
        ++restartIndex;
        conflictsThisRestart = 0;
        restartBudget =
            static_cast<std::uint64_t>(luby(2, restartIndex) * cfg.restartBase);
        if (totalConflicts >= nextReduce) {
          reduceDb();
          reduceInterval += cfg.reduceIncrement;
          nextReduce = totalConflicts + reduceInterval;
        }
        continue;
      }

      std::optional<Lit> next;
      while (decisionLevel() < static_cast<int>(assumptions.size())) {
        Lit a = assumptions[decisionLevel()];
        std::int8_t val = value(a);
        if (val == kTrue) {
          trailLim.push_back(trail.size()); // already satisfied: empty level
        } else if (val == kFalse) {
          return SolveStatus::Unsat;
        } else {
          next = a;
          break;
        }
      }
      if (!next) {
        next = pickBranch();
        if (!next)
          return SolveStatus::Sat;
      }
      ++stats.decisions;
      if (++decisionsSinceCheck >= 1024) {
        decisionsSinceCheck = 0;
        if (outOfTime())
          return SolveStatus::Unknown;
      }
      trailLim.push_back(trail.size());
      enqueue(*next, kNoReason);
    }
  }
};

Solver::Solver(const CnfFormula &f, SolverConfig cfg, const PhaseHints *hints)
    : impl_(std::make_unique<Impl>(f, cfg, hints)) {}
Solver::~Solver() = default;
Solver::Solver(Solver &&) noexcept = default;
Solver &Solver::operator=(Solver &&) noexcept = default;

SolveResult Solver::solve(std::span<const Literal> assumptions) {
  return impl_->run(assumptions);
}

void Solver::addClause(std::span<const Literal> clause) {
  impl_->addClause(clause);
}

void Solver::setTimeLimit(double seconds) {
  impl_->cfg.timeLimit = seconds < 0 ? 0 : seconds;
}

std::vector<Clause> Solver::learnedClauses() const {
  std::vector<Clause> out;
  for (const auto &c : impl_->clauses) {
    if (!c.learnt || c.deleted)
      continue;
    Clause cl;
    for (Lit l : c.lits)
      cl.push_back(toLiteral(l));
    out.push_back(std::move(cl));
  }
  return out;
}

std::size_t Solver::ignoredHints() const { return impl_->ignoredHints; }

const SolverStats &Solver::totalStats() const { return impl_->total; }

SolveResult solve(const CnfFormula &f, const SolverConfig &cfg,
                  const PhaseHints *hints) {
  Solver s(f, cfg, hints);
  return s.solve();
}

SolveResult solveWithAssumptions(const CnfFormula &f,
                                 std::span<const Literal> assumptions,
                                 const SolverConfig &cfg) {
  Solver s(f, cfg);
  return s.solve(assumptions);
}

bool checkModel(const CnfFormula &f, const SolveResult &r) {
  if (r.status != SolveStatus::Sat || r.model.numVars() < f.numVars)
    return false;
  return evaluate(f, r.model);
}

} // namespace nbsat

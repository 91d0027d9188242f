#include "nbsat/backbone.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace nbsat {

const char *toString(BackboneStatus s) {
  switch (s) {
  case BackboneStatus::Complete:
    return "COMPLETE";
  case BackboneStatus::Timeout:
    return "TIMEOUT";
  case BackboneStatus::UnsatInput:
    return "UNSAT_INPUT";
  }
  return "?";
}

BackboneStatus backboneStatusFromString(const std::string &s) {
  if (s == "COMPLETE")
    return BackboneStatus::Complete;
  if (s == "TIMEOUT")
    return BackboneStatus::Timeout;
  if (s == "UNSAT_INPUT")
    return BackboneStatus::UnsatInput;
  throw std::invalid_argument("unknown backbone status '" + s + "'");
}

BackboneResult extractBackbone(const CnfFormula &f, double timeoutSeconds,
                               const SolverConfig &cfg) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };
  const bool limited = timeoutSeconds > 0;

  BackboneResult out;
  auto finish = [&](BackboneStatus s) {
    out.status = s;
    if (s != BackboneStatus::Complete)
      out.labeling.clear();
    out.wallTime = elapsed();
    return out;
  };

  SolverConfig scfg = cfg;
  scfg.timeLimit = limited ? timeoutSeconds : 0;
  Solver solver(f, scfg);

  // Candidate phase per variable; -1 once ruled out.
  std::vector<int> candidate(f.numVars + 1, -1);

  ++out.solverCalls;
  SolveResult first = solver.solve();
  if (first.status == SolveStatus::Unsat)
    return finish(BackboneStatus::UnsatInput);
  if (first.status == SolveStatus::Unknown)
    return finish(BackboneStatus::Timeout);
  for (Var v = 1; v <= f.numVars; ++v)
    candidate[v] = first.model.value(v) ? 1 : 0;

  for (Var v = 1; v <= f.numVars; ++v) {
    if (candidate[v] < 0)
      continue;
    if (limited) {
      double remaining = timeoutSeconds - elapsed();
      if (remaining <= 0)
        return finish(BackboneStatus::Timeout);
      solver.setTimeLimit(remaining);
    }
    Literal lit(v, candidate[v] == 0);
    Literal flipped[] = {~lit};
    ++out.solverCalls;
    SolveResult r = solver.solve(flipped);
    if (r.status == SolveStatus::Unknown)
      return finish(BackboneStatus::Timeout);
    if (r.status == SolveStatus::Unsat) {
      out.labeling.emplace(v, candidate[v] == 1);
      Literal unit[] = {lit};
      solver.addClause(unit);
      continue;
    }
    for (Var u = v; u <= f.numVars; ++u)
      if (candidate[u] >= 0 && r.model.value(u) != (candidate[u] == 1))
        candidate[u] = -1;
  }
  return finish(BackboneStatus::Complete);
}

bool isBackboneLiteral(const CnfFormula &f, Literal l, const SolverConfig &cfg) {
  if (l.var == 0 || l.var > f.numVars)
    throw std::invalid_argument("literal variable outside formula");
  Solver solver(f, cfg);
  if (solver.solve().status != SolveStatus::Sat)
    throw std::invalid_argument("backbone query on an unsatisfiable formula");
  Literal negated[] = {~l};
  return solver.solve(negated).status == SolveStatus::Unsat;
}

std::string writeBackbone(const BackboneResult &r) {
  std::string out = "NBB 1 ";
  out += toString(r.status);
  out += '\n';
  if (r.status == BackboneStatus::Complete)
    for (auto [v, phase] : r.labeling)
      out += std::to_string(v) + (phase ? " 1\n" : " 0\n");
  return out;
}

BackboneResult parseBackbone(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineNo = 1;
  auto fail = [&](const std::string &what) -> BackboneResult {
    throw std::runtime_error("backbone line " + std::to_string(lineNo) + ": " +
                             what);
  };
  BackboneResult r;
  if (!std::getline(in, line))
    fail("empty backbone file");
  {
    std::istringstream hs(line);
    std::string magic, status, extra;
    int version = 0;
    if (!(hs >> magic >> version >> status) || magic != "NBB" || (hs >> extra))
      fail("expected 'NBB 1 <status>' header");
    if (version != 1)
      fail("unsupported backbone format version " + std::to_string(version));
    try {
      r.status = backboneStatusFromString(status);
    } catch (const std::invalid_argument &e) {
      fail(e.what());
    }
  }
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    if (r.status != BackboneStatus::Complete)
      fail("labels present for a non-COMPLETE result");
    std::istringstream ls(line);
    long long v = 0;
    int phase = -1;
    std::string extra;
    if (!(ls >> v >> phase) || (ls >> extra) || v < 1 ||
        (phase != 0 && phase != 1))
      fail("expected '<var> <phase>'");
    if (!r.labeling.emplace(static_cast<Var>(v), phase == 1).second)
      fail("duplicate variable " + std::to_string(v));
  }
  return r;
}

BackboneResult readBackboneFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseBackbone(ss.str());
}

} // namespace nbsat

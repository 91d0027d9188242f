#pragma once

#include "nbsat/cnf.hpp"
#include "nbsat/solver.hpp"

#include <string>
#include <string_view>

namespace nbsat {

enum class BackboneStatus { Complete, Timeout, UnsatInput };
const char *toString(BackboneStatus s);
BackboneStatus backboneStatusFromString(const std::string &s);

struct BackboneResult {
  BackboneStatus status = BackboneStatus::Timeout;
  BackboneLabeling labeling; // empty unless Complete
  std::size_t solverCalls = 0;
  double wallTime = 0;
};

/// Exact backbone by iterative model-intersection filtering: one solve for a
/// first model, then one assumption solve per surviving candidate, in
/// ascending variable order. Uses at most numVars + 1 solver calls.
/// `timeoutSeconds <= 0` disables the limit.
BackboneResult extractBackbone(const CnfFormula &f, double timeoutSeconds,
                               const SolverConfig &cfg = {});

/// True iff `l` holds in every model of f. Throws std::invalid_argument when f
/// is unsatisfiable.
bool isBackboneLiteral(const CnfFormula &f, Literal l,
                       const SolverConfig &cfg = {});

/// "NBB 1" file: header `NBB 1 <status>`, then `<var> <phase>` per backbone
/// variable when the status is COMPLETE.
std::string writeBackbone(const BackboneResult &r);
BackboneResult parseBackbone(std::string_view text);
BackboneResult readBackboneFile(const std::string &path);

} // namespace nbsat

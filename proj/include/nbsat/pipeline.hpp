#pragma once

#include "nbsat/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace nbsat {

/// Inputs for parse -> encode -> predict -> solve on one formula.
struct PipelineConfig {
  std::filesystem::path cnf;
  std::optional<std::filesystem::path> checkpoint;
  /// Model front end; invoked as
  /// `<predictor> predict --ckpt <ckpt> --graph <nbg> -o <nbh>`.
  std::string predictor = "nbsat-model";
  /// Where the graph and hint sidecars go; defaults to the cnf's directory.
  std::optional<std::filesystem::path> workDir;
  SolverConfig solver;
};

struct PipelineResult {
  SolveResult result;
  bool fellBack = false;
  std::string fallbackReason;
  std::size_t inferenceCalls = 0;
  double inferenceTime = 0;
  std::filesystem::path graphPath;
  std::filesystem::path hintsPath;
};

/// Error raised by one pipeline stage ("parse", "encode", "solve").
class PipelineError : public std::runtime_error {
public:
  PipelineError(std::string stage, const std::string &what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string &stage() const { return stage_; }

private:
  std::string stage_;
};

/// Runs the model once before solving and seeds the solver's phases with its
/// predictions. A missing checkpoint or failed inference falls back to a
/// baseline solve and sets `fellBack`.
PipelineResult pipelineSolve(const PipelineConfig &cfg);

} // namespace nbsat

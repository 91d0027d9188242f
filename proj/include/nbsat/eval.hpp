#pragma once

#include "nbsat/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nbsat {

/// One solver configuration in an experiment. When phaseDefault is Hints the
/// hints for problem `dir/x.cnf` are read from `hintsDir/x.nbh`, produced
/// first by `predictCommand` when one is given.
struct ExperimentConfig {
  std::string name;
  SolverConfig solver;
  std::optional<std::filesystem::path> hintsDir;
  /// Shell template; `{graph}` and `{out}` are replaced by the encoded graph
  /// path and the hint file to produce.
  std::string predictCommand;
};

/// Reads `{"configs": [{"name": ..., "phase_default": ..., ...}]}`. Relative
/// hint directories resolve against the file's directory.
std::vector<ExperimentConfig> readExperimentConfigs(const std::filesystem::path &path);

struct RunRecord {
  std::string problem;
  std::string config;
  SolveStatus status = SolveStatus::Unknown;
  double wallTime = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  double inferenceTime = 0;
  /// Hints were configured but unavailable; ran as baseline.
  bool reverted = false;

  bool solved() const { return status != SolveStatus::Unknown; }
};

/// Every (problem, config) pair, ordered by problem path then config order.
std::vector<RunRecord> runExperiment(const std::filesystem::path &problems,
                                     const std::vector<ExperimentConfig> &configs,
                                     double timeLimit, unsigned workers);

std::string writeResultsCsv(const std::vector<RunRecord> &records);
std::vector<RunRecord> parseResultsCsv(std::string_view text);
std::vector<RunRecord> readResultsCsv(const std::filesystem::path &path);

struct CactusPoint {
  std::size_t solved;
  double time;
  friend bool operator==(const CactusPoint &, const CactusPoint &) = default;
};

/// Solved-instance times of one config sorted ascending with running count.
std::vector<CactusPoint> cactusData(const std::vector<RunRecord> &records,
                                    const std::string &config);

struct ScatterPoint {
  std::string problem;
  double timeA;
  double timeB;
  friend bool operator==(const ScatterPoint &, const ScatterPoint &) = default;
};

/// Per-problem time pairs with failures mapped to the time limit. Throws
/// std::invalid_argument if the configs ran different problem sets.
std::vector<ScatterPoint> scatterData(const std::vector<RunRecord> &records,
                                      const std::string &configA,
                                      const std::string &configB,
                                      double timeLimit);

struct SummaryReport {
  std::size_t compared = 0; // problems in the delta analysis
  std::size_t excludedReverted = 0;
  std::size_t solvedA = 0;
  std::size_t solvedB = 0;
  long long solvedDelta = 0;   // solvedA - solvedB
  double solvedDeltaPercent = 0; // relative to solvedB
  std::size_t onlyA = 0;       // solved by A, not B
  std::size_t onlyB = 0;
  std::size_t fasterA = 0; // strictly faster, failures at the limit
  std::size_t fasterB = 0;
  double meanSaving = 0; // mean of timeB - timeA, failures at the limit
  double meanSavingBothSolved = 0;
  double par2A = 0;
  double par2B = 0;
};

SummaryReport summarize(const std::vector<RunRecord> &records,
                        const std::string &configA, const std::string &configB,
                        double timeLimit);

/// Penalized average runtime: unsolved runs count as 2 * timeLimit.
double par2(const std::vector<RunRecord> &records, const std::string &config,
            double timeLimit);

} // namespace nbsat

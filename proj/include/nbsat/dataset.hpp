#pragma once

#include "nbsat/cnf.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nbsat {

enum class EntryStatus { Accepted, UnsatInput, Timeout, ZeroBackbone, ParseError };
const char *toString(EntryStatus s);
EntryStatus entryStatusFromString(const std::string &s);

enum class Split { Pretrain, Finetune };
const char *toString(Split s);
Split splitFromString(const std::string &s);

struct ManifestEntry {
  std::string source; // relative to the corpus directory, '/' separated
  EntryStatus status = EntryStatus::ParseError;
  std::uint64_t numVars = 0;
  std::uint64_t numClauses = 0;
  std::uint64_t numBackbone = 0;
  std::string originalGraph; // relative to the output directory; empty if rejected
  std::string dualGraph;

  friend bool operator==(const ManifestEntry &, const ManifestEntry &) = default;
};

/// Build record. Text form ("NBM 1"):
///
///   NBM 1
///   m <split> <timeout>
///   r <status> <vars> <clauses> <backbone> <original|-> <dual|-> <source>
///
/// one `r` line per corpus file sorted by source path; the source path runs
/// to the end of the line.
struct DatasetManifest {
  Split split = Split::Pretrain;
  double timeout = 0;
  std::vector<ManifestEntry> entries;

  friend bool operator==(const DatasetManifest &, const DatasetManifest &) = default;
};

std::string writeManifest(const DatasetManifest &m);
DatasetManifest parseManifest(std::string_view text);
DatasetManifest readManifestFile(const std::filesystem::path &path);

struct BuildOptions {
  double timeout = 10;
  Split split = Split::Pretrain;
  unsigned workers = 0; // 0 = hardware concurrency
};

inline constexpr const char *kManifestName = "manifest.nbm";

/// Labels every DIMACS file (*.cnf, *.dimacs) under corpusDir, keeps those
/// with a complete non-empty backbone, and writes the original and dual
/// labeled graphs plus `manifest.nbm` into outDir.
DatasetManifest buildDataset(const std::filesystem::path &corpusDir,
                             const std::filesystem::path &outDir,
                             const BuildOptions &opts);

struct DatasetStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t numCnf = 0; // after augmentation
  double meanVars = 0;
  double meanClauses = 0;
  double meanBackbone = 0;
  double backboneProportion = 0; // total backbone / total variables
  std::size_t positiveLabels = 0;
  std::size_t negativeLabels = 0;
  double labelBalance = 0; // positive / all labels
};

/// Summarizes accepted entries; label counts come from the graph files under
/// graphRoot. Throws std::invalid_argument when nothing was accepted.
DatasetStats datasetStats(const DatasetManifest &m,
                          const std::filesystem::path &graphRoot);

//===----------------------------------------------------------------------===//
// Synthetic corpora
//===----------------------------------------------------------------------===//

/// m clauses over k distinct variables each with uniform polarities.
CnfFormula genRandomKSat(Var n, std::size_t m, std::uint32_t k,
                         std::uint64_t seed);

/// Pigeons into holes: every pigeon in some hole, no two pigeons share one.
/// Variable (p, h) is p * holes + h + 1.
CnfFormula genPigeonhole(std::uint32_t pigeons, std::uint32_t holes);

/// k-coloring of a G(n, p) random graph. Vertex 0 is fixed to color 0 to
/// remove the color-permutation symmetry. Variable (v, c) is v * k + c + 1.
CnfFormula genColoring(std::uint32_t vertices, double edgeProbability,
                       std::uint32_t colors, std::uint64_t seed);

} // namespace nbsat

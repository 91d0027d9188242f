#pragma once

#include "nbsat/cnf.hpp"
#include "nbsat/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

namespace nbsat::fixtures {

/// (v1 ∨ ¬v2) ∧ (v2 ∨ v3) ∧ (v2); backbone {v1:1, v2:1}.
inline CnfFormula phi() { return parseDimacs("p cnf 3 3\n1 -2 0\n2 3 0\n2 0\n"); }

/// (v1 ∨ v2) ∧ (v2 ∨ v3) ∧ (v3 ∨ v4): the meta-node diameter example.
inline CnfFormula chain4() {
  return parseDimacs("p cnf 4 3\n1 2 0\n2 3 0\n3 4 0\n");
}

inline CnfFormula contradiction() { return parseDimacs("p cnf 1 2\n1 0\n-1 0\n"); }

/// Random 3-SAT with n drawn from [minVars, maxVars] and clause/variable ratio
/// from [minRatio, maxRatio].
inline CnfFormula random3Sat(std::uint64_t seed, unsigned minVars,
                             unsigned maxVars, double minRatio = 3.5,
                             double maxRatio = 5.0) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 17);
  unsigned n = minVars + static_cast<unsigned>(rng() % (maxVars - minVars + 1));
  double ratio = minRatio + (maxRatio - minRatio) *
                                (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  auto m = static_cast<std::size_t>(ratio * n + 0.5);
  return genRandomKSat(n, m, 3, seed);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratchDir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("nbsat_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void writeFile(const std::filesystem::path &p, const std::string &text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string readFile(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace nbsat::fixtures

#include "nbsat/pipeline.hpp"
#include "nbsat/graph.hpp"
#include "shell.hpp"

#include <chrono>
#include <cstdlib>

namespace fs = std::filesystem;

namespace nbsat {

using detail::shellQuote;

PipelineResult pipelineSolve(const PipelineConfig &cfg) {
  PipelineResult out;

  CnfFormula f;
  try {
    f = readDimacsFile(cfg.cnf.string());
  } catch (const std::exception &e) {
    throw PipelineError("parse", e.what());
  }

  const fs::path dir = cfg.workDir ? *cfg.workDir : cfg.cnf.parent_path();
  const std::string stem = cfg.cnf.stem().string();
  out.graphPath = dir / (stem + ".nbg");
  out.hintsPath = dir / (stem + ".nbh");
  try {
    fs::create_directories(dir.empty() ? fs::path(".") : dir);
    writeGraphFile(out.graphPath.string(), encode(f));
  } catch (const std::exception &e) {
    throw PipelineError("encode", e.what());
  }

  std::optional<PhaseHints> hints;
  if (!cfg.checkpoint || !fs::exists(*cfg.checkpoint)) {
    out.fellBack = true;
    out.fallbackReason = "checkpoint not found";
  } else {
    fs::remove(out.hintsPath);
    const std::string cmd = cfg.predictor + " predict --ckpt " +
                            shellQuote(cfg.checkpoint->string()) + " --graph " +
                            shellQuote(out.graphPath.string()) + " -o " +
                            shellQuote(out.hintsPath.string());
    const auto t0 = std::chrono::steady_clock::now();
    ++out.inferenceCalls;
    const int rc = std::system(cmd.c_str());
    out.inferenceTime = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    if (rc != 0) {
      out.fellBack = true;
      out.fallbackReason = "inference exited with status " + std::to_string(rc);
    } else {
      try {
        hints = readHintsFile(out.hintsPath.string());
      } catch (const HintError &e) {
        out.fellBack = true;
        out.fallbackReason = std::string("unusable hints: ") + e.what();
      }
    }
  }

  SolverConfig scfg = cfg.solver;
  scfg.phaseDefault = hints ? PhaseDefault::Hints : PhaseDefault::False;
  try {
    out.result = solve(f, scfg, hints ? &*hints : nullptr);
  } catch (const std::exception &e) {
    throw PipelineError("solve", e.what());
  }
  return out;
}

} // namespace nbsat

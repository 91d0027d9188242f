// nbsat: CDCL solving with phase hints, backbone labeling, graph encoding,
// dataset construction and solver comparison.

#include "nbsat/backbone.hpp"
#include "nbsat/cnf.hpp"
#include "nbsat/dataset.hpp"
#include "nbsat/eval.hpp"
#include "nbsat/graph.hpp"
#include "nbsat/pipeline.hpp"
#include "nbsat/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nbsat;

namespace {

constexpr const char *kVersion = "nbsat 1.0.0";

int exitCode(SolveStatus s) {
  switch (s) {
  case SolveStatus::Sat:
    return 10;
  case SolveStatus::Unsat:
    return 20;
  case SolveStatus::Unknown:
    return 0;
  }
  return 0;
}

json statsJson(const SolverStats &s) {
  return {{"conflicts", s.conflicts},       {"decisions", s.decisions},
          {"propagations", s.propagations}, {"restarts", s.restarts},
          {"learned_clauses", s.learnedClauses}, {"wall_time", s.wallTime}};
}

json resultJson(const SolveResult &r) {
  json j{{"status", toString(r.status)}, {"stats", statsJson(r.stats)}};
  if (r.status == SolveStatus::Sat) {
    std::vector<int> model;
    for (Var v = 1; v <= r.model.numVars(); ++v)
      model.push_back(r.model.value(v) ? static_cast<int>(v) : -static_cast<int>(v));
    j["model"] = model;
  }
  return j;
}

void printResult(const SolveResult &r) {
  const SolverStats &s = r.stats;
  std::cout << "c conflicts " << s.conflicts << "\nc decisions " << s.decisions
            << "\nc propagations " << s.propagations << "\nc restarts "
            << s.restarts << "\nc learned " << s.learnedClauses
            << "\nc wall-time " << s.wallTime << '\n';
  switch (r.status) {
  case SolveStatus::Sat: {
    std::cout << "s SATISFIABLE\nv";
    for (Var v = 1; v <= r.model.numVars(); ++v)
      std::cout << ' ' << (r.model.value(v) ? "" : "-") << v;
    std::cout << " 0\n";
    break;
  }
  case SolveStatus::Unsat:
    std::cout << "s UNSATISFIABLE\n";
    break;
  case SolveStatus::Unknown:
    std::cout << "s UNKNOWN\n";
    break;
  }
}

void writeText(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
}

CnfFormula loadCnf(const std::string &path) {
  std::vector<std::string> warnings;
  CnfFormula f = readDimacsFile(path, &warnings);
  for (auto &w : warnings)
    std::cerr << "c warning: " << path << ": " << w << '\n';
  return f;
}

/// Solver flags shared by `solve` and `pipeline`.
struct SolverFlags {
  std::uint64_t seed = 0;
  double timeLimit = 0;
  std::uint64_t conflictLimit = 0;
  std::string phaseDefault;
  bool noRephase = false;

  void add(CLI::App *app) {
    app->add_option("--seed", seed, "Solver seed");
    app->add_option("--time-limit", timeLimit, "Seconds (0 = unlimited)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--conflict-limit", conflictLimit, "Conflicts (0 = unlimited)");
    app->add_option("--phase-default", phaseDefault, "false|true|hints")
        ->check(CLI::IsMember({"false", "true", "hints"}));
    app->add_flag("--no-rephase", noRephase, "Disable rephasing");
  }

  SolverConfig config(bool haveHints) const {
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.timeLimit = timeLimit;
    if (conflictLimit)
      cfg.conflictLimit = conflictLimit;
    cfg.rephase = !noRephase;
    if (!phaseDefault.empty())
      cfg.phaseDefault = phaseDefaultFromString(phaseDefault);
    else if (haveHints)
      cfg.phaseDefault = PhaseDefault::Hints;
    return cfg;
  }
};

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"SAT toolkit: CDCL with phase hints, backbones, graph encoding"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // solve
  auto *solveCmd = app.add_subcommand("solve", "Solve a DIMACS CNF formula");
  std::string solveFile, hintsFile, statsJsonPath;
  bool solveJson = false;
  SolverFlags solveFlags;
  solveCmd->add_option("file", solveFile, "CNF file")->required()->check(CLI::ExistingFile);
  solveCmd->add_option("--hints", hintsFile, "NBH 1 phase hints")->check(CLI::ExistingFile);
  solveCmd->add_option("--stats-json", statsJsonPath, "Write statistics as JSON");
  solveCmd->add_flag("--json", solveJson, "Print the result as JSON");
  solveFlags.add(solveCmd);

  // backbone
  auto *bbCmd = app.add_subcommand("backbone", "Compute the exact backbone");
  std::string bbFile, bbOut;
  double bbTimeout = 10;
  bool bbJson = false;
  bbCmd->add_option("file", bbFile, "CNF file")->required()->check(CLI::ExistingFile);
  bbCmd->add_option("--timeout", bbTimeout, "Seconds (0 = unlimited)")
      ->check(CLI::NonNegativeNumber);
  bbCmd->add_option("-o,--output", bbOut, "NBB 1 output file");
  bbCmd->add_flag("--json", bbJson, "Print the result as JSON");

  // encode
  auto *encCmd = app.add_subcommand("encode", "Encode a formula as an NBG 1 graph");
  std::string encFile, encOut, encLabels;
  bool encJson = false;
  encCmd->add_option("file", encFile, "CNF file")->required()->check(CLI::ExistingFile);
  encCmd->add_option("-o,--output", encOut, "NBG 1 output file")->required();
  encCmd->add_option("--labels", encLabels, "NBB 1 backbone labels")
      ->check(CLI::ExistingFile);
  encCmd->add_flag("--json", encJson, "Print a JSON summary");

  // dataset
  auto *dsCmd = app.add_subcommand("dataset", "Build labeled graph datasets");
  dsCmd->require_subcommand(1);
  auto *dsBuild = dsCmd->add_subcommand("build", "Label and encode a corpus");
  std::string corpusDir, dsOut, dsSplit = "pretrain";
  double dsTimeout = 10;
  unsigned dsWorkers = 0;
  bool dsJson = false;
  dsBuild->add_option("corpus", corpusDir, "Directory of DIMACS files")
      ->required()->check(CLI::ExistingDirectory);
  dsBuild->add_option("--timeout", dsTimeout, "Backbone timeout per formula (s)")
      ->check(CLI::NonNegativeNumber);
  dsBuild->add_option("--split", dsSplit, "pretrain|finetune")
      ->check(CLI::IsMember({"pretrain", "finetune"}));
  dsBuild->add_option("--workers", dsWorkers, "Worker threads (0 = all cores)");
  dsBuild->add_option("-o,--output", dsOut, "Output directory")->required();
  dsBuild->add_flag("--json", dsJson, "Print a JSON summary");

  auto *dsStats = dsCmd->add_subcommand("stats", "Summarize a manifest");
  std::string manifestPath;
  bool statsJsonFlag = false;
  dsStats->add_option("manifest", manifestPath, "manifest.nbm")
      ->required()->check(CLI::ExistingFile);
  dsStats->add_flag("--json", statsJsonFlag, "Print as JSON");

  auto *dsGen = dsCmd->add_subcommand("gen", "Generate a synthetic corpus");
  std::string genKind, genOut;
  std::uint32_t genN = 20, genK = 0, genCount = 1;
  std::size_t genM = 0;
  std::uint64_t genSeed = 1;
  double genP = 0.3;
  bool genJson = false;
  dsGen->add_option("--kind", genKind, "ksat|php|color")
      ->required()->check(CLI::IsMember({"ksat", "php", "color"}));
  dsGen->add_option("--n", genN, "Variables (ksat), pigeons (php) or vertices (color)");
  dsGen->add_option("--m", genM, "Clauses for ksat (default round(4.26 n))");
  dsGen->add_option("--k", genK, "Clause width (ksat, 3), holes (php, n-1), colors (color, 3)");
  dsGen->add_option("--p", genP, "Edge probability (color)");
  dsGen->add_option("--seed", genSeed, "First seed");
  dsGen->add_option("--count", genCount, "Number of formulas (consecutive seeds)");
  dsGen->add_option("-o,--output", genOut, "Output directory")->required();
  dsGen->add_flag("--json", genJson, "Print written files as JSON");

  // eval
  auto *evCmd = app.add_subcommand("eval", "Compare solver configurations");
  evCmd->require_subcommand(1);
  auto *evRun = evCmd->add_subcommand("run", "Run every config on every problem");
  std::string evProblems, evConfig, evOut;
  double evLimit = 10;
  unsigned evWorkers = 0;
  bool evRunJson = false;
  evRun->add_option("--problems", evProblems, "Problem directory")
      ->required()->check(CLI::ExistingDirectory);
  evRun->add_option("--config", evConfig, "JSON config list")
      ->required()->check(CLI::ExistingFile);
  evRun->add_option("--time-limit", evLimit, "Seconds per run")
      ->check(CLI::PositiveNumber);
  evRun->add_option("--workers", evWorkers, "Parallel runs (0 = all cores)");
  evRun->add_option("-o,--output", evOut, "results.csv")->required();
  evRun->add_flag("--json", evRunJson, "Print records as JSON");

  std::string resultsPath, cfgA, cfgB;
  double anaLimit = 10;
  bool anaJson = false;
  auto *evCactus = evCmd->add_subcommand("cactus", "Cactus series for one config");
  evCactus->add_option("results", resultsPath, "results.csv")
      ->required()->check(CLI::ExistingFile);
  evCactus->add_option("--config", cfgA, "Config name")->required();
  evCactus->add_flag("--json", anaJson, "Print as JSON");

  auto *evScatter = evCmd->add_subcommand("scatter", "Paired times of two configs");
  auto *evSummary = evCmd->add_subcommand("summary", "Delta report for two configs");
  for (auto *sub : {evScatter, evSummary}) {
    sub->add_option("results", resultsPath, "results.csv")
        ->required()->check(CLI::ExistingFile);
    sub->add_option("--a", cfgA, "First config")->required();
    sub->add_option("--b", cfgB, "Second config")->required();
    sub->add_option("--time-limit", anaLimit, "Limit used for the runs")
        ->required()->check(CLI::PositiveNumber);
    sub->add_flag("--json", anaJson, "Print as JSON");
  }

  // pipeline
  auto *plCmd = app.add_subcommand("pipeline", "Encode, predict once, then solve with hints");
  std::string plFile, plCkpt, plPredictor = "nbsat-model", plWork;
  bool plJson = false;
  SolverFlags plFlags;
  plCmd->add_option("file", plFile, "CNF file")->required()->check(CLI::ExistingFile);
  plCmd->add_option("--ckpt", plCkpt, "Model checkpoint");
  plCmd->add_option("--predictor", plPredictor, "Model command (receives 'predict ...')");
  plCmd->add_option("--work-dir", plWork, "Directory for graph/hint sidecars");
  plCmd->add_flag("--json", plJson, "Print the result as JSON");
  plFlags.add(plCmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solveCmd) {
      CnfFormula f = loadCnf(solveFile);
      std::optional<PhaseHints> hints;
      if (!hintsFile.empty())
        hints = readHintsFile(hintsFile);
      SolverConfig cfg = solveFlags.config(hints.has_value());
      Solver solver(f, cfg, hints ? &*hints : nullptr);
      if (solver.ignoredHints())
        std::cerr << "c warning: ignored " << solver.ignoredHints()
                  << " hints for variables beyond " << f.numVars << '\n';
      SolveResult r = solver.solve();
      if (!statsJsonPath.empty())
        writeText(statsJsonPath, statsJson(r.stats).dump(2) + "\n");
      if (solveJson)
        std::cout << resultJson(r).dump() << '\n';
      else
        printResult(r);
      return exitCode(r.status);
    }

    if (*bbCmd) {
      CnfFormula f = loadCnf(bbFile);
      BackboneResult r = extractBackbone(f, bbTimeout);
      if (!bbOut.empty())
        writeText(bbOut, writeBackbone(r));
      if (bbJson) {
        json labels = json::object();
        for (auto [v, phase] : r.labeling)
          labels[std::to_string(v)] = phase ? 1 : 0;
        std::cout << json{{"status", toString(r.status)},
                          {"backbone", labels},
                          {"solver_calls", r.solverCalls},
                          {"wall_time", r.wallTime}}
                         .dump()
                  << '\n';
      } else {
        std::cout << "c solver calls " << r.solverCalls << "\nc wall-time "
                  << r.wallTime << '\n'
                  << writeBackbone(r);
      }
      return 0;
    }

    if (*encCmd) {
      CnfFormula f = loadCnf(encFile);
      SatGraph g = encode(f);
      std::optional<BackboneLabeling> labels;
      if (!encLabels.empty()) {
        BackboneResult bb = readBackboneFile(encLabels);
        if (bb.status != BackboneStatus::Complete)
          throw std::runtime_error("label file status is " +
                                   std::string(toString(bb.status)));
        labels = bb.labeling;
      }
      writeGraphFile(encOut, g, labels);
      std::size_t maxDiameter = 0;
      for (std::size_t c = 0; c < g.componentCount; ++c)
        maxDiameter = std::max(maxDiameter, diameter(g, c));
      if (encJson)
        std::cout << json{{"nodes", g.nodes.size()},
                          {"edges", g.edges.size()},
                          {"components", g.componentCount},
                          {"max_diameter", maxDiameter},
                          {"labels", labels ? labels->size() : 0}}
                         .dump()
                  << '\n';
      else
        std::cout << "c nodes " << g.nodes.size() << "\nc edges "
                  << g.edges.size() << "\nc components " << g.componentCount
                  << "\nc max-diameter " << maxDiameter << '\n';
      return 0;
    }

    if (*dsBuild) {
      BuildOptions opts;
      opts.timeout = dsTimeout;
      opts.split = splitFromString(dsSplit);
      opts.workers = dsWorkers;
      DatasetManifest m = buildDataset(corpusDir, dsOut, opts);
      std::size_t accepted = 0;
      std::map<std::string, std::size_t> byStatus;
      for (auto &e : m.entries) {
        ++byStatus[toString(e.status)];
        accepted += e.status == EntryStatus::Accepted;
      }
      if (dsJson) {
        std::cout << json{{"manifest", (fs::path(dsOut) / kManifestName).string()},
                          {"entries", m.entries.size()},
                          {"by_status", byStatus},
                          {"graphs", 2 * accepted}}
                         .dump()
                  << '\n';
      } else {
        std::cout << "c manifest " << (fs::path(dsOut) / kManifestName).string()
                  << '\n';
        for (auto &[status, n] : byStatus)
          std::cout << "c " << status << ' ' << n << '\n';
        std::cout << "c graphs " << 2 * accepted << '\n';
      }
      return 0;
    }

    if (*dsStats) {
      DatasetManifest m = readManifestFile(manifestPath);
      DatasetStats s = datasetStats(m, fs::path(manifestPath).parent_path());
      if (statsJsonFlag) {
        std::cout << json{{"split", toString(m.split)},
                          {"accepted", s.accepted},
                          {"rejected", s.rejected},
                          {"num_cnf", s.numCnf},
                          {"mean_vars", s.meanVars},
                          {"mean_clauses", s.meanClauses},
                          {"mean_backbone", s.meanBackbone},
                          {"backbone_proportion", s.backboneProportion},
                          {"positive_labels", s.positiveLabels},
                          {"negative_labels", s.negativeLabels},
                          {"label_balance", s.labelBalance}}
                         .dump()
                  << '\n';
      } else {
        std::cout << "# CNF          " << s.numCnf << " (" << s.accepted
                  << " accepted, " << s.rejected << " rejected)\n"
                  << "# Var          " << s.meanVars << '\n'
                  << "# Cla          " << s.meanClauses << '\n'
                  << "# BackboneVar  " << s.meanBackbone << " ("
                  << std::lround(100 * s.backboneProportion) << "%)\n"
                  << "label balance  " << s.labelBalance << '\n';
      }
      return 0;
    }

    if (*dsGen) {
      fs::create_directories(genOut);
      json written = json::array();
      for (std::uint32_t i = 0; i < genCount; ++i) {
        const std::uint64_t seed = genSeed + i;
        CnfFormula f;
        std::string name;
        if (genKind == "ksat") {
          std::size_t m = genM ? genM : static_cast<std::size_t>(std::lround(4.26 * genN));
          f = genRandomKSat(genN, m, genK ? genK : 3, seed);
          name = "ksat_n" + std::to_string(genN) + "_m" + std::to_string(m) +
                 "_s" + std::to_string(seed);
        } else if (genKind == "php") {
          std::uint32_t holes = genK ? genK : (genN > 1 ? genN - 1 : 1);
          f = genPigeonhole(genN, holes);
          name = "php_p" + std::to_string(genN) + "_h" + std::to_string(holes);
        } else {
          f = genColoring(genN, genP, genK ? genK : 3, seed);
          name = "color_n" + std::to_string(genN) + "_s" + std::to_string(seed);
        }
        fs::path out = fs::path(genOut) / (name + ".cnf");
        writeText(out, writeDimacs(f));
        written.push_back(out.string());
        if (genKind == "php")
          break; // deterministic; one file regardless of --count
      }
      if (genJson)
        std::cout << written.dump() << '\n';
      else
        for (auto &p : written)
          std::cout << p.get<std::string>() << '\n';
      return 0;
    }

    if (*evRun) {
      auto configs = readExperimentConfigs(evConfig);
      auto records = runExperiment(evProblems, configs, evLimit, evWorkers);
      writeText(evOut, writeResultsCsv(records));
      if (evRunJson) {
        json arr = json::array();
        for (auto &r : records)
          arr.push_back({{"problem", r.problem},
                         {"config", r.config},
                         {"status", toString(r.status)},
                         {"wall_time", r.wallTime},
                         {"conflicts", r.conflicts},
                         {"reverted", r.reverted}});
        std::cout << arr.dump() << '\n';
      } else {
        std::cout << "c wrote " << records.size() << " records to " << evOut
                  << '\n';
      }
      return 0;
    }

    if (*evCactus) {
      auto series = cactusData(readResultsCsv(resultsPath), cfgA);
      if (anaJson) {
        json arr = json::array();
        for (auto &p : series)
          arr.push_back({p.solved, p.time});
        std::cout << arr.dump() << '\n';
      } else {
        std::cout << "k,t\n";
        for (auto &p : series)
          std::cout << p.solved << ',' << p.time << '\n';
      }
      return 0;
    }

    if (*evScatter) {
      auto points = scatterData(readResultsCsv(resultsPath), cfgA, cfgB, anaLimit);
      if (anaJson) {
        json arr = json::array();
        for (auto &p : points)
          arr.push_back({{"problem", p.problem}, {"a", p.timeA}, {"b", p.timeB}});
        std::cout << arr.dump() << '\n';
      } else {
        std::cout << "problem,t_a,t_b\n";
        for (auto &p : points)
          std::cout << p.problem << ',' << p.timeA << ',' << p.timeB << '\n';
      }
      return 0;
    }

    if (*evSummary) {
      SummaryReport s = summarize(readResultsCsv(resultsPath), cfgA, cfgB, anaLimit);
      json j{{"compared", s.compared},
             {"excluded_reverted", s.excludedReverted},
             {"solved_a", s.solvedA},
             {"solved_b", s.solvedB},
             {"solved_delta", s.solvedDelta},
             {"solved_delta_percent", s.solvedDeltaPercent},
             {"only_a", s.onlyA},
             {"only_b", s.onlyB},
             {"faster_a", s.fasterA},
             {"faster_b", s.fasterB},
             {"mean_saving", s.meanSaving},
             {"mean_saving_both_solved", s.meanSavingBothSolved},
             {"par2_a", s.par2A},
             {"par2_b", s.par2B}};
      if (anaJson)
        std::cout << j.dump() << '\n';
      else
        for (auto &[k, v] : j.items())
          std::cout << k << ' ' << v.dump() << '\n';
      return 0;
    }

    if (*plCmd) {
      PipelineConfig cfg;
      cfg.cnf = plFile;
      if (!plCkpt.empty())
        cfg.checkpoint = plCkpt;
      cfg.predictor = plPredictor;
      if (!plWork.empty())
        cfg.workDir = plWork;
      cfg.solver = plFlags.config(true);
      PipelineResult r = pipelineSolve(cfg);
      if (r.fellBack)
        std::cerr << "c fallback to baseline: " << r.fallbackReason << '\n';
      if (plJson) {
        json j = resultJson(r.result);
        j["fell_back"] = r.fellBack;
        j["fallback_reason"] = r.fallbackReason;
        j["inference_calls"] = r.inferenceCalls;
        j["inference_time"] = r.inferenceTime;
        std::cout << j.dump() << '\n';
      } else {
        std::cout << "c inference-calls " << r.inferenceCalls
                  << "\nc inference-time " << r.inferenceTime << '\n';
        printResult(r.result);
      }
      return exitCode(r.result.status);
    }
  } catch (const PipelineError &e) {
    std::cerr << "nbsat: pipeline stage " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "nbsat: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

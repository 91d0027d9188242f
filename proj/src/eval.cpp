#include "nbsat/eval.hpp"
#include "nbsat/graph.hpp"
#include "shell.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#if defined(__linux__)
#include <pthread.h>
#include <sched.h>
#endif

namespace fs = std::filesystem;

namespace nbsat {

using detail::shellQuote;

namespace {

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string replaceAll(std::string s, const std::string &from,
                       const std::string &to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos;
       pos += to.size())
    s.replace(pos, from.size(), to);
  return s;
}

void pinToCore(unsigned core) {
#if defined(__linux__)
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(core, &set);
  pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
#else
  (void)core;
#endif
}

} // namespace

std::vector<ExperimentConfig> readExperimentConfigs(const fs::path &path) {
  using nlohmann::json;
  json doc = json::parse(slurp(path));
  const fs::path base = path.parent_path();
  std::vector<ExperimentConfig> out;
  std::set<std::string> names;
  for (const json &j : doc.at("configs")) {
    ExperimentConfig c;
    c.name = j.at("name").get<std::string>();
    if (c.name.empty() || c.name.find_first_of(",\n") != std::string::npos)
      throw std::invalid_argument("config name must be non-empty without commas");
    if (!names.insert(c.name).second)
      throw std::invalid_argument("duplicate config name " + c.name);
    c.solver.phaseDefault =
        phaseDefaultFromString(j.value("phase_default", std::string("false")));
    c.solver.seed = j.value("seed", std::uint64_t{0});
    c.solver.rephase = j.value("rephase", true);
    c.solver.varDecay = j.value("var_decay", c.solver.varDecay);
    c.solver.restartBase = j.value("restart_base", c.solver.restartBase);
    if (j.contains("conflict_limit") && !j["conflict_limit"].is_null())
      c.solver.conflictLimit = j["conflict_limit"].get<std::uint64_t>();
    if (j.contains("hints_dir")) {
      fs::path dir = j["hints_dir"].get<std::string>();
      c.hintsDir = dir.is_absolute() ? dir : base / dir;
    }
    c.predictCommand = j.value("predict_command", std::string());
    c.solver.validate();
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<RunRecord> runExperiment(const fs::path &problems,
                                     const std::vector<ExperimentConfig> &configs,
                                     double timeLimit, unsigned workers) {
  using Clock = std::chrono::steady_clock;
  const std::vector<std::string> files = listCnfFiles(problems);
  const std::size_t jobs = files.size() * configs.size();
  std::vector<RunRecord> records(jobs);

  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 0 || workers > cores)
    workers = cores;
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(jobs, 1)));

  auto runOne = [&](std::size_t job) {
    const std::string &problem = files[job / configs.size()];
    const ExperimentConfig &cfg = configs[job % configs.size()];
    RunRecord rec;
    rec.problem = problem;
    rec.config = cfg.name;

    const CnfFormula f = readDimacsFile((problems / problem).string());
    SolverConfig scfg = cfg.solver;
    scfg.timeLimit = timeLimit;

    std::optional<PhaseHints> hints;
    if (scfg.phaseDefault == PhaseDefault::Hints) {
      fs::path hintPath;
      if (cfg.hintsDir)
        hintPath = *cfg.hintsDir / fs::path(problem).replace_extension(".nbh");
      if (!cfg.predictCommand.empty() && cfg.hintsDir) {
        const auto t0 = Clock::now();
        fs::create_directories(hintPath.parent_path());
        fs::path graphPath = hintPath;
        graphPath.replace_extension(".nbg");
        writeGraphFile(graphPath.string(), encode(f));
        std::string cmd = replaceAll(cfg.predictCommand, "{graph}",
                                     shellQuote(graphPath.string()));
        cmd = replaceAll(cmd, "{out}", shellQuote(hintPath.string()));
        if (std::system(cmd.c_str()) != 0)
          fs::remove(hintPath);
        rec.inferenceTime =
            std::chrono::duration<double>(Clock::now() - t0).count();
      }
      try {
        if (!hintPath.empty())
          hints = readHintsFile(hintPath.string());
      } catch (const HintError &) {
        hints.reset();
      }
      if (!hints) {
        rec.reverted = true;
        scfg.phaseDefault = PhaseDefault::False;
      }
    }

    SolveResult r = solve(f, scfg, hints ? &*hints : nullptr);
    rec.status = r.status;
    rec.wallTime = r.stats.wallTime;
    rec.conflicts = r.stats.conflicts;
    rec.decisions = r.stats.decisions;
    rec.propagations = r.stats.propagations;
    rec.restarts = r.stats.restarts;
    records[job] = std::move(rec);
  };

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        if (workers <= cores)
          pinToCore(w);
        try {
          for (std::size_t job; (job = next.fetch_add(1)) < jobs;)
            runOne(job);
        } catch (...) {
          errors[w] = std::current_exception();
          next = jobs;
        }
      });
  }
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return records;
}

//===----------------------------------------------------------------------===//
// results.csv
//===----------------------------------------------------------------------===//

namespace {

constexpr const char *kCsvHeader =
    "problem,config,status,wall_time,conflicts,decisions,propagations,"
    "restarts,inference_time,reverted";

std::string formatDouble(double x) {
  std::ostringstream os;
  os.precision(9);
  os << x;
  return os.str();
}

SolveStatus statusFromString(const std::string &s) {
  for (auto st : {SolveStatus::Sat, SolveStatus::Unsat, SolveStatus::Unknown})
    if (s == toString(st))
      return st;
  throw std::invalid_argument("unknown status '" + s + "'");
}

} // namespace

std::string writeResultsCsv(const std::vector<RunRecord> &records) {
  std::string out = std::string(kCsvHeader) + '\n';
  for (const RunRecord &r : records) {
    if (r.problem.find(',') != std::string::npos)
      throw std::invalid_argument("problem path contains a comma: " + r.problem);
    out += r.problem + ',' + r.config + ',' + toString(r.status) + ',' +
           formatDouble(r.wallTime) + ',' + std::to_string(r.conflicts) + ',' +
           std::to_string(r.decisions) + ',' + std::to_string(r.propagations) +
           ',' + std::to_string(r.restarts) + ',' +
           formatDouble(r.inferenceTime) + ',' + (r.reverted ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<RunRecord> parseResultsCsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineNo = 1;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("results.csv: unexpected header");
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty())
      continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string col; std::getline(ls, col, ',');)
      cols.push_back(col);
    if (cols.size() != 10)
      throw std::runtime_error("results.csv line " + std::to_string(lineNo) +
                               ": expected 10 columns");
    try {
      RunRecord r;
      r.problem = cols[0];
      r.config = cols[1];
      r.status = statusFromString(cols[2]);
      r.wallTime = std::stod(cols[3]);
      r.conflicts = std::stoull(cols[4]);
      r.decisions = std::stoull(cols[5]);
      r.propagations = std::stoull(cols[6]);
      r.restarts = std::stoull(cols[7]);
      r.inferenceTime = std::stod(cols[8]);
      r.reverted = cols[9] == "1";
      out.push_back(std::move(r));
    } catch (const std::exception &e) {
      throw std::runtime_error("results.csv line " + std::to_string(lineNo) +
                               ": " + e.what());
    }
  }
  return out;
}

std::vector<RunRecord> readResultsCsv(const fs::path &path) {
  return parseResultsCsv(slurp(path));
}

//===----------------------------------------------------------------------===//
// Analysis
//===----------------------------------------------------------------------===//

std::vector<CactusPoint> cactusData(const std::vector<RunRecord> &records,
                                    const std::string &config) {
  std::vector<double> times;
  for (const RunRecord &r : records)
    if (r.config == config && r.solved())
      times.push_back(r.wallTime);
  std::sort(times.begin(), times.end());
  std::vector<CactusPoint> out;
  for (std::size_t i = 0; i < times.size(); ++i)
    out.push_back({i + 1, times[i]});
  return out;
}

namespace {

std::map<std::string, const RunRecord *>
byProblem(const std::vector<RunRecord> &records, const std::string &config) {
  std::map<std::string, const RunRecord *> out;
  for (const RunRecord &r : records)
    if (r.config == config && !out.emplace(r.problem, &r).second)
      throw std::invalid_argument("problem " + r.problem +
                                  " appears twice for config " + config);
  return out;
}

void requireSameProblems(const std::map<std::string, const RunRecord *> &a,
                         const std::map<std::string, const RunRecord *> &b) {
  if (a.size() != b.size() ||
      !std::equal(a.begin(), a.end(), b.begin(),
                  [](auto &x, auto &y) { return x.first == y.first; }))
    throw std::invalid_argument("configs ran different problem sets");
}

double timeOrLimit(const RunRecord &r, double limit) {
  return r.solved() ? r.wallTime : limit;
}

} // namespace

std::vector<ScatterPoint> scatterData(const std::vector<RunRecord> &records,
                                      const std::string &configA,
                                      const std::string &configB,
                                      double timeLimit) {
  auto a = byProblem(records, configA);
  auto b = byProblem(records, configB);
  requireSameProblems(a, b);
  std::vector<ScatterPoint> out;
  for (auto &[problem, ra] : a)
    out.push_back({problem, timeOrLimit(*ra, timeLimit),
                   timeOrLimit(*b.at(problem), timeLimit)});
  return out;
}

double par2(const std::vector<RunRecord> &records, const std::string &config,
            double timeLimit) {
  double sum = 0;
  std::size_t n = 0;
  for (const RunRecord &r : records)
    if (r.config == config) {
      sum += r.solved() ? r.wallTime : 2 * timeLimit;
      ++n;
    }
  return n ? sum / static_cast<double>(n) : 0;
}

SummaryReport summarize(const std::vector<RunRecord> &records,
                        const std::string &configA, const std::string &configB,
                        double timeLimit) {
  auto a = byProblem(records, configA);
  auto b = byProblem(records, configB);
  requireSameProblems(a, b);

  SummaryReport s;
  double saving = 0, savingBoth = 0, par2SumA = 0, par2SumB = 0;
  std::size_t bothSolved = 0;
  for (auto &[problem, ra] : a) {
    const RunRecord &rb = *b.at(problem);
    if (ra->reverted || rb.reverted) {
      ++s.excludedReverted;
      continue;
    }
    ++s.compared;
    s.solvedA += ra->solved();
    s.solvedB += rb.solved();
    s.onlyA += ra->solved() && !rb.solved();
    s.onlyB += rb.solved() && !ra->solved();
    const double ta = timeOrLimit(*ra, timeLimit);
    const double tb = timeOrLimit(rb, timeLimit);
    s.fasterA += ta < tb;
    s.fasterB += tb < ta;
    saving += tb - ta;
    if (ra->solved() && rb.solved()) {
      savingBoth += rb.wallTime - ra->wallTime;
      ++bothSolved;
    }
    par2SumA += ra->solved() ? ra->wallTime : 2 * timeLimit;
    par2SumB += rb.solved() ? rb.wallTime : 2 * timeLimit;
  }
  s.solvedDelta = static_cast<long long>(s.solvedA) -
                  static_cast<long long>(s.solvedB);
  if (s.solvedB > 0)
    s.solvedDeltaPercent =
        100.0 * static_cast<double>(s.solvedDelta) / static_cast<double>(s.solvedB);
  else if (s.solvedA > 0)
    s.solvedDeltaPercent = std::numeric_limits<double>::infinity();
  if (s.compared) {
    const double n = static_cast<double>(s.compared);
    s.meanSaving = saving / n;
    s.par2A = par2SumA / n;
    s.par2B = par2SumB / n;
  }
  if (bothSolved)
    s.meanSavingBothSolved = savingBoth / static_cast<double>(bothSolved);
  return s;
}

} // namespace nbsat

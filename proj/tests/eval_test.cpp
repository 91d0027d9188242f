#include "nbsat/eval.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace nbsat;
namespace fs = std::filesystem;

namespace {

RunRecord rec(std::string problem, std::string config, SolveStatus status,
              double time, bool reverted = false) {
  RunRecord r;
  r.problem = std::move(problem);
  r.config = std::move(config);
  r.status = status;
  r.wallTime = time;
  r.reverted = reverted;
  return r;
}

constexpr auto Sat = SolveStatus::Sat;
constexpr auto Unsat = SolveStatus::Unsat;
constexpr auto Unknown = SolveStatus::Unknown;

ExperimentConfig config(std::string name, PhaseDefault pd,
                        std::optional<fs::path> hintsDir = std::nullopt) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.solver.phaseDefault = pd;
  c.hintsDir = std::move(hintsDir);
  return c;
}

/// Writes `count` satisfiable random formulas and their oracle hints.
void writeSatCorpus(const fs::path &dir, std::size_t count, unsigned minVars,
                    unsigned maxVars, bool withHints) {
  std::size_t written = 0;
  for (std::uint64_t seed = 1; written < count; ++seed) {
    CnfFormula f = fixtures::random3Sat(seed, minVars, maxVars, 4.0, 4.25);
    auto model = oracle::dpllModel(f);
    if (!model)
      continue;
    std::string name = "p" + std::to_string(seed);
    fixtures::writeFile(dir / "problems" / (name + ".cnf"), writeDimacs(f));
    if (withHints)
      fixtures::writeFile(dir / "hints" / (name + ".nbh"),
                          writeHints(PhaseHints::fromAssignment(*model, 1.0)));
    ++written;
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

} // namespace

TEST(RunExperiment, MatrixCoversEveryPair) {
  auto dir = fixtures::scratchDir("eval_matrix");
  writeSatCorpus(dir, 20, 20, 40, true);
  std::vector<ExperimentConfig> configs{
      config("base", PhaseDefault::False),
      config("hinted", PhaseDefault::Hints, dir / "hints")};
  auto records = runExperiment(dir / "problems", configs, 10, 4);
  ASSERT_EQ(records.size(), 40u);
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].config, configs[i % 2].name);
    EXPECT_EQ(records[i].problem, records[i - i % 2].problem);
    EXPECT_EQ(records[i].status, Sat);
    EXPECT_FALSE(records[i].reverted);
  }
  EXPECT_TRUE(std::is_sorted(records.begin(), records.end(),
                             [](auto &a, auto &b) { return a.problem < b.problem; }));

  // Same input, different worker count: identical counters.
  auto again = runExperiment(dir / "problems", configs, 10, 1);
  ASSERT_EQ(again.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(again[i].problem, records[i].problem);
    EXPECT_EQ(again[i].conflicts, records[i].conflicts);
    EXPECT_EQ(again[i].decisions, records[i].decisions);
  }
  fs::remove_all(dir);
}

TEST(RunExperiment, OracleHintsReduceMedianConflicts) {
  auto dir = fixtures::scratchDir("eval_oracle");
  writeSatCorpus(dir, 20, 60, 80, true);
  std::vector<ExperimentConfig> configs{
      config("base", PhaseDefault::False),
      config("oracle", PhaseDefault::Hints, dir / "hints")};
  auto records = runExperiment(dir / "problems", configs, 30, 0);
  std::vector<double> base, hinted;
  for (auto &r : records)
    (r.config == "base" ? base : hinted).push_back(static_cast<double>(r.conflicts));
  EXPECT_LT(median(hinted), median(base));
  fs::remove_all(dir);
}

TEST(RunExperiment, TimeLimitGivesUnknown) {
  auto dir = fixtures::scratchDir("eval_limit");
  fixtures::writeFile(dir / "problems/php.cnf", writeDimacs(genPigeonhole(10, 9)));
  auto records = runExperiment(dir / "problems", {config("base", PhaseDefault::False)},
                               0.001, 1);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].status, Unknown);
  EXPECT_FALSE(records[0].solved());
  fs::remove_all(dir);
}

TEST(RunExperiment, HintsInertWhenPhaseDefaultIsNotHints) {
  auto dir = fixtures::scratchDir("eval_inert");
  writeSatCorpus(dir, 10, 40, 60, true);
  std::vector<ExperimentConfig> configs{
      config("base", PhaseDefault::False),
      config("off", PhaseDefault::False, dir / "hints")};
  auto records = runExperiment(dir / "problems", configs, 10, 2);
  for (std::size_t i = 0; i < records.size(); i += 2) {
    EXPECT_EQ(records[i].status, records[i + 1].status);
    EXPECT_EQ(records[i].conflicts, records[i + 1].conflicts);
    EXPECT_EQ(records[i].decisions, records[i + 1].decisions);
    EXPECT_EQ(records[i].propagations, records[i + 1].propagations);
    EXPECT_EQ(records[i].restarts, records[i + 1].restarts);
    EXPECT_FALSE(records[i + 1].reverted);
  }
  fs::remove_all(dir);
}

TEST(RunExperiment, MissingOrBadHintsRevertAndAreExcluded) {
  auto dir = fixtures::scratchDir("eval_revert");
  writeSatCorpus(dir, 3, 20, 30, true);
  // Break one hint file and delete another.
  std::vector<fs::path> hintFiles;
  for (auto &e : fs::directory_iterator(dir / "hints"))
    hintFiles.push_back(e.path());
  std::sort(hintFiles.begin(), hintFiles.end());
  fs::remove(hintFiles[0]);
  fixtures::writeFile(hintFiles[1], "NBH 1\n1 7 0.5\n");

  std::vector<ExperimentConfig> configs{
      config("hinted", PhaseDefault::Hints, dir / "hints"),
      config("base", PhaseDefault::False)};
  auto records = runExperiment(dir / "problems", configs, 10, 1);
  std::size_t reverted = 0;
  for (auto &r : records)
    if (r.reverted) {
      ++reverted;
      EXPECT_EQ(r.config, "hinted");
      EXPECT_EQ(r.status, Sat);
    }
  EXPECT_EQ(reverted, 2u);

  SummaryReport s = summarize(records, "hinted", "base", 10);
  EXPECT_EQ(s.excludedReverted, 2u);
  EXPECT_EQ(s.compared, 1u);
  fs::remove_all(dir);
}

TEST(RunExperiment, PredictCommandProducesHints) {
  auto dir = fixtures::scratchDir("eval_predict");
  fixtures::writeFile(dir / "problems/phi.cnf", writeDimacs(fixtures::phi()));
  ExperimentConfig c = config("model", PhaseDefault::Hints, dir / "hints");
  c.solver.rephase = false;
  c.predictCommand = "test -s {graph} && cp '" NBSAT_TEST_DATA "/phi.nbh' {out}";
  auto records = runExperiment(dir / "problems", {c}, 10, 1);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_FALSE(records[0].reverted);
  EXPECT_EQ(records[0].conflicts, 0u);
  EXPECT_GT(records[0].inferenceTime, 0.0);
  EXPECT_TRUE(fs::exists(dir / "hints/phi.nbg"));

  c.predictCommand = "false";
  fs::remove_all(dir / "hints");
  records = runExperiment(dir / "problems", {c}, 10, 1);
  EXPECT_TRUE(records[0].reverted);
  fs::remove_all(dir);
}

TEST(Analysis, CactusSeries) {
  std::vector<RunRecord> r{rec("a", "x", Sat, 3), rec("b", "x", Unsat, 1),
                           rec("c", "x", Sat, 2), rec("a", "y", Sat, 9)};
  EXPECT_EQ(cactusData(r, "x"),
            (std::vector<CactusPoint>{{1, 1}, {2, 2}, {3, 3}}));
  r[0].status = Unknown;
  EXPECT_EQ(cactusData(r, "x"), (std::vector<CactusPoint>{{1, 1}, {2, 2}}));
  EXPECT_TRUE(cactusData(r, "none").empty());
}

TEST(Analysis, ScatterPoints) {
  std::vector<RunRecord> r{rec("p", "a", Sat, 2), rec("p", "b", Unknown, 7),
                           rec("q", "a", Sat, 4), rec("q", "b", Sat, 4)};
  auto points = scatterData(r, "a", "b", 10);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[0], (ScatterPoint{"p", 2, 10}));
  EXPECT_EQ(points[1].timeA, points[1].timeB);

  r.push_back(rec("z", "a", Sat, 1));
  EXPECT_THROW(scatterData(r, "a", "b", 10), std::invalid_argument);
}

TEST(Analysis, SolvedDeltaPercent) {
  std::vector<RunRecord> r;
  for (int i = 0; i < 300; ++i) {
    std::string p = "p" + std::to_string(i);
    r.push_back(rec(p, "nb", i < 203 ? Sat : Unknown, 1));
    r.push_back(rec(p, "base", i < 193 ? Sat : Unknown, 1));
  }
  SummaryReport s = summarize(r, "nb", "base", 100);
  EXPECT_EQ(s.solvedA, 203u);
  EXPECT_EQ(s.solvedB, 193u);
  EXPECT_EQ(s.solvedDelta, 10);
  EXPECT_DOUBLE_EQ(std::round(s.solvedDeltaPercent * 10) / 10, 5.2);
  EXPECT_EQ(s.onlyA, 10u);
  EXPECT_EQ(s.onlyB, 0u);
}

TEST(Analysis, Par2AndSummaryFixture) {
  // Limit 10. A: 1, 2, -, 4, -   B: 3, -, 5, 1, -
  std::vector<RunRecord> r{
      rec("p1", "A", Sat, 1),     rec("p1", "B", Sat, 3),
      rec("p2", "A", Sat, 2),     rec("p2", "B", Unknown, 10),
      rec("p3", "A", Unknown, 10), rec("p3", "B", Unsat, 5),
      rec("p4", "A", Unsat, 4),   rec("p4", "B", Sat, 1),
      rec("p5", "A", Unknown, 10), rec("p5", "B", Unknown, 10)};
  EXPECT_DOUBLE_EQ(par2(r, "A", 10), 47.0 / 5);
  EXPECT_DOUBLE_EQ(par2(r, "B", 10), 49.0 / 5);

  SummaryReport s = summarize(r, "A", "B", 10);
  EXPECT_EQ(s.compared, 5u);
  EXPECT_EQ(s.solvedA, 3u);
  EXPECT_EQ(s.solvedB, 3u);
  EXPECT_EQ(s.solvedDelta, 0);
  EXPECT_DOUBLE_EQ(s.solvedDeltaPercent, 0);
  EXPECT_EQ(s.onlyA, 1u);
  EXPECT_EQ(s.onlyB, 1u);
  EXPECT_EQ(s.fasterA, 2u);
  EXPECT_EQ(s.fasterB, 2u);
  EXPECT_DOUBLE_EQ(s.meanSaving, 0.4);
  EXPECT_DOUBLE_EQ(s.meanSavingBothSolved, -0.5);
  EXPECT_DOUBLE_EQ(s.par2A, 9.4);
  EXPECT_DOUBLE_EQ(s.par2B, 9.8);

  SummaryReport swapped = summarize(r, "B", "A", 10);
  EXPECT_EQ(swapped.onlyA, s.onlyB);
  EXPECT_EQ(swapped.fasterA, s.fasterB);
  EXPECT_DOUBLE_EQ(swapped.meanSaving, -s.meanSaving);
  EXPECT_DOUBLE_EQ(swapped.par2A, s.par2B);
}

TEST(Analysis, DeltaPercentWithNothingSolvedByB) {
  std::vector<RunRecord> r{rec("p", "A", Sat, 1), rec("p", "B", Unknown, 5)};
  EXPECT_TRUE(std::isinf(summarize(r, "A", "B", 5).solvedDeltaPercent));
}

TEST(ResultsCsv, RoundTripAndErrors) {
  std::vector<RunRecord> r{rec("a/x.cnf", "base", Sat, 0.125),
                           rec("b.cnf", "nb", Unknown, 10, true)};
  r[0].conflicts = 17;
  r[0].inferenceTime = 0.5;
  std::string text = writeResultsCsv(r);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "problem,config,status,wall_time,conflicts,decisions,propagations,"
            "restarts,inference_time,reverted");
  auto back = parseResultsCsv(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].problem, "a/x.cnf");
  EXPECT_EQ(back[0].conflicts, 17u);
  EXPECT_DOUBLE_EQ(back[0].wallTime, 0.125);
  EXPECT_DOUBLE_EQ(back[0].inferenceTime, 0.5);
  EXPECT_EQ(back[1].status, Unknown);
  EXPECT_TRUE(back[1].reverted);
  EXPECT_EQ(writeResultsCsv(back), text);

  EXPECT_THROW(parseResultsCsv("wrong header\n"), std::runtime_error);
  EXPECT_THROW(parseResultsCsv(text + "x,y\n"), std::runtime_error);
}

TEST(ExperimentConfigFile, Reading) {
  auto dir = fixtures::scratchDir("eval_cfg");
  fixtures::writeFile(dir / "cfg.json", R"({"configs": [
    {"name": "base"},
    {"name": "nb", "phase_default": "hints", "hints_dir": "h", "seed": 3,
     "rephase": false, "var_decay": 0.9, "restart_base": 50,
     "conflict_limit": 1000, "predict_command": "m {graph} {out}"}
  ]})");
  auto cfgs = readExperimentConfigs(dir / "cfg.json");
  ASSERT_EQ(cfgs.size(), 2u);
  EXPECT_EQ(cfgs[0].solver.phaseDefault, PhaseDefault::False);
  EXPECT_FALSE(cfgs[0].hintsDir.has_value());
  EXPECT_EQ(cfgs[1].solver.phaseDefault, PhaseDefault::Hints);
  EXPECT_EQ(*cfgs[1].hintsDir, dir / "h");
  EXPECT_EQ(cfgs[1].solver.seed, 3u);
  EXPECT_FALSE(cfgs[1].solver.rephase);
  EXPECT_DOUBLE_EQ(cfgs[1].solver.varDecay, 0.9);
  EXPECT_EQ(cfgs[1].solver.conflictLimit, 1000u);
  EXPECT_EQ(cfgs[1].predictCommand, "m {graph} {out}");

  fixtures::writeFile(dir / "dup.json", R"({"configs": [{"name": "a"}, {"name": "a"}]})");
  EXPECT_THROW(readExperimentConfigs(dir / "dup.json"), std::invalid_argument);
  fs::remove_all(dir);
}

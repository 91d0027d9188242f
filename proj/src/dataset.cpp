#include "nbsat/dataset.hpp"
#include "nbsat/backbone.hpp"
#include "nbsat/graph.hpp"
#include "nbsat/rng.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace nbsat {

const char *toString(EntryStatus s) {
  switch (s) {
  case EntryStatus::Accepted:
    return "ACCEPTED";
  case EntryStatus::UnsatInput:
    return "UNSAT_INPUT";
  case EntryStatus::Timeout:
    return "TIMEOUT";
  case EntryStatus::ZeroBackbone:
    return "ZERO_BACKBONE";
  case EntryStatus::ParseError:
    return "PARSE_ERROR";
  }
  return "?";
}

EntryStatus entryStatusFromString(const std::string &s) {
  for (auto st : {EntryStatus::Accepted, EntryStatus::UnsatInput,
                  EntryStatus::Timeout, EntryStatus::ZeroBackbone,
                  EntryStatus::ParseError})
    if (s == toString(st))
      return st;
  throw std::invalid_argument("unknown entry status '" + s + "'");
}

const char *toString(Split s) {
  return s == Split::Pretrain ? "pretrain" : "finetune";
}

Split splitFromString(const std::string &s) {
  if (s == "pretrain")
    return Split::Pretrain;
  if (s == "finetune")
    return Split::Finetune;
  throw std::invalid_argument("unknown split '" + s + "'");
}

//===----------------------------------------------------------------------===//
// Manifest I/O
//===----------------------------------------------------------------------===//

namespace {

std::string formatSeconds(double s) {
  std::ostringstream os;
  os.precision(17);
  os << s;
  return os.str();
}

std::string orDash(const std::string &s) { return s.empty() ? "-" : s; }
std::string fromDash(const std::string &s) { return s == "-" ? "" : s; }

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

std::string writeManifest(const DatasetManifest &m) {
  std::string out = "NBM 1\n";
  out += "m " + std::string(toString(m.split)) + ' ' + formatSeconds(m.timeout) +
         '\n';
  for (const ManifestEntry &e : m.entries)
    out += "r " + std::string(toString(e.status)) + ' ' +
           std::to_string(e.numVars) + ' ' + std::to_string(e.numClauses) + ' ' +
           std::to_string(e.numBackbone) + ' ' + orDash(e.originalGraph) + ' ' +
           orDash(e.dualGraph) + ' ' + e.source + '\n';
  return out;
}

DatasetManifest parseManifest(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineNo = 0;
  auto fail = [&](const std::string &what) {
    throw std::runtime_error("manifest line " + std::to_string(lineNo) + ": " +
                             what);
  };
  DatasetManifest m;
  if (!std::getline(in, line) || (++lineNo, line != "NBM 1"))
    fail("expected 'NBM 1' header");
  bool haveMeta = false;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty())
      continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "m") {
      std::string split;
      if (!(ls >> split >> m.timeout))
        fail("expected 'm <split> <timeout>'");
      try {
        m.split = splitFromString(split);
      } catch (const std::invalid_argument &err) {
        fail(err.what());
      }
      haveMeta = true;
    } else if (tag == "r") {
      ManifestEntry e;
      std::string status, orig, dual;
      if (!(ls >> status >> e.numVars >> e.numClauses >> e.numBackbone >> orig >>
            dual))
        fail("malformed record");
      try {
        e.status = entryStatusFromString(status);
      } catch (const std::invalid_argument &err) {
        fail(err.what());
      }
      e.originalGraph = fromDash(orig);
      e.dualGraph = fromDash(dual);
      std::getline(ls >> std::ws, e.source);
      if (e.source.empty())
        fail("record without source path");
      m.entries.push_back(std::move(e));
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (!haveMeta)
    fail("missing 'm' line");
  return m;
}

DatasetManifest readManifestFile(const fs::path &path) {
  return parseManifest(slurp(path));
}

//===----------------------------------------------------------------------===//
// Build
//===----------------------------------------------------------------------===//

namespace {

std::string graphStem(const std::string &source) {
  std::string stem = source;
  for (auto ext : {".cnf", ".dimacs"})
    if (stem.size() > std::string_view(ext).size() &&
        stem.ends_with(ext)) {
      stem.resize(stem.size() - std::string_view(ext).size());
      break;
    }
  std::string out;
  for (char c : stem) {
    if (c == '/')
      out += "__";
    else if (c == ' ')
      out += '_';
    else
      out += c;
  }
  return out;
}

ManifestEntry processOne(const fs::path &corpusDir, const fs::path &outDir,
                         const std::string &source, double timeout) {
  ManifestEntry e;
  e.source = source;
  CnfFormula f;
  try {
    f = readDimacsFile((corpusDir / source).string());
  } catch (const std::exception &) {
    e.status = EntryStatus::ParseError;
    return e;
  }
  e.numVars = f.numVars;
  e.numClauses = f.numClauses();

  BackboneResult bb = extractBackbone(f, timeout);
  switch (bb.status) {
  case BackboneStatus::UnsatInput:
    e.status = EntryStatus::UnsatInput;
    return e;
  case BackboneStatus::Timeout:
    e.status = EntryStatus::Timeout;
    return e;
  case BackboneStatus::Complete:
    break;
  }
  e.numBackbone = bb.labeling.size();
  if (bb.labeling.empty()) {
    e.status = EntryStatus::ZeroBackbone;
    return e;
  }

  DualResult dual = dualFormula(f, bb.labeling);
  std::string stem = graphStem(source);
  e.originalGraph = "graphs/" + stem + ".nbg";
  e.dualGraph = "graphs/" + stem + ".dual.nbg";
  writeGraphFile((outDir / e.originalGraph).string(), encode(f), bb.labeling);
  writeGraphFile((outDir / e.dualGraph).string(), encode(dual.formula),
                 dual.labels);
  e.status = EntryStatus::Accepted;
  return e;
}

} // namespace

DatasetManifest buildDataset(const fs::path &corpusDir, const fs::path &outDir,
                             const BuildOptions &opts) {
  if (!fs::is_directory(corpusDir))
    throw std::invalid_argument("corpus directory " + corpusDir.string() +
                                " does not exist");
  const std::vector<std::string> sources = listCnfFiles(corpusDir);

  fs::create_directories(outDir / "graphs");

  DatasetManifest manifest;
  manifest.split = opts.split;
  manifest.timeout = opts.timeout;
  manifest.entries.resize(sources.size());

  unsigned workers = opts.workers ? opts.workers
                                  : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(1, sources.size()));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < sources.size();)
          manifest.entries[i] =
              processOne(corpusDir, outDir, sources[i], opts.timeout);
      });
  }

  std::ofstream out(outDir / kManifestName, std::ios::binary);
  out << writeManifest(manifest);
  if (!out)
    throw std::runtime_error("cannot write manifest in " + outDir.string());
  return manifest;
}

DatasetStats datasetStats(const DatasetManifest &m, const fs::path &graphRoot) {
  DatasetStats s;
  double vars = 0, clauses = 0, backbone = 0;
  for (const ManifestEntry &e : m.entries) {
    if (e.status != EntryStatus::Accepted) {
      ++s.rejected;
      continue;
    }
    ++s.accepted;
    vars += static_cast<double>(e.numVars);
    clauses += static_cast<double>(e.numClauses);
    backbone += static_cast<double>(e.numBackbone);
    for (const std::string &g : {e.originalGraph, e.dualGraph}) {
      LabeledGraph lg = readGraphFile((graphRoot / g).string());
      if (!lg.labels)
        throw std::runtime_error("graph " + g + " carries no labels");
      for (auto [v, phase] : *lg.labels)
        ++(phase ? s.positiveLabels : s.negativeLabels);
    }
  }
  if (s.accepted == 0)
    throw std::invalid_argument("manifest has no accepted formulas");
  const double n = static_cast<double>(s.accepted);
  s.numCnf = 2 * s.accepted;
  s.meanVars = vars / n;
  s.meanClauses = clauses / n;
  s.meanBackbone = backbone / n;
  s.backboneProportion = vars > 0 ? backbone / vars : 0;
  const std::size_t labels = s.positiveLabels + s.negativeLabels;
  s.labelBalance = labels ? static_cast<double>(s.positiveLabels) /
                                static_cast<double>(labels)
                          : 0;
  return s;
}

//===----------------------------------------------------------------------===//
// Generators
//===----------------------------------------------------------------------===//

CnfFormula genRandomKSat(Var n, std::size_t m, std::uint32_t k,
                         std::uint64_t seed) {
  if (k == 0 || k > n)
    throw std::invalid_argument("k-SAT needs 1 <= k <= n");
  Rng rng(seed);
  CnfFormula f;
  f.numVars = n;
  f.clauses.reserve(m);
  std::vector<Var> pool(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (Var v = 0; v < n; ++v)
      pool[v] = v + 1;
    Clause c;
    // Partial Fisher-Yates: the first k slots become a uniform k-subset.
    for (std::uint32_t j = 0; j < k; ++j) {
      std::size_t pick = j + rng.below(n - j);
      std::swap(pool[j], pool[pick]);
      c.emplace_back(pool[j], rng.below(2) == 1);
    }
    f.clauses.push_back(std::move(c));
  }
  return f;
}

CnfFormula genPigeonhole(std::uint32_t pigeons, std::uint32_t holes) {
  if (pigeons == 0 || holes == 0)
    throw std::invalid_argument("pigeonhole needs at least one pigeon and hole");
  auto var = [&](std::uint32_t p, std::uint32_t h) { return p * holes + h + 1; };
  CnfFormula f;
  f.numVars = pigeons * holes;
  for (std::uint32_t p = 0; p < pigeons; ++p) {
    Clause c;
    for (std::uint32_t h = 0; h < holes; ++h)
      c.emplace_back(var(p, h), false);
    f.clauses.push_back(std::move(c));
  }
  for (std::uint32_t h = 0; h < holes; ++h)
    for (std::uint32_t p = 0; p < pigeons; ++p)
      for (std::uint32_t q = p + 1; q < pigeons; ++q)
        f.clauses.push_back({Literal(var(p, h), true), Literal(var(q, h), true)});
  return f;
}

CnfFormula genColoring(std::uint32_t vertices, double edgeProbability,
                       std::uint32_t colors, std::uint64_t seed) {
  if (vertices == 0 || colors == 0)
    throw std::invalid_argument("coloring needs vertices and colors");
  if (!(edgeProbability >= 0 && edgeProbability <= 1))
    throw std::invalid_argument("edge probability must lie in [0,1]");
  Rng rng(seed);
  auto var = [&](std::uint32_t v, std::uint32_t c) { return v * colors + c + 1; };
  CnfFormula f;
  f.numVars = vertices * colors;
  for (std::uint32_t v = 0; v < vertices; ++v) {
    Clause atLeast;
    for (std::uint32_t c = 0; c < colors; ++c)
      atLeast.emplace_back(var(v, c), false);
    f.clauses.push_back(std::move(atLeast));
    for (std::uint32_t c = 0; c < colors; ++c)
      for (std::uint32_t d = c + 1; d < colors; ++d)
        f.clauses.push_back({Literal(var(v, c), true), Literal(var(v, d), true)});
  }
  for (std::uint32_t u = 0; u < vertices; ++u)
    for (std::uint32_t v = u + 1; v < vertices; ++v) {
      if (rng.uniform() >= edgeProbability)
        continue;
      for (std::uint32_t c = 0; c < colors; ++c)
        f.clauses.push_back({Literal(var(u, c), true), Literal(var(v, c), true)});
    }
  f.clauses.push_back({Literal(var(0, 0), false)});
  return f;
}

} // namespace nbsat

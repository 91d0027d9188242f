#include "nbsat/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace nbsat {

std::vector<std::vector<NodeId>> SatGraph::adjacency() const {
  std::vector<std::vector<NodeId>> adj(nodes.size());
  for (const GraphEdge &e : edges) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  return adj;
}

SatGraph encode(const CnfFormula &f) {
  const Components comps = connectedComponents(f);
  SatGraph g;
  g.numVars = f.numVars;
  g.numClauses = static_cast<std::uint32_t>(f.numClauses());
  g.componentCount = static_cast<std::uint32_t>(comps.count);

  const std::size_t total = g.numVars + g.numClauses + g.componentCount;
  g.nodes.reserve(total);
  for (NodeId id = 0; id < g.numVars; ++id)
    g.nodes.push_back({id, NodeType::Variable});
  for (NodeId i = 0; i < g.numClauses; ++i)
    g.nodes.push_back({g.numVars + i, NodeType::Clause});
  for (std::uint32_t c = 0; c < g.componentCount; ++c)
    g.nodes.push_back({g.metaNode(c), NodeType::Meta});

  g.varMap.resize(g.numVars);
  for (Var v = 1; v <= g.numVars; ++v)
    g.varMap[v - 1] = v - 1;

  // Literals are distinct after parsing, but formulas built in code may repeat
  // them.
  std::set<std::tuple<NodeId, NodeId, int>> seen;
  for (std::uint32_t ci = 0; ci < g.numClauses; ++ci) {
    const NodeId clauseNode = g.numVars + ci;
    for (Literal l : f.clauses[ci]) {
      GraphEdge e{g.varMap[l.var - 1], clauseNode,
                  l.negative ? EdgeType::Negative : EdgeType::Positive};
      if (seen.emplace(e.src, e.dst, static_cast<int>(e.type)).second)
        g.edges.push_back(e);
    }
  }
  for (std::uint32_t ci = 0; ci < g.numClauses; ++ci)
    g.edges.push_back(
        {g.metaNode(comps.ofClause[ci]), g.numVars + ci, EdgeType::Meta});
  return g;
}

namespace {

/// Eccentricity of `src` within its connected piece, plus the piece itself.
std::size_t bfs(const std::vector<std::vector<NodeId>> &adj, NodeId src,
                std::vector<NodeId> *piece) {
  std::vector<std::int64_t> dist(adj.size(), -1);
  std::deque<NodeId> queue{src};
  dist[src] = 0;
  std::size_t ecc = 0;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    if (piece)
      piece->push_back(u);
    ecc = std::max(ecc, static_cast<std::size_t>(dist[u]));
    for (NodeId w : adj[u])
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
  }
  return ecc;
}

} // namespace

std::size_t diameter(const SatGraph &g, std::size_t component) {
  if (component >= g.componentCount)
    throw std::out_of_range("component " + std::to_string(component) +
                            " does not exist");
  const auto adj = g.adjacency();
  const NodeId meta = g.metaNode(component);
  if (adj[meta].empty())
    return 0;
  std::vector<NodeId> piece;
  std::size_t best = bfs(adj, meta, &piece);
  for (NodeId u : piece)
    if (u != meta)
      best = std::max(best, bfs(adj, u, nullptr));
  return best;
}

//===----------------------------------------------------------------------===//
// NBG 1
//===----------------------------------------------------------------------===//

std::string serialize(const SatGraph &g,
                      const std::optional<BackboneLabeling> &labels) {
  if (labels)
    for (auto [v, phase] : *labels)
      if (v == 0 || v > g.numVars)
        throw std::invalid_argument("label for unknown variable " +
                                    std::to_string(v));
  std::string out = "NBG 1\n";
  out += "h " + std::to_string(g.nodes.size()) + ' ' +
         std::to_string(g.edges.size()) + ' ' + std::to_string(g.numVars) +
         ' ' + std::to_string(g.numClauses) + ' ' +
         std::to_string(g.componentCount) + '\n';
  for (const GraphNode &n : g.nodes)
    out += "n " + std::to_string(n.id) + ' ' +
           std::to_string(static_cast<int>(n.type)) + '\n';
  for (const GraphEdge &e : g.edges)
    out += "e " + std::to_string(e.src) + ' ' + std::to_string(e.dst) + ' ' +
           std::to_string(static_cast<int>(e.type)) + '\n';
  if (labels)
    for (auto [v, phase] : *labels)
      out += "l " + std::to_string(g.varNode(v)) + (phase ? " 1\n" : " 0\n");
  return out;
}

LabeledGraph deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineNo = 0;
  auto fail = [&](const std::string &what) {
    throw GraphFormatError("graph line " + std::to_string(lineNo) + ": " +
                           what);
  };
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineNo;
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        return true;
    }
    return false;
  };

  if (!next())
    fail("empty graph file");
  {
    std::istringstream hs(line);
    std::string magic, extra;
    int version = 0;
    if (!(hs >> magic >> version) || magic != "NBG" || (hs >> extra))
      fail("expected 'NBG 1' header");
    if (version != 1)
      fail("unsupported graph format version " + std::to_string(version));
  }
  std::uint64_t numNodes = 0, numEdges = 0, numVars = 0, numClauses = 0,
                numComponents = 0;
  {
    if (!next())
      fail("missing counts line");
    std::istringstream hs(line);
    std::string tag, extra;
    if (!(hs >> tag >> numNodes >> numEdges >> numVars >> numClauses >>
          numComponents) ||
        tag != "h" || (hs >> extra))
      fail("expected 'h <nodes> <edges> <vars> <clauses> <components>'");
    if (numVars + numClauses + numComponents != numNodes)
      fail("node count does not equal vars + clauses + components");
  }

  LabeledGraph out;
  SatGraph &g = out.graph;
  g.numVars = static_cast<std::uint32_t>(numVars);
  g.numClauses = static_cast<std::uint32_t>(numClauses);
  g.componentCount = static_cast<std::uint32_t>(numComponents);
  g.nodes.resize(numNodes);
  std::vector<char> haveNode(numNodes, 0);
  std::size_t nodeLines = 0;
  std::vector<std::size_t> typeCount(3, 0);
  std::set<std::tuple<NodeId, NodeId, int>> edgeSet;

  auto typeOf = [&](NodeId id) { return g.nodes[id].type; };

  while (next()) {
    std::istringstream ls(line);
    std::string tag, extra;
    ls >> tag;
    if (tag == "n") {
      std::int64_t id = -1;
      int type = 2;
      if (!(ls >> id >> type) || (ls >> extra))
        fail("expected 'n <id> <type>'");
      if (id < 0 || static_cast<std::uint64_t>(id) >= numNodes)
        fail("node id " + std::to_string(id) + " out of range");
      if (type < -1 || type > 1)
        fail("invalid node type " + std::to_string(type));
      if (haveNode[id])
        fail("duplicate node " + std::to_string(id));
      if (!g.edges.empty())
        fail("node line after edge lines");
      haveNode[id] = 1;
      g.nodes[id] = {static_cast<NodeId>(id), static_cast<NodeType>(type)};
      ++typeCount[type + 1];
      ++nodeLines;
    } else if (tag == "e") {
      std::int64_t src = -1, dst = -1;
      int type = 2;
      if (!(ls >> src >> dst >> type) || (ls >> extra))
        fail("expected 'e <src> <dst> <type>'");
      if (nodeLines != numNodes)
        fail("node count mismatch: header says " + std::to_string(numNodes) +
             ", found " + std::to_string(nodeLines));
      if (src < 0 || dst < 0 || static_cast<std::uint64_t>(src) >= numNodes ||
          static_cast<std::uint64_t>(dst) >= numNodes)
        fail("dangling edge endpoint");
      if (type < -1 || type > 1)
        fail("invalid edge type " + std::to_string(type));
      GraphEdge e{static_cast<NodeId>(src), static_cast<NodeId>(dst),
                  static_cast<EdgeType>(type)};
      bool valid = e.type == EdgeType::Meta
                       ? typeOf(e.src) == NodeType::Meta &&
                             typeOf(e.dst) == NodeType::Clause
                       : typeOf(e.src) == NodeType::Variable &&
                             typeOf(e.dst) == NodeType::Clause;
      if (!valid)
        fail("edge type does not match endpoint node types");
      if (!edgeSet.emplace(e.src, e.dst, type).second)
        fail("duplicate edge");
      if (out.labels)
        fail("edge line after label lines");
      g.edges.push_back(e);
    } else if (tag == "l") {
      std::int64_t id = -1;
      int phase = -1;
      if (!(ls >> id >> phase) || (ls >> extra) || (phase != 0 && phase != 1))
        fail("expected 'l <node> <phase>'");
      if (nodeLines != numNodes)
        fail("node count mismatch");
      if (id < 0 || static_cast<std::uint64_t>(id) >= numNodes ||
          typeOf(static_cast<NodeId>(id)) != NodeType::Variable)
        fail("label on a node that is not a variable");
      if (!out.labels)
        out.labels.emplace();
      // Resolved to a variable index once varMap is known.
      if (!out.labels->emplace(static_cast<Var>(id), phase == 1).second)
        fail("duplicate label");
    } else {
      fail("unknown record '" + tag + "'");
    }
  }

  if (nodeLines != numNodes)
    fail("node count mismatch: header says " + std::to_string(numNodes) +
         ", found " + std::to_string(nodeLines));
  if (g.edges.size() != numEdges)
    fail("edge count mismatch: header says " + std::to_string(numEdges) +
         ", found " + std::to_string(g.edges.size()));
  if (typeCount[2] != numVars || typeCount[0] != numClauses ||
      typeCount[1] != numComponents)
    fail("node type counts disagree with header");

  std::vector<std::int64_t> varOfNode(numNodes, -1);
  for (const GraphNode &n : g.nodes)
    if (n.type == NodeType::Variable) {
      varOfNode[n.id] = static_cast<std::int64_t>(g.varMap.size()) + 1;
      g.varMap.push_back(n.id);
    }
  if (out.labels) {
    BackboneLabeling byVar;
    for (auto [node, phase] : *out.labels)
      byVar.emplace(static_cast<Var>(varOfNode[node]), phase);
    out.labels = std::move(byVar);
  }
  return out;
}

void writeGraphFile(const std::string &path, const SatGraph &g,
                    const std::optional<BackboneLabeling> &labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out << serialize(g, labels);
  if (!out)
    throw std::runtime_error("write failed for " + path);
}

LabeledGraph readGraphFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

} // namespace nbsat

#pragma once

#include "nbsat/cnf.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nbsat {

using NodeId = std::uint32_t;

enum class NodeType : int { Meta = 0, Variable = 1, Clause = -1 };
enum class EdgeType : int { Meta = 0, Positive = 1, Negative = -1 };

struct GraphNode {
  NodeId id = 0;
  NodeType type = NodeType::Variable;
  friend bool operator==(const GraphNode &, const GraphNode &) = default;
};

/// Undirected edge, stored once. Polarity edges run variable -> clause, meta
/// edges meta -> clause.
struct GraphEdge {
  NodeId src = 0;
  NodeId dst = 0;
  EdgeType type = EdgeType::Positive;
  friend bool operator==(const GraphEdge &, const GraphEdge &) = default;
};

/// Variable/clause bipartite graph with one meta node per connected component.
///
/// Node ids are canonical: variables 1..n take ids 0..n-1, clauses take
/// n..n+m-1 in file order, and meta nodes n+m.. in component order (see
/// connectedComponents). Edges list every polarity incidence clause by clause
/// in literal order, followed by one meta edge per clause.
struct SatGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::vector<NodeId> varMap; // var - 1 -> node id
  std::uint32_t numVars = 0;
  std::uint32_t numClauses = 0;
  std::uint32_t componentCount = 0;

  NodeId metaNode(std::size_t component) const {
    return numVars + numClauses + static_cast<NodeId>(component);
  }
  NodeId varNode(Var v) const { return varMap.at(v - 1); }

  /// Adjacency lists (each undirected edge appears in both endpoints).
  std::vector<std::vector<NodeId>> adjacency() const;

  friend bool operator==(const SatGraph &, const SatGraph &) = default;
};

SatGraph encode(const CnfFormula &f);

/// Exact BFS diameter of one component. A component whose meta node has no
/// edges belongs to an isolated variable and has diameter 0.
std::size_t diameter(const SatGraph &g, std::size_t component);

struct LabeledGraph {
  SatGraph graph;
  std::optional<BackboneLabeling> labels;
};

class GraphFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// "NBG 1" text. Throws std::invalid_argument for labels on unknown variables.
std::string serialize(const SatGraph &g,
                      const std::optional<BackboneLabeling> &labels = {});
LabeledGraph deserialize(std::string_view text);

void writeGraphFile(const std::string &path, const SatGraph &g,
                    const std::optional<BackboneLabeling> &labels = {});
LabeledGraph readGraphFile(const std::string &path);

} // namespace nbsat

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spillover/r2conn.hpp"

namespace spill {

enum class Split { overall, contemporaneous, lagged };
enum class NodeRole { transmitter, receiver };
enum class GraphFormat { json, dot, graphml };

std::string to_string(Split s);
std::string to_string(NodeRole r);
std::string to_string(GraphFormat f);
Split split_from_string(const std::string& s);
GraphFormat graph_format_from_string(const std::string& s);

struct NetworkNode {
  std::string label;
  NodeRole role = NodeRole::receiver;
  double net = 0.0;

  bool operator==(const NetworkNode&) const = default;
};

struct NetworkEdge {
  std::string source;
  std::string target;
  double weight = 0.0;
  Split split = Split::overall;

  bool operator==(const NetworkEdge&) const = default;
};

/// Directed net pairwise spillover graph for one split. Nodes and edges are
/// kept in label-lexicographic order.
struct SpilloverNetwork {
  Split split = Split::overall;
  double threshold = 0.2;
  std::vector<NetworkNode> nodes;
  std::vector<NetworkEdge> edges;

  bool operator==(const SpilloverNetwork&) const = default;
};

/// Edge i -> j iff npdc(i, j) > threshold. A node transmits iff net > 0.
SpilloverNetwork build_network(const Eigen::MatrixXd& npdc, const Eigen::VectorXd& net,
                               const std::vector<std::string>& labels, double threshold, Split split);

/// One network per split available in the table (overall first).
std::vector<SpilloverNetwork> build_networks(const ConnectednessTable& table, double threshold);

std::string export_graph(const SpilloverNetwork& network, GraphFormat format);
SpilloverNetwork network_from_json(const std::string& text);

}  // namespace spill

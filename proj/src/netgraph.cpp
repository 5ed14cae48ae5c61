#include "spillover/netgraph.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "spillover/error.hpp"

namespace spill {

std::string to_string(Split s) {
  switch (s) {
    case Split::overall: return "overall";
    case Split::contemporaneous: return "contemporaneous";
    case Split::lagged: return "lagged";
  }
  return "overall";
}

std::string to_string(NodeRole r) { return r == NodeRole::transmitter ? "transmitter" : "receiver"; }

std::string to_string(GraphFormat f) {
  switch (f) {
    case GraphFormat::json: return "json";
    case GraphFormat::dot: return "dot";
    case GraphFormat::graphml: return "graphml";
  }
  return "json";
}

Split split_from_string(const std::string& s) {
  if (s == "overall") return Split::overall;
  if (s == "contemporaneous") return Split::contemporaneous;
  if (s == "lagged") return Split::lagged;
  throw std::invalid_argument("unknown split '" + s + "'");
}

GraphFormat graph_format_from_string(const std::string& s) {
  if (s == "json") return GraphFormat::json;
  if (s == "dot") return GraphFormat::dot;
  if (s == "graphml") return GraphFormat::graphml;
  throw std::invalid_argument("unknown graph format '" + s + "'");
}

SpilloverNetwork build_network(const Eigen::MatrixXd& npdc, const Eigen::VectorXd& net,
                               const std::vector<std::string>& labels, double threshold, Split split) {
  const Eigen::Index K = static_cast<Eigen::Index>(labels.size());
  if (npdc.rows() != K || npdc.cols() != K || net.size() != K) {
    throw std::invalid_argument("build_network: dimension mismatch");
  }
  if (!(threshold >= 0.0)) throw std::invalid_argument("build_network: threshold must be non-negative");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return labels[static_cast<std::size_t>(a)] < labels[static_cast<std::size_t>(b)];
  });

  SpilloverNetwork g;
  g.split = split;
  g.threshold = threshold;
  for (Eigen::Index i : order) {
    g.nodes.push_back({labels[static_cast<std::size_t>(i)], net(i) > 0.0 ? NodeRole::transmitter : NodeRole::receiver,
                       net(i)});
  }
  for (Eigen::Index i : order) {
    for (Eigen::Index j : order) {
      if (i != j && npdc(i, j) > threshold) {
        g.edges.push_back({labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)], npdc(i, j), split});
      }
    }
  }
  return g;
}

std::vector<SpilloverNetwork> build_networks(const ConnectednessTable& table, double threshold) {
  NpdcMatrices m = npdc(table);
  SpilloverIndices idx = aggregate_indices(table);
  std::vector<SpilloverNetwork> out;
  out.push_back(build_network(m.overall, idx.net, table.labels, threshold, Split::overall));
  if (table.has_split()) {
    out.push_back(build_network(*m.contemporaneous, idx.net_c, table.labels, threshold, Split::contemporaneous));
    out.push_back(build_network(*m.lagged, idx.net_l, table.labels, threshold, Split::lagged));
  }
  return out;
}

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string to_dot(const SpilloverNetwork& g) {
  std::ostringstream os;
  os << "digraph " << dot_quote("spillover_" + to_string(g.split)) << " {\n";
  os << "  graph [split=" << dot_quote(to_string(g.split)) << ", threshold=" << dot_quote(number(g.threshold))
     << "];\n";
  for (const auto& n : g.nodes) {
    os << "  " << dot_quote(n.label) << " [role=" << dot_quote(to_string(n.role)) << ", net=" << dot_quote(number(n.net))
       << ", style=filled, fillcolor=" << (n.role == NodeRole::transmitter ? "blue" : "yellow") << "];\n";
  }
  for (const auto& e : g.edges) {
    os << "  " << dot_quote(e.source) << " -> " << dot_quote(e.target) << " [weight=" << dot_quote(number(e.weight))
       << ", split=" << dot_quote(to_string(e.split)) << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string to_graphml(const SpilloverNetwork& g) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
     << "  <key id=\"role\" for=\"node\" attr.name=\"role\" attr.type=\"string\"/>\n"
     << "  <key id=\"net\" for=\"node\" attr.name=\"net\" attr.type=\"double\"/>\n"
     << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
     << "  <key id=\"split\" for=\"edge\" attr.name=\"split\" attr.type=\"string\"/>\n"
     << "  <key id=\"threshold\" for=\"graph\" attr.name=\"threshold\" attr.type=\"double\"/>\n"
     << "  <graph id=\"spillover_" << to_string(g.split) << "\" edgedefault=\"directed\">\n"
     << "    <data key=\"threshold\">" << number(g.threshold) << "</data>\n";
  for (const auto& n : g.nodes) {
    os << "    <node id=\"" << xml_escape(n.label) << "\"><data key=\"role\">" << to_string(n.role)
       << "</data><data key=\"net\">" << number(n.net) << "</data></node>\n";
  }
  for (const auto& e : g.edges) {
    os << "    <edge source=\"" << xml_escape(e.source) << "\" target=\"" << xml_escape(e.target)
       << "\"><data key=\"weight\">" << number(e.weight) << "</data><data key=\"split\">" << to_string(e.split)
       << "</data></edge>\n";
  }
  os << "  </graph>\n</graphml>\n";
  return os.str();
}

std::string to_json(const SpilloverNetwork& g) {
  nlohmann::ordered_json j;
  j["split"] = to_string(g.split);
  j["threshold"] = g.threshold;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes) {
    j["nodes"].push_back({{"label", n.label}, {"role", to_string(n.role)}, {"net", n.net}});
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) {
    j["edges"].push_back({{"source", e.source}, {"target", e.target}, {"weight", e.weight}, {"split", to_string(e.split)}});
  }
  return j.dump(2) + "\n";
}

}  // namespace

std::string export_graph(const SpilloverNetwork& network, GraphFormat format) {
  switch (format) {
    case GraphFormat::json: return to_json(network);
    case GraphFormat::dot: return to_dot(network);
    case GraphFormat::graphml: return to_graphml(network);
  }
  throw std::invalid_argument("export_graph: unknown format");
}

SpilloverNetwork network_from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    SpilloverNetwork g;
    g.split = split_from_string(j.at("split").get<std::string>());
    g.threshold = j.at("threshold").get<double>();
    for (const auto& n : j.at("nodes")) {
      const auto role = n.at("role").get<std::string>();
      if (role != "transmitter" && role != "receiver") throw ParseError("unknown node role '" + role + "'");
      g.nodes.push_back({n.at("label").get<std::string>(),
                         role == "transmitter" ? NodeRole::transmitter : NodeRole::receiver, n.at("net").get<double>()});
    }
    for (const auto& e : j.at("edges")) {
      g.edges.push_back({e.at("source").get<std::string>(), e.at("target").get<std::string>(),
                         e.at("weight").get<double>(), split_from_string(e.at("split").get<std::string>())});
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("network json: ") + e.what());
  }
}

}  // namespace spill

#pragma once

// The unified kNN graph: assembly from neighbour sets, the mutual
// (reciprocated-arc) undirected variant, and deterministic exports for
// downstream tools (edge-list CSV, GraphML 1.0, GEXF 1.2).

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "viewfuse/aggregation.hpp"
#include "viewfuse/community.hpp"
#include "viewfuse/csv.hpp"
#include "viewfuse/errors.hpp"
#include "viewfuse/universe.hpp"

namespace viewfuse {

enum class GraphFormat { edgelist, graphml, gexf };

inline GraphFormat parse_graph_format(const std::string& name) {
  if (name == "edgelist") return GraphFormat::edgelist;
  if (name == "graphml") return GraphFormat::graphml;
  if (name == "gexf") return GraphFormat::gexf;
  throw_validation("unknown graph format '" + name +
                   "' (expected edgelist, graphml or gexf)");
}

inline const char* graph_format_extension(GraphFormat format) {
  switch (format) {
    case GraphFormat::edgelist: return "csv";
    case GraphFormat::graphml: return "graphml";
    case GraphFormat::gexf: return "gexf";
  }
  return "csv";
}

/// Sparse unweighted graph over the universe. Directed form: arc (i, j) iff
/// j is in i's neighbour set. Undirected (mutual) form: edge {i, j} iff both
/// arcs existed; pairs are stored (min, max). Edges are sorted by source
/// then target.
struct UnifiedGraph {
  std::vector<std::string> nodes;  // universe order
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  bool directed = true;
  int k = 0;
};

inline UnifiedGraph build_unified_graph(const NeighbourSets& sets,
                                        const UserUniverse& universe) {
  if (sets.size() != universe.size()) {
    throw_validation("neighbour sets cover " + std::to_string(sets.size()) +
                     " users but the universe has " +
                     std::to_string(universe.size()));
  }
  UnifiedGraph graph;
  graph.nodes = universe.users();
  graph.directed = true;
  graph.k = sets.k();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const std::string& subject = sets.subjects()[i];
    const std::uint32_t source =
        static_cast<std::uint32_t>(universe.index_of(subject));
    for (const auto& neighbour : sets.lists()[i]) {
      if (!universe.contains(neighbour)) {
        throw_validation("neighbour set of '" + subject +
                         "' references unknown user '" + neighbour + "'");
      }
      graph.edges.emplace_back(source,
                               static_cast<std::uint32_t>(universe.index_of(neighbour)));
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  return graph;
}

// Keeps exactly the reciprocated arcs as undirected edges; isolated nodes
// are retained.
inline UnifiedGraph mutualize(const UnifiedGraph& graph) {
  if (!graph.directed) {
    throw_validation("mutualize expects a directed graph");
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> arcs(graph.edges.begin(),
                                                         graph.edges.end());
  UnifiedGraph mutual;
  mutual.nodes = graph.nodes;
  mutual.directed = false;
  mutual.k = graph.k;
  for (const auto& [i, j] : graph.edges) {
    if (i < j && arcs.count({j, i})) {
      mutual.edges.emplace_back(i, j);
    }
  }
  std::sort(mutual.edges.begin(), mutual.edges.end());
  return mutual;
}

namespace detail {

inline std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// Comma-joined community ids of a node, empty string when unassigned.
inline std::string community_label(const std::string& node,
                                   const CommunityAssignment& assignment) {
  const std::set<std::string>* groups = assignment.communities_of(node);
  if (groups == nullptr) return "";
  std::string label;
  for (const auto& community : *groups) {
    if (!label.empty()) label += ',';
    label += community;
  }
  return label;
}

}  // namespace detail

// Deterministic, byte-stable rendering of a graph. GraphML/GEXF carry a
// string node attribute `community` only when an assignment is supplied.
inline std::string render_graph(const UnifiedGraph& graph, GraphFormat format,
                                const CommunityAssignment* communities = nullptr) {
  std::string out;
  switch (format) {
    case GraphFormat::edgelist: {
      out = "source,target\n";
      for (const auto& [i, j] : graph.edges) {
        out += graph.nodes[i];
        out += ',';
        out += graph.nodes[j];
        out += '\n';
      }
      break;
    }
    case GraphFormat::graphml: {
      out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
      out += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
      if (communities != nullptr) {
        out += "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"string\"/>\n";
      }
      out += std::string("  <graph id=\"G\" edgedefault=\"") +
             (graph.directed ? "directed" : "undirected") + "\">\n";
      for (const auto& node : graph.nodes) {
        const std::string id = detail::xml_escape(node);
        if (communities == nullptr) {
          out += "    <node id=\"" + id + "\"/>\n";
        } else {
          out += "    <node id=\"" + id + "\"><data key=\"community\">" +
                 detail::xml_escape(detail::community_label(node, *communities)) +
                 "</data></node>\n";
        }
      }
      for (const auto& [i, j] : graph.edges) {
        out += "    <edge source=\"" + detail::xml_escape(graph.nodes[i]) +
               "\" target=\"" + detail::xml_escape(graph.nodes[j]) + "\"/>\n";
      }
      out += "  </graph>\n</graphml>\n";
      break;
    }
    case GraphFormat::gexf: {
      out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
      out += "<gexf xmlns=\"http://www.gexf.net/1.2draft\" version=\"1.2\">\n";
      out += std::string("  <graph defaultedgetype=\"") +
             (graph.directed ? "directed" : "undirected") + "\">\n";
      if (communities != nullptr) {
        out += "    <attributes class=\"node\">\n";
        out += "      <attribute id=\"0\" title=\"community\" type=\"string\"/>\n";
        out += "    </attributes>\n";
      }
      out += "    <nodes>\n";
      for (const auto& node : graph.nodes) {
        const std::string id = detail::xml_escape(node);
        if (communities == nullptr) {
          out += "      <node id=\"" + id + "\" label=\"" + id + "\"/>\n";
        } else {
          out += "      <node id=\"" + id + "\" label=\"" + id +
                 "\"><attvalues><attvalue for=\"0\" value=\"" +
                 detail::xml_escape(detail::community_label(node, *communities)) +
                 "\"/></attvalues></node>\n";
        }
      }
      out += "    </nodes>\n    <edges>\n";
      std::size_t edge_id = 0;
      for (const auto& [i, j] : graph.edges) {
        out += "      <edge id=\"" + std::to_string(edge_id++) + "\" source=\"" +
               detail::xml_escape(graph.nodes[i]) + "\" target=\"" +
               detail::xml_escape(graph.nodes[j]) + "\"/>\n";
      }
      out += "    </edges>\n  </graph>\n</gexf>\n";
      break;
    }
  }
  return out;
}

inline void export_graph(const UnifiedGraph& graph, GraphFormat format,
                         const CommunityAssignment* communities,
                         const std::string& path) {
  csv::write_file(path, render_graph(graph, format, communities));
}

// Reads back an edge-list CSV as (source, target) id pairs.
inline std::vector<std::pair<std::string, std::string>> import_edgelist(
    const std::string& path) {
  auto table = csv::parse_table(csv::read_file(path), path, {"source,target"});
  std::vector<std::pair<std::string, std::string>> edges;
  edges.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row[0].empty() || row[1].empty()) {
      throw_validation(path + ":" + std::to_string(table.row_lines[r]) +
                       ": empty endpoint id");
    }
    edges.emplace_back(row[0], row[1]);
  }
  return edges;
}

}  // namespace viewfuse

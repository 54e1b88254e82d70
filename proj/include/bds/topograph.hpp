#ifndef BDS_TOPOGRAPH_HPP
#define BDS_TOPOGRAPH_HPP

#include <string>
#include <vector>

#include "bds/dynamics.hpp"
#include "bds/ktheory.hpp"

namespace bds {

enum class VertexClass : std::uint8_t { Sce, FinNotRg, Rg, Sg };
std::string vertex_class_name(VertexClass c);

/// The associated graph as a discrete labelled graph: one vertex per
/// ultrafilter, one edge per (label, ultrafilter of the label's range ideal),
/// d(e) the edge's own ultrafilter and r(e) its pullback.  On the cofinite
/// backend the vertex set is the canonical window plus the point at infinity.
struct TopoGraph {
  struct Edge {
    LabelId label;
    int src;  // d(e)
    int dst;  // r(e)
  };
  std::vector<Ultrafilter> vertices;
  std::vector<std::string> vertex_names;
  std::vector<std::string> labels;
  std::vector<Edge> edges;

  int vertex_index(const Ultrafilter& xi) const;
};

TopoGraph build_graph(const System& sys);

std::vector<VertexClass> classify_vertices(const System& sys, const TopoGraph& g);

struct BoundaryPath {
  enum class Kind : std::uint8_t { Finite, EventuallyPeriodic };
  Kind kind = Kind::Finite;
  Word prefix;    // Finite: the whole word
  Word period;    // EventuallyPeriodic only
  int terminal = -1;  // Finite: terminal singular vertex
  int anchor = -1;    // EventuallyPeriodic: vertex at the start of the period

  bool operator==(const BoundaryPath&) const = default;
};

struct BoundaryPathResult {
  bool infinite = false;  // InfinitePathSpace
  std::vector<BoundaryPath> paths;
};

/// Enumerates the boundary paths (finite paths into singular vertices plus
/// eventually periodic infinite paths) when their total number is finite and
/// at most `cap`; otherwise reports InfinitePathSpace.
BoundaryPathResult boundary_paths(const System& sys, std::size_t cap = 1000000);

/// K-groups computed from edge data alone (incidence columns over the regular
/// vertices, reduced by an elementary integer diagonalization).  Keeps an
/// independent code path from ktheory::k_groups.
KGroups graph_ktheory_oracle(const TopoGraph& g);

std::string to_dot(const TopoGraph& g, const std::vector<VertexClass>& classes);
std::string to_dot(const System& sys);

}  // namespace bds

#endif

#pragma once

// Simple undirected site graphs, their Laplacians, and the graph families
// used by the experiments (path, star, cycle, complete, 2-D lattice).

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bonabeau/matrix.hpp"
#include "bonabeau/rng.hpp"

namespace bonabeau {

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unordered vertex pair stored with u < v.
struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class GraphFamily { path, star, cycle, complete, lattice2d };
enum class Boundary { open, periodic };

GraphFamily parse_family(std::string_view name);
Boundary parse_boundary(std::string_view name);
std::string_view to_string(GraphFamily family);
std::string_view to_string(Boundary boundary);

/// Immutable simple undirected graph on vertices 0..n-1.
class SiteGraph {
 public:
  /// Builds a graph from an arbitrary edge collection. Duplicate edges
  /// collapse; self-loops and out-of-range ids throw GraphError.
  static SiteGraph from_edges(std::size_t n, std::span<const Edge> edges, std::string label = {});

  std::size_t order() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Sorted neighbor list of v.
  std::span<const std::size_t> neighbors(std::size_t v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
  bool adjacent(std::size_t u, std::size_t v) const;

  /// Short identifier used in CSV output, e.g. "star-100".
  const std::string& label() const noexcept { return label_; }

 private:
  SiteGraph() = default;

  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> adjacency_;
  std::string label_;
};

/// Standard families. Star uses vertex 0 as hub; lattice2d requires n = L*L
/// and uses 4-neighbor adjacency on a row-major L x L grid. Boundary only
/// affects lattice2d.
SiteGraph build_family(GraphFamily family, std::size_t n, Boundary boundary = Boundary::periodic);

/// Parses the edge-list text format: one "u v" pair per line, '#' starts a
/// comment line, blank lines ignored. Vertex ids must be dense 0..max.
SiteGraph from_edge_list(std::string_view text, std::string label = "edges");

SiteGraph load_edge_list(const std::string& path);

/// Dense Laplacian diag(d) - A.
DenseMatrix laplacian(const SiteGraph& g);

/// Connected components, each sorted, ordered by smallest member.
std::vector<std::vector<std::size_t>> connected_components(const SiteGraph& g);

bool is_connected(const SiteGraph& g);

/// Uniform random labelled tree on n vertices (Prufer decoding).
SiteGraph random_tree(std::size_t n, Rng& rng);

/// Random tree plus `extra_edges` attempts at adding uniformly random vertex
/// pairs (duplicates and loops are skipped). Always connected.
SiteGraph random_connected(std::size_t n, std::size_t extra_edges, Rng& rng);

/// Graph with vertex v renamed to perm[v].
SiteGraph relabel(const SiteGraph& g, std::span<const std::size_t> perm);

}  // namespace bonabeau

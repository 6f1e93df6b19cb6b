#include "bonabeau/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace bonabeau {

GraphFamily parse_family(std::string_view name) {
  if (name == "path") return GraphFamily::path;
  if (name == "star") return GraphFamily::star;
  if (name == "cycle") return GraphFamily::cycle;
  if (name == "complete") return GraphFamily::complete;
  if (name == "lattice2d") return GraphFamily::lattice2d;
  throw GraphError("unknown graph family '" + std::string(name) + "'");
}

Boundary parse_boundary(std::string_view name) {
  if (name == "open") return Boundary::open;
  if (name == "periodic") return Boundary::periodic;
  throw GraphError("unknown boundary '" + std::string(name) + "'");
}

std::string_view to_string(GraphFamily family) {
  switch (family) {
    case GraphFamily::path: return "path";
    case GraphFamily::star: return "star";
    case GraphFamily::cycle: return "cycle";
    case GraphFamily::complete: return "complete";
    case GraphFamily::lattice2d: return "lattice2d";
  }
  return "?";
}

std::string_view to_string(Boundary boundary) {
  return boundary == Boundary::open ? "open" : "periodic";
}

SiteGraph SiteGraph::from_edges(std::size_t n, std::span<const Edge> edges, std::string label) {
  if (n == 0) throw GraphError("graph must have at least one vertex");
  SiteGraph g;
  g.label_ = std::move(label);
  g.edges_.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u == e.v) throw GraphError("self-loop at vertex " + std::to_string(e.u));
    if (e.u >= n || e.v >= n) throw GraphError("edge endpoint out of range");
    g.edges_.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());

  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : g.edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  g.offsets_.assign(n + 1, 0);
  std::partial_sum(degree.begin(), degree.end(), g.offsets_.begin() + 1);
  g.adjacency_.resize(2 * g.edges_.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : g.edges_) {
    g.adjacency_[cursor[e.u]++] = e.v;
    g.adjacency_[cursor[e.v]++] = e.u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
  }
  return g;
}

bool SiteGraph::adjacent(std::size_t u, std::size_t v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

SiteGraph build_family(GraphFamily family, std::size_t n, Boundary boundary) {
  if (n == 0) throw GraphError("graph must have at least one vertex");
  std::vector<Edge> edges;
  std::string label = std::string(to_string(family)) + "-" + std::to_string(n);
  switch (family) {
    case GraphFamily::path:
      for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
      break;
    case GraphFamily::star:
      for (std::size_t i = 1; i < n; ++i) edges.push_back({0, i});
      break;
    case GraphFamily::cycle:
      for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
      if (n >= 3) edges.push_back({0, n - 1});
      break;
    case GraphFamily::complete:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j});
      break;
    case GraphFamily::lattice2d: {
      const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
      if (side * side != n) throw GraphError("lattice2d needs a perfect-square vertex count, got " + std::to_string(n));
      label += "-" + std::string(to_string(boundary));
      auto site = [side](std::size_t r, std::size_t c) { return r * side + c; };
      for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
          if (c + 1 < side) edges.push_back({site(r, c), site(r, c + 1)});
          else if (boundary == Boundary::periodic && side > 1) edges.push_back({site(r, c), site(r, 0)});
          if (r + 1 < side) edges.push_back({site(r, c), site(r + 1, c)});
          else if (boundary == Boundary::periodic && side > 1) edges.push_back({site(r, c), site(0, c)});
        }
      }
      // Wrap-around edges at side 2 duplicate interior ones; from_edges collapses them.
      break;
    }
  }
  return SiteGraph::from_edges(n, edges, std::move(label));
}

namespace {

std::size_t parse_vertex(std::string_view token, std::size_t line_no) {
  std::size_t value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw GraphError("line " + std::to_string(line_no) + ": '" + std::string(token) +
                     "' is not a non-negative integer");
  }
  return value;
}

}  // namespace

SiteGraph from_edge_list(std::string_view text, std::string label) {
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  std::size_t max_id = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty() || tokens.front().starts_with('#')) continue;
    if (tokens.size() != 2) {
      throw GraphError("line " + std::to_string(line_no) + ": expected \"u v\"");
    }
    const std::size_t u = parse_vertex(tokens[0], line_no);
    const std::size_t v = parse_vertex(tokens[1], line_no);
    if (u == v) throw GraphError("line " + std::to_string(line_no) + ": self-loop at vertex " + std::to_string(u));
    max_id = std::max({max_id, u, v});
    edges.push_back({u, v});
  }
  if (edges.empty()) throw GraphError("edge list contains no edges");

  const std::size_t n = max_id + 1;
  std::vector<bool> seen(n, false);
  for (const Edge& e : edges) seen[e.u] = seen[e.v] = true;
  for (std::size_t v = 0; v < n; ++v) {
    if (!seen[v]) throw GraphError("vertex id " + std::to_string(v) + " is missing; ids must be dense 0.." + std::to_string(max_id));
  }
  return SiteGraph::from_edges(n, edges, std::move(label));
}

SiteGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open edge list '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string stem = path.substr(path.find_last_of('/') + 1);
  if (auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0) stem.resize(dot);
  return from_edge_list(buf.str(), "edges:" + stem);
}

DenseMatrix laplacian(const SiteGraph& g) {
  DenseMatrix L(g.order());
  for (std::size_t v = 0; v < g.order(); ++v) L(v, v) = static_cast<double>(g.degree(v));
  for (const Edge& e : g.edges()) {
    L(e.u, e.v) = -1.0;
    L(e.v, e.u) = -1.0;
  }
  return L;
}

std::vector<std::vector<std::size_t>> connected_components(const SiteGraph& g) {
  std::vector<std::vector<std::size_t>> components;
  std::vector<bool> visited(g.order(), false);
  std::vector<std::size_t> stack;
  for (std::size_t root = 0; root < g.order(); ++root) {
    if (visited[root]) continue;
    std::vector<std::size_t> members;
    stack.push_back(root);
    visited[root] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (std::size_t w : g.neighbors(v)) {
        if (!visited[w]) {
          visited[w] = true;
          stack.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  return components;
}

bool is_connected(const SiteGraph& g) { return connected_components(g).size() == 1; }

SiteGraph random_tree(std::size_t n, Rng& rng) {
  if (n == 0) throw GraphError("graph must have at least one vertex");
  std::vector<Edge> edges;
  if (n == 2) edges.push_back({0, 1});
  if (n > 2) {
    std::vector<std::size_t> code(n - 2);
    for (auto& c : code) c = rng.index(n);
    std::vector<std::size_t> degree(n, 1);
    for (std::size_t c : code) ++degree[c];
    // O(n) Prufer decoding.
    std::size_t ptr = 0;
    while (degree[ptr] != 1) ++ptr;
    std::size_t leaf = ptr;
    for (std::size_t c : code) {
      edges.push_back({leaf, c});
      if (--degree[c] == 1 && c < ptr) {
        leaf = c;
      } else {
        ++ptr;
        while (degree[ptr] != 1) ++ptr;
        leaf = ptr;
      }
    }
    edges.push_back({leaf, n - 1});
  }
  return SiteGraph::from_edges(n, edges, "tree-" + std::to_string(n));
}

SiteGraph random_connected(std::size_t n, std::size_t extra_edges, Rng& rng) {
  SiteGraph tree = random_tree(n, rng);
  std::vector<Edge> edges = tree.edges();
  if (n >= 2) {
    for (std::size_t k = 0; k < extra_edges; ++k) {
      const std::size_t u = rng.index(n);
      const std::size_t v = rng.index(n);
      if (u != v) edges.push_back({u, v});
    }
  }
  return SiteGraph::from_edges(n, edges, "random-" + std::to_string(n));
}

SiteGraph relabel(const SiteGraph& g, std::span<const std::size_t> perm) {
  if (perm.size() != g.order()) throw GraphError("permutation size mismatch");
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const Edge& e : g.edges()) edges.push_back({perm[e.u], perm[e.v]});
  return SiteGraph::from_edges(g.order(), edges, g.label());
}

}  // namespace bonabeau

#include "ringhet/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ringhet {

namespace {

// Recognise an (n,m) ring so that ring-specific classification can accept
// graphs loaded from files as well as ones built by ring().
std::optional<int> detect_ring(int n, const std::vector<std::uint8_t>& adj) {
  for (int m = 1; 2 * m < n; ++m) {
    bool match = true;
    for (int a = 1; a <= n && match; ++a) {
      for (int b = 1; b <= n && match; ++b) {
        const int gap = ((b - a) % n + n) % n;
        const bool want = gap >= 1 && gap <= m;
        if (static_cast<bool>(adj[(a - 1) * n + (b - 1)]) != want) match = false;
      }
    }
    if (match) return m;
  }
  return std::nullopt;
}

}  // namespace

CouplingGraph::CouplingGraph(int n, std::vector<std::uint8_t> adj,
                             std::string label)
    : n_(n), adj_(std::move(adj)), label_(std::move(label)) {
  if (n_ < 1) throw std::invalid_argument("graph needs at least one node");
  if (adj_.size() != static_cast<std::size_t>(n_) * n_)
    throw std::invalid_argument("adjacency is not " + std::to_string(n_) + "x" +
                                std::to_string(n_));
  for (int k = 1; k <= n_; ++k)
    if (adj_[(k - 1) * n_ + (k - 1)])
      throw std::invalid_argument("self-loop at node " + std::to_string(k));
  ring_m_ = detect_ring(n_, adj_);
}

CouplingGraph CouplingGraph::ring(int n, int m) {
  if (n < 3) throw std::domain_error("ring needs n >= 3");
  if (m < 1 || 2 * m >= n)
    throw std::domain_error("ring needs 1 <= m < n/2, got m=" +
                            std::to_string(m) + " with n=" + std::to_string(n));
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
  for (int a = 1; a <= n; ++a)
    for (int d = 1; d <= m; ++d) {
      const int b = (a - 1 + d) % n + 1;  // a inhibits its m successors
      adj[(a - 1) * n + (b - 1)] = 1;
    }
  CouplingGraph g(n, std::move(adj),
                  "(" + std::to_string(n) + "," + std::to_string(m) + ")-ring");
  return g;
}

CouplingGraph CouplingGraph::from_adjacency(
    const std::vector<std::vector<bool>>& a, std::string label) {
  const int n = static_cast<int>(a.size());
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    if (a[i].size() != a.size())
      throw std::invalid_argument("adjacency matrix is not square");
    for (int j = 0; j < n; ++j) adj[i * n + j] = a[i][j] ? 1 : 0;
  }
  return CouplingGraph(n, std::move(adj), std::move(label));
}

bool CouplingGraph::inhibits(int from, int to) const {
  check_node(from);
  check_node(to);
  return adj_[(from - 1) * n_ + (to - 1)] != 0;
}

std::vector<int> CouplingGraph::inhibitors_of(int node) const {
  check_node(node);
  std::vector<int> out;
  for (int a = 1; a <= n_; ++a)
    if (adj_[(a - 1) * n_ + (node - 1)]) out.push_back(a);
  return out;
}

std::vector<int> CouplingGraph::targets_of(int node) const {
  check_node(node);
  std::vector<int> out;
  for (int b = 1; b <= n_; ++b)
    if (adj_[(node - 1) * n_ + (b - 1)]) out.push_back(b);
  return out;
}

void CouplingGraph::check_node(int node) const {
  if (node < 1 || node > n_)
    throw std::out_of_range("node " + std::to_string(node) +
                            " outside 1.." + std::to_string(n_));
}

CouplingGraph make_ring(int n, int m) { return CouplingGraph::ring(n, m); }

bool is_independent(const CouplingGraph& g, const ActiveSet& z) {
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t k = 0; k < z.size(); ++k)
      if (i != k && g.inhibits(z[i], z[k])) return false;
  return true;
}

std::vector<ActiveSet> independent_sets(const CouplingGraph& g, int node_cap) {
  const int n = g.size();
  if (n > node_cap)
    throw std::domain_error(
        "independent-set enumeration capped at " + std::to_string(node_cap) +
        " nodes (graph has " + std::to_string(n) + "); raise node_cap to force");

  // Backtracking over nodes in ascending order.  `blocked` masks nodes that
  // conflict with the current partial set in either direction.
  std::vector<ActiveSet> out;
  ActiveSet current;
  std::vector<int> blocked(n + 1, 0);

  auto extend = [&](auto&& self, int first) -> void {
    out.push_back(current);
    for (int v = first; v <= n; ++v) {
      if (blocked[v]) continue;
      current.push_back(v);
      std::vector<int> touched;
      for (int w = v + 1; w <= n; ++w)
        if (!blocked[w] && (g.inhibits(v, w) || g.inhibits(w, v))) {
          blocked[w] = 1;
          touched.push_back(w);
        }
      self(self, v + 1);
      for (int w : touched) blocked[w] = 0;
      current.pop_back();
    }
  };
  extend(extend, 1);

  std::sort(out.begin(), out.end(), [](const ActiveSet& a, const ActiveSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

SuppressionProfile suppression_profile(const CouplingGraph& g,
                                       const ActiveSet& z) {
  if (!is_independent(g, z))
    throw std::domain_error("active set is not independent");
  std::vector<bool> active(g.size() + 1, false);
  for (int a : z) {
    if (a < 1 || a > g.size())
      throw std::domain_error("active node " + std::to_string(a) +
                              " outside graph");
    active[a] = true;
  }

  SuppressionProfile profile;
  for (int b = 1; b <= g.size(); ++b) {
    if (active[b]) continue;
    int ns = 0;
    for (int a : z)
      if (g.inhibits(a, b)) ++ns;
    if (ns > 0)
      profile.suppressed.emplace(b, ns);
    else
      profile.growing.push_back(b);
  }
  return profile;
}

ActiveSet rotate_set(const ActiveSet& z, int shift, int n) {
  ActiveSet out;
  out.reserve(z.size());
  for (int a : z) out.push_back(((a - 1 + shift) % n + n) % n + 1);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ringhet

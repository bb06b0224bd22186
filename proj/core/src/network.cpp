#include "ringhet/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ringhet {

namespace {

bool size_lex_less(const ActiveSet& a, const ActiveSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

std::vector<FixedPoint> fixed_points(const CouplingGraph& g, double r,
                                     bool include_origin, int node_cap) {
  if (r <= 1.0)
    throw std::domain_error("fixed points need r > 1 (xhat = (r-1)/r <= 0)");
  const double xhat = (r - 1.0) / r;
  std::vector<FixedPoint> out;
  for (auto& z : independent_sets(g, node_cap)) {
    if (z.empty() && !include_origin) continue;
    out.push_back(FixedPoint{std::move(z), xhat, r});
  }
  return out;
}

bool saddle_condition(double r, double gamma) {
  const double xhat = (r - 1.0) / r;
  return r * std::exp(-gamma * xhat) < 1.0;
}

std::vector<NodeMultiplier> linearization_eigenvalues(const CouplingGraph& g,
                                                      const ActiveSet& z,
                                                      double r, double gamma) {
  if (r <= 1.0) throw std::domain_error("linearisation needs r > 1");
  if (gamma < 0.0) throw std::domain_error("inhibition strength must be >= 0");
  const double xhat = (r - 1.0) / r;
  const auto profile = suppression_profile(g, z);

  std::vector<NodeMultiplier> out;
  out.reserve(g.size());
  for (int a : z) out.push_back({a, NodeRole::Active, 2.0 - r});
  for (auto [node, ns] : profile.suppressed)
    out.push_back({node, NodeRole::Suppressed,
                   r * std::exp(-static_cast<double>(ns) * gamma * xhat)});
  for (int node : profile.growing) out.push_back({node, NodeRole::Growing, r});
  std::sort(out.begin(), out.end(),
            [](const NodeMultiplier& a, const NodeMultiplier& b) {
              return a.node < b.node;
            });
  return out;
}

std::vector<Connection> connections_from(const CouplingGraph& g,
                                         const ActiveSet& z, double r,
                                         double gamma) {
  if (!saddle_condition(r, gamma))
    throw std::domain_error(
        "saddle condition r e^{-gamma xhat} < 1 fails: connections are only "
        "defined when suppressed directions contract");
  const auto profile = suppression_profile(g, z);

  std::vector<Connection> out;
  for (int b : profile.growing) {
    Connection c;
    c.source_set = z;
    c.entering = b;
    for (int a : z)
      if (g.inhibits(b, a)) c.displaced.push_back(a);
    c.target_set = z;
    c.target_set.erase(
        std::remove_if(c.target_set.begin(), c.target_set.end(),
                       [&](int a) {
                         return std::find(c.displaced.begin(),
                                          c.displaced.end(),
                                          a) != c.displaced.end();
                       }),
        c.target_set.end());
    c.target_set.push_back(b);
    std::sort(c.target_set.begin(), c.target_set.end());
    out.push_back(std::move(c));
  }
  return out;
}

int HetNetwork::index_of(const ActiveSet& z) const {
  auto it = std::lower_bound(
      fixed_points.begin(), fixed_points.end(), z,
      [](const FixedPoint& fp, const ActiveSet& want) {
        return size_lex_less(fp.active, want);
      });
  if (it == fixed_points.end() || it->active != z) return -1;
  return static_cast<int>(it - fixed_points.begin());
}

HetNetwork build_network(const CouplingGraph& g, double r, double gamma,
                         int node_cap) {
  HetNetwork net{g, r, gamma, fixed_points(g, r, false, node_cap), {}, {}, {}};
  net.out_edges.resize(net.fixed_points.size());

  for (std::size_t i = 0; i < net.fixed_points.size(); ++i) {
    auto conns = connections_from(g, net.fixed_points[i].active, r, gamma);
    for (auto& c : conns) {
      c.source = static_cast<int>(i);
      c.target = net.index_of(c.target_set);
      if (c.target < 0)
        throw std::logic_error("connection target " + to_string(c.target_set) +
                               " is not a fixed point");
      net.out_edges[i].push_back(static_cast<int>(net.connections.size()));
      net.connections.push_back(std::move(c));
    }
    // deterministic neighbour order for cycle enumeration
    std::sort(net.out_edges[i].begin(), net.out_edges[i].end(),
              [&](int a, int b) {
                return net.connections[a].target < net.connections[b].target;
              });
    if (net.out_edges[i].empty()) net.sinks.push_back(static_cast<int>(i));
  }
  return net;
}

std::vector<CycleDescriptor> enumerate_cycles(const HetNetwork& net,
                                              int max_len, long budget) {
  const int n_fp = static_cast<int>(net.fixed_points.size());
  const int bound = max_len > 0 ? max_len : n_fp;

  std::vector<std::vector<int>> rev(n_fp);
  for (const auto& c : net.connections) rev[c.target].push_back(c.source);

  std::vector<CycleDescriptor> out;
  std::vector<char> in_scc(n_fp, 0), mark(n_fp, 0), blocked(n_fp, 0);
  std::vector<std::vector<int>> blist(n_fp);
  std::vector<int> path, conn_path, queue;

  auto record = [&](int closing_cid) {
    if (static_cast<long>(out.size()) >= budget)
      throw std::runtime_error("cycle budget of " + std::to_string(budget) +
                               " exceeded; raise the budget or bound the "
                               "length");
    conn_path.push_back(closing_cid);
    CycleDescriptor c;
    c.path = path;
    c.connections = conn_path;
    out.push_back(std::move(c));
    conn_path.pop_back();
  };

  // Bounded search: plain anchored path-DFS.  The depth cap makes the
  // blocked-set bookkeeping below unsound (a vertex may fail only because
  // the prefix was too long), and also caps the blowup it exists to stop.
  auto bounded_dfs = [&](auto&& self, int start, int v) -> void {
    blocked[v] = 1;
    path.push_back(v);
    for (int cid : net.out_edges[v]) {
      const int w = net.connections[cid].target;
      if (!in_scc[w]) continue;
      if (w == start) {
        record(cid);
      } else if (!blocked[w] && static_cast<int>(path.size()) < bound) {
        conn_path.push_back(cid);
        self(self, start, w);
        conn_path.pop_back();
      }
    }
    path.pop_back();
    blocked[v] = 0;
  };

  // Unbounded search: blocked-set enumeration.  A vertex whose subtree
  // yielded no cycle stays blocked until some ancestor finds one, so dead
  // regions are never re-walked and the cost stays proportional to the
  // number of cycles reported.
  auto unblock = [&](auto&& self, int v) -> void {
    if (!blocked[v]) return;
    blocked[v] = 0;
    for (int u : blist[v]) self(self, u);
    blist[v].clear();
  };
  auto blocked_dfs = [&](auto&& self, int start, int v) -> bool {
    bool found = false;
    blocked[v] = 1;
    path.push_back(v);
    for (int cid : net.out_edges[v]) {
      const int w = net.connections[cid].target;
      if (!in_scc[w]) continue;
      if (w == start) {
        record(cid);
        found = true;
      } else if (!blocked[w]) {
        conn_path.push_back(cid);
        if (self(self, start, w)) found = true;
        conn_path.pop_back();
      }
    }
    if (found) {
      unblock(unblock, v);
    } else {
      for (int cid : net.out_edges[v]) {
        const int w = net.connections[cid].target;
        if (!in_scc[w] || w == start) continue;
        auto& b = blist[w];
        if (std::find(b.begin(), b.end(), v) == b.end()) b.push_back(v);
      }
    }
    path.pop_back();
    return found;
  };

  // Each simple cycle is found exactly once, anchored at its smallest
  // fixed-point index: the search from `start` runs inside start's strongly
  // connected component within the subgraph of indices >= start.  The
  // restriction matters -- these networks are level-layered, so an
  // unrestricted path walk drifts into regions that cannot reach `start`
  // and turns exponential long before any cycle closes.
  for (int start = 0; start < n_fp; ++start) {
    queue.assign(1, start);
    mark[start] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (int cid : net.out_edges[queue[head]]) {
        const int w = net.connections[cid].target;
        if (w >= start && !mark[w]) {
          mark[w] = 1;
          queue.push_back(w);
        }
      }
    const std::vector<int> forward = std::move(queue);

    queue.assign(1, start);
    in_scc[start] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (int u : rev[queue[head]])
        if (u >= start && mark[u] && !in_scc[u]) {
          in_scc[u] = 1;
          queue.push_back(u);
        }
    const std::vector<int> component = std::move(queue);

    bool closes = false;
    for (int cid : net.out_edges[start])
      closes = closes || net.connections[cid].target == start ||
               (net.connections[cid].target > start &&
                in_scc[net.connections[cid].target]);
    if (closes) {
      if (max_len > 0)
        bounded_dfs(bounded_dfs, start, start);
      else
        blocked_dfs(blocked_dfs, start, start);
    }

    for (int v : forward) mark[v] = 0;
    for (int v : component) {
      in_scc[v] = 0;
      blocked[v] = 0;
      blist[v].clear();
    }
  }

  for (auto& c : out) {
    const auto sizes_equal = std::all_of(
        c.path.begin(), c.path.end(), [&](int i) {
          return net.fixed_points[i].active.size() ==
                 net.fixed_points[c.path.front()].active.size();
        });
    c.active_count =
        sizes_equal
            ? static_cast<int>(net.fixed_points[c.path.front()].active.size())
            : -1;
    if (net.graph.ring_m()) c = classify_symmetric(net, std::move(c));
  }

  std::sort(out.begin(), out.end(),
            [](const CycleDescriptor& a, const CycleDescriptor& b) {
              if (a.path.size() != b.path.size())
                return a.path.size() < b.path.size();
              return a.path < b.path;
            });
  return out;
}

CycleDescriptor classify_symmetric(const HetNetwork& net,
                                   CycleDescriptor cycle) {
  if (!net.graph.ring_m())
    throw std::domain_error("symmetry classification needs a ring graph");
  const int n = net.graph.size();

  cycle.symmetric = false;
  cycle.symmetry_class = SymmetryClass::None;
  cycle.parameter = 0;
  cycle.rotation = 0;

  const auto set_of = [&](std::size_t k) -> const ActiveSet& {
    return net.fixed_points[cycle.path[k]].active;
  };

  // constant active count required
  const std::size_t len = cycle.path.size();
  if (len == 0) return cycle;
  const int j = static_cast<int>(set_of(0).size());
  for (std::size_t k = 0; k < len; ++k) {
    if (static_cast<int>(set_of(k).size()) != j) {
      cycle.active_count = -1;
      return cycle;
    }
  }
  cycle.active_count = j;

  // one rotation sigma^M must carry each set to its successor, cyclically
  int rotation = 0;
  for (int m = 1; m < n && rotation == 0; ++m) {
    bool ok = true;
    for (std::size_t k = 0; k < len && ok; ++k)
      ok = rotate_set(set_of(k), m, n) == set_of((k + 1) % len);
    if (ok) rotation = m;
  }
  if (rotation == 0) return cycle;

  if (j == 1) {
    cycle.symmetric = true;
    cycle.symmetry_class = SymmetryClass::SingleNode;
    cycle.rotation = rotation;
    return cycle;
  }

  // Count conditions: n = p*j + 1 (one wider spacing) or n = s*j - 1 (one
  // narrower).  For j = 2 both always hold and the two descriptions are the
  // same object; the p = 2 family (the one whose transition matrix has no
  // growing rows) keeps the first label, everything else the second.
  const bool case_i = (n - 1) % j == 0 && (n - 1) / j >= 2;
  const bool case_ii = (n + 1) % j == 0 && (n + 1) / j >= 3;
  if (case_i && (!case_ii || (n - 1) / j == 2)) {
    cycle.symmetric = true;
    cycle.symmetry_class = SymmetryClass::CaseI;
    cycle.parameter = (n - 1) / j;
    cycle.rotation = rotation;
  } else if (case_ii) {
    cycle.symmetric = true;
    cycle.symmetry_class = SymmetryClass::CaseII;
    cycle.parameter = (n + 1) / j;
    cycle.rotation = rotation;
  }
  return cycle;
}

MaximallyActive maximally_active(const CouplingGraph& g) {
  const auto m = g.ring_m();
  if (!m) throw std::domain_error("maximally-active census needs a ring graph");
  const int n = g.size();
  MaximallyActive out{};
  out.j_max = n / (*m + 1);
  out.p = n % (*m + 1);
  out.kind = out.p == 0   ? MaximallyActive::Kind::AllSinks
             : out.p == 1 ? MaximallyActive::Kind::SingleCycle
                          : MaximallyActive::Kind::Network;
  return out;
}

std::string to_string(const ActiveSet& z) {
  std::string s = "xi_{";
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(z[i]);
  }
  return s + "}";
}

}  // namespace ringhet

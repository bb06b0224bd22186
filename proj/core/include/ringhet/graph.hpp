#pragma once

// Inhibition digraphs for coupled logistic-map networks.
//
// A graph on nodes 1..n is stored as a boolean adjacency matrix A where
// A(a,b) = true means "a inhibits b".  The (n,m) ring has node k inhibited
// by its m cyclic predecessors k-1, ..., k-m, so A(a,b) = [ (b-a) mod n is
// in 1..m ].  Active sets of the associated dynamics are exactly the
// independent sets of this digraph (no member inhibits another member).
//
// Node indices are 1-based everywhere in the public interface.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ringhet {

// Sorted list of active node indices (1-based).  An empty set is valid and
// denotes the origin.
using ActiveSet = std::vector<int>;

// Enumeration beyond this many nodes is refused unless the caller raises
// the cap explicitly: the independent-set count grows like phi^n.
inline constexpr int kDefaultNodeCap = 24;

class CouplingGraph {
 public:
  // Adjacency given row-major, adj[(a-1)*n + (b-1)] != 0 meaning a inhibits b.
  // Throws std::invalid_argument on size mismatch or a self-loop.
  CouplingGraph(int n, std::vector<std::uint8_t> adj, std::string label = "");

  // The (n,m) ring; requires n >= 3 and 1 <= m < n/2 (std::domain_error).
  static CouplingGraph ring(int n, int m);

  // Square bool matrix, same validation as the main constructor.
  static CouplingGraph from_adjacency(const std::vector<std::vector<bool>>& a,
                                      std::string label = "");

  int size() const { return n_; }
  bool inhibits(int from, int to) const;

  std::vector<int> inhibitors_of(int node) const;  // sorted
  std::vector<int> targets_of(int node) const;     // sorted

  // Set when the adjacency is exactly an (n,m) ring (whether built via
  // ring() or recognised in a user-supplied matrix).
  std::optional<int> ring_m() const { return ring_m_; }

  const std::string& label() const { return label_; }

 private:
  void check_node(int node) const;

  int n_;
  std::vector<std::uint8_t> adj_;
  std::optional<int> ring_m_;
  std::string label_;
};

CouplingGraph make_ring(int n, int m);

bool is_independent(const CouplingGraph& g, const ActiveSet& z);

// All independent sets including the empty one, sorted by size then
// lexicographically.  Throws std::domain_error when g.size() > node_cap.
std::vector<ActiveSet> independent_sets(const CouplingGraph& g,
                                        int node_cap = kDefaultNodeCap);

// Partition of the non-active nodes relative to an independent set z:
// a node is suppressed when at least one of its inhibitors is active
// (n_s counts them), growing otherwise.
struct SuppressionProfile {
  std::map<int, int> suppressed;  // node -> suppression number n_s >= 1
  std::vector<int> growing;       // sorted
};

// Throws std::domain_error when z is not independent in g.
SuppressionProfile suppression_profile(const CouplingGraph& g,
                                       const ActiveSet& z);

// Image of z under the cyclic shift by `shift` (node k -> k+shift mod n).
ActiveSet rotate_set(const ActiveSet& z, int shift, int n);

}  // namespace ringhet

#pragma once

// Fixed points of the inhibition-coupled logistic network and the
// heteroclinic connections between them.
//
// Every independent set Z of the coupling graph gives a fixed point with the
// active nodes at xhat = (r-1)/r and the rest at 0.  When the suppression is
// strong enough to make every suppressed direction contracting
// (r e^{-gamma xhat} < 1), the unstable directions of such a saddle are its
// growing nodes, and each growing node b induces exactly one connection:
//
//   - b displaces the active nodes it inhibits (Z_minus = Z intersect
//     targets(b)), landing on Z u {b} \ Z_minus, or
//   - extends the set to Z u {b} when it inhibits no active node.
//
// The directed graph of all fixed points and connections is the heteroclinic
// network; its simple cycles are candidate heteroclinic cycles.

#include <string>
#include <vector>

#include "ringhet/graph.hpp"

namespace ringhet {

struct FixedPoint {
  ActiveSet active;  // sorted, independent
  double xhat;       // (r-1)/r
  double r;
};

// Requires r > 1 (xhat must be positive).  Origin (empty set) is excluded
// unless asked for; sets come sorted by size then lexicographically.
std::vector<FixedPoint> fixed_points(const CouplingGraph& g, double r,
                                     bool include_origin = false,
                                     int node_cap = kDefaultNodeCap);

enum class NodeRole { Active, Suppressed, Growing };

struct NodeMultiplier {
  int node;
  NodeRole role;
  double value;  // linearisation multiplier of the map at the fixed point
};

// Per-node multipliers at xi_Z: active 2-r, suppressed r e^{-n_s gamma xhat},
// growing r.  Ordered by node index.
std::vector<NodeMultiplier> linearization_eigenvalues(const CouplingGraph& g,
                                                      const ActiveSet& z,
                                                      double r, double gamma);

// True when every suppressed direction contracts: r e^{-gamma xhat} < 1.
bool saddle_condition(double r, double gamma);

struct Connection {
  ActiveSet source_set, target_set;
  int entering;        // the growing node b driving the transition
  ActiveSet displaced; // active nodes it knocks out (Z_minus, possibly empty)
  int source = -1;     // indices into HetNetwork::fixed_points once built
  int target = -1;
};

// All connections leaving xi_z.  Throws std::domain_error when z is not
// independent or the saddle condition fails for (r, gamma).
std::vector<Connection> connections_from(const CouplingGraph& g,
                                         const ActiveSet& z, double r,
                                         double gamma);

struct HetNetwork {
  CouplingGraph graph;
  double r = 0, gamma = 0;
  std::vector<FixedPoint> fixed_points;       // sorted by size then lex
  std::vector<Connection> connections;        // grouped by source index
  std::vector<std::vector<int>> out_edges;    // fixed point -> connection ids
  std::vector<int> sinks;                     // fixed points with no exits

  int index_of(const ActiveSet& z) const;     // -1 when absent
};

HetNetwork build_network(const CouplingGraph& g, double r, double gamma,
                         int node_cap = kDefaultNodeCap);

enum class SymmetryClass { SingleNode, CaseI, CaseII, None };

struct CycleDescriptor {
  std::vector<int> path;         // fixed-point indices, starts at the smallest
  std::vector<int> connections;  // connections[k]: path[k] -> path[k+1 mod L]
  int active_count = -1;         // constant active-set size, -1 when varying
  bool symmetric = false;        // consecutive sets related by one sigma^M
  SymmetryClass symmetry_class = SymmetryClass::None;
  int parameter = 0;             // p (CaseI) or s (CaseII)
  int rotation = 0;              // the shift M, 0 when not symmetric
};

// Simple cycles of the network, each reported from its smallest fixed-point
// index, ordered by length then lexicographic path.  max_len = 0 means
// unbounded.  Throws std::runtime_error when more than `budget` cycles exist.
std::vector<CycleDescriptor> enumerate_cycles(const HetNetwork& net,
                                              int max_len = 0,
                                              long budget = 100000);

// Fills the symmetry fields of a cycle.  Requires the underlying graph to be
// an (n,m) ring (std::domain_error otherwise).  Symmetry demands both the
// sigma^M relation between consecutive sets and, for the class label, the
// matching count condition on (n, j).
CycleDescriptor classify_symmetric(const HetNetwork& net,
                                   CycleDescriptor cycle);

struct MaximallyActive {
  enum class Kind { AllSinks, SingleCycle, Network };
  int j_max;   // floor(n / (m+1))
  Kind kind;   // by n mod (m+1): 0 sinks, 1 one cycle, else network
  int p;       // n mod (m+1); unstable-manifold dimension when Kind::Network
};

// Requires a ring graph.
MaximallyActive maximally_active(const CouplingGraph& g);

std::string to_string(const ActiveSet& z);  // "xi_{1,3}" style label

}  // namespace ringhet

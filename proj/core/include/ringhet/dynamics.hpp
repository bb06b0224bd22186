#pragma once

// Time-stepped integration of the coupled-map dynamics and the epoch-level
// observables built on top of it. A trajectory in the cycling regime spends
// long stretches ("epochs") near one fixed point of the network; each epoch
// ends when the next node's coordinate crosses a threshold theta on the way
// up. Per epoch we record the duration, the log-depth reached by the node
// that ends it (its "valley"), and which fixed point was being shadowed.
//
// Two integrators are provided. The plain one iterates the map in x-space
// doubles and is faithful to what a straightforward implementation observes,
// including gradual loss of the smallest components to underflow. The
// log-domain one advances X = log x and keeps exponentially small
// coordinates exact across arbitrarily deep valleys (exact zeros are
// represented as -inf and preserved); it exists because valley depths grow
// geometrically and leave the range of double after a handful of epochs.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringhet/graph.hpp"
#include "ringhet/network.hpp"
#include "ringhet/stability.hpp"

namespace ringhet {

struct SimParams {
  double r = 2.0;
  double gamma = 3.04;
  long steps = 100000;
  double theta = -1.0;  // crossing threshold; negative selects xhat/2
  std::optional<double> floor;  // clamp components below this when set
  bool log_domain = false;
  int stop_after_crossings = 0;  // stop once this many upward crossings
                                 // occurred; 0 runs the full step budget

  double resolved_theta() const {
    return theta >= 0.0 ? theta : 0.5 * (r - 1.0) / r;
  }
};

struct Trajectory {
  std::vector<Eigen::VectorXd> states;      // x-space, states[0] = initial
  std::vector<Eigen::VectorXd> log_states;  // filled by log-domain runs
  std::vector<std::string> warnings;
  bool aborted = false;  // a non-finite value appeared; recording stopped
};

// One application of the map to an x-space state (all components in [0,1]).
Eigen::VectorXd step(const CouplingGraph& g, const Eigen::VectorXd& x,
                     double r, double gamma);

// The same map on X = log x (components in [-inf, 0]); -inf stays -inf.
Eigen::VectorXd log_step(const CouplingGraph& g, const Eigen::VectorXd& X,
                         double r, double gamma);

// Iterate for params.steps applications (or until the crossing budget is
// hit), recording every state. Memory grows as steps * n; for long runs use
// simulate_epochs, which keeps only per-epoch summaries.
Trajectory simulate(const CouplingGraph& g, const Eigen::VectorXd& x0,
                    const SimParams& params);

struct Epoch {
  long boundary;  // step index of the upward crossing closing this epoch
  long duration;  // steps since the previous crossing
  double valley;  // log-depth minimum of the crossing component
  int shadow;     // fixed-point index shadowed mid-epoch, -1 if off-network
};

struct EpochSeries {
  std::vector<Epoch> epochs;
  double theta = 0.0;
  long crossings = 0;  // boundaries seen; epochs.size() is crossings - 1
  std::vector<std::string> warnings;
};

// Run the dynamics without recording states, accumulating epoch summaries
// online. The network supplies structure for shadow snapping only; dynamics
// parameters come from params (callers keep the two consistent).
EpochSeries simulate_epochs(const HetNetwork& net, const Eigen::VectorXd& x0,
                            const SimParams& params);

// The same reduction applied to a recorded trajectory. Throws
// std::runtime_error when fewer than two crossings exist (insufficient data).
EpochSeries extract_epochs(const Trajectory& t, const HetNetwork& net,
                           double theta);

// Initial condition near a fixed point: active nodes sit at xhat, every
// other node gets an independent uniform draw from [0, epsilon). Requires
// 0 <= epsilon < xhat/10; epsilon = 0 returns the fixed point exactly.
Eigen::VectorXd perturbed_ic(const HetNetwork& net, int fixed_point,
                             double epsilon, std::uint64_t seed);

// Initial condition aligned with one eigenvector of a cycle's transition
// matrix: tracked nodes are placed at log-depths scale * v (v rescaled so
// its largest entry is 1, so scale sets the deepest coordinate), the active
// nodes and the still-decaying node at xhat. Requires scale < 0 and a real
// eigenvector with entries of one sign; throws std::domain_error otherwise.
Eigen::VectorXd eigenvector_ic(const HetNetwork& net,
                               const CycleDescriptor& cycle,
                               const TransitionMatrix& M, int which_eig,
                               double scale);

// The same layout with the tracked log-depths given explicitly: active
// nodes of the cycle's base fixed point at xhat, the node displaced by the
// incoming connection at xhat, and coordinate M.basis[i] at exp(logs[i]).
// Every log must be negative.
Eigen::VectorXd cycle_ic_from_logs(const HetNetwork& net,
                                   const CycleDescriptor& cycle,
                                   const TransitionMatrix& M,
                                   const Eigen::VectorXd& logs);

// Eigenvector alignment with the epoch map's affine structure compensated.
// The per-epoch action on log-coordinates is really X_{k+1} = M X_k + b:
// the constant b collects the O(1) entry corrections (threshold height,
// integer epoch lengths) that the linear model absorbs into its fixed point
// X* = (I - M)^{-1} b.  An IC aligned with an eigenvector of M alone
// therefore seeds the other modes with amplitude ~|X*| and an unstable
// cycle is lost several epochs early.  This variant measures b from
// consecutive boundary states of a short pilot run and recenters the
// tracked depths at exp(X* + scale * v); when the complementary modes form
// a single complex pair it additionally cancels the oscillation they seed,
// by probing two directions of the oscillatory plane at the target depth
// and solving for the shift that zeroes the measured amplitude.  Requires a
// symmetric cycle whose per-epoch matrix is constant (M.epochs == 1).
Eigen::VectorXd aligned_eigenvector_ic(const HetNetwork& net,
                                       const CycleDescriptor& cycle,
                                       const TransitionMatrix& M,
                                       int which_eig, double scale);

// Least-squares decomposition of a valley sequence into a real-geometric
// term plus an oscillating envelope,
//   X_k ~ c1 * lambda2^k + c2 * |lambda1|^k * cos(k * arg(lambda1) + c3).
struct FitResult {
  double lambda2 = 0.0;
  double lambda1_mod = 0.0, lambda1_arg = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double rms = 0.0;               // residual of the three-term model
  double rms_pure_lambda2 = 0.0;  // residual of the best c1-only fit
  bool c3_identifiable = true;    // false when c2 is too small to carry a phase
  bool degenerate = false;        // regressors were rank-deficient
  int points = 0;
};

FitResult fit_decay(const std::vector<double>& valleys,
                    std::complex<double> lambda1, double lambda2);

// Geometric-mean growth of epoch durations over the trailing half of the
// series; requires at least four epochs.
struct EpochGrowthRate {
  double rate = 0.0;
  bool high_variance = false;
};

EpochGrowthRate epoch_growth_rate(const EpochSeries& s);

// Decorrelated per-run seed derived from a master seed (splitmix64 step).
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t run);

}  // namespace ringhet

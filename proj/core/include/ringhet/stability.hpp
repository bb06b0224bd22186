// Stability analysis of heteroclinic cycles via epoch-to-epoch transition
// matrices in logarithmic coordinates.
//
// Near a cycle the trajectory spends an epoch beside each fixed point; with
// X = log x for the small components, one epoch acts linearly: the epoch
// length is T = -X_e/log r (X_e = the entering component's log at epoch
// start), growing coordinates gain -X_e, a coordinate suppressed by n_s
// active inhibitors gains (n_s*(delta+1) - 1)*X_e, and the freshly displaced
// node re-enters the tracked set at log ~ 0.  Collecting q = n-j-1 tracked
// coordinates per epoch gives a q x q matrix M whose dominant eigenpair
// decides stability: the cycle attracts a positive-measure set iff
// lambda_max is real, exceeds 1, and its eigenvector has strictly one-signed
// entries (podvigina_check).  For the rotation-symmetric cycles of ring
// graphs M takes the closed form built by transition_matrix_symmetric, whose
// characteristic polynomial
//
//   P(lambda) = lambda^q + ... + lambda^j - delta*(lambda^{j-1} + ... + 1)
//
// yields the closed-form threshold delta* = (q+1-j)/j: for q = j the cycle
// is stable iff delta > delta*, and for q > j it is never stable
// (theorem_verdict).  classify_roots verifies the root layout of P
// numerically: a unique positive real root r_plus, and a case split on the
// parities of j and q for which root dominates.

#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringhet/network.hpp"

namespace ringhet {

// delta = gamma*xhat/log(r) - 1; positive exactly when the saddle condition
// r*exp(-gamma*xhat) < 1 holds.
struct Delta {
  double value = 0.0;
  double r = 0.0;
  double gamma = 0.0;
  bool saddle = false;  // value > 0
};

// Analytic-mode parameter map; requires r in (1, 3] so that xhat is a stable
// logistic fixed point, and gamma >= 0.
Delta delta_from(double r, double gamma);

enum class RowRole { Growing, Decaying };

// Epoch-to-epoch linear map on the q tracked log-coordinates.
struct TransitionMatrix {
  Eigen::MatrixXd entries;            // q x q
  int j = 0;                          // active nodes of the cycle
  int q = 0;                          // tracked coordinates = n - j - 1
  int epochs = 1;                     // epochs the map spans; 1 when the
                                      // per-epoch map is constant, in which
                                      // case the full cycle is its power
  std::vector<RowRole> row_roles;     // per-row tag, single-epoch maps only
  std::vector<int> basis;             // node ids of the input coordinates,
                                      // empty for the abstract symmetric form
};

// The symmetric-cycle matrix: first column is L = q-j entries of -1 followed
// by j entries of delta, superdiagonal all 1, zero elsewhere.
TransitionMatrix transition_matrix_symmetric(int j, int q, double delta);

// Per-epoch construction for a concrete cycle of the network: coordinates
// are tracked by node identity, input components ordered by upcoming
// activation order.  Symmetric cycles yield their constant per-epoch matrix
// (epochs = 1); other cycles yield the composition over the whole loop.
// Cycles with varying active count or a connection displacing more than one
// node are rejected (invalid_argument).
TransitionMatrix transition_matrix_for_cycle(const HetNetwork& net,
                                             const CycleDescriptor& cycle,
                                             const Delta& delta);

// Coefficients of P(lambda) in descending powers, monic, size q+1.
std::vector<double> char_poly(int j, int q, double delta);

// All roots of a monic real polynomial (descending coefficients), via the
// companion matrix plus one Newton polish per root.  Sorted by descending
// magnitude, ties by ascending argument.  Roots whose residual exceeds the
// tolerance trigger a numeric error carrying the best iterate.
std::vector<std::complex<double>> roots(const std::vector<double>& coeffs);

enum class CheckStatus {
  Decided,    // dominant eigenpair cleanly inside/outside the unit circle
  Resonant,   // |lambda_max| within tolerance of 1: out of the criterion's
              // hypothesis, verdict not meaningful
};

struct StabilityReport {
  int j = 0;
  int q = 0;
  double delta = std::numeric_limits<double>::quiet_NaN();
  double delta_star = 0.0;
  std::complex<double> lambda_max{0.0, 0.0};
  Eigen::VectorXd v_max;              // size 0 when absent (complex dominant)
  bool fas = false;                   // spectral verdict (podvigina_check)
  CheckStatus status = CheckStatus::Decided;
  bool theorem_applicable = false;    // closed form evaluated
  bool theorem_verdict = false;       // q == j and delta > delta_star
  std::optional<double> gamma_star;   // gamma threshold when (n, r) known
  std::vector<std::complex<double>> roots;  // eigenvalues, desc magnitude
  std::optional<bool> agreement;      // fas == theorem_verdict, when both run
};

// Spectral stability test on the dominant eigenpair of M: attracting iff
// lambda_max is real, > 1, and the eigenvector is strictly one-signed.  A
// magnitude tie with a complex root within eps fails the realness condition;
// |lambda_max| within eps of 1 reports Resonant instead of a verdict.
StabilityReport podvigina_check(const TransitionMatrix& M);

// Closed-form verdict: delta_star = (q+1-j)/j, stable iff q == j and
// delta > delta_star.  The (n, r) overload also reports the equivalent
// threshold gamma* = (log r/xhat)*(n-j)/j.
StabilityReport theorem_verdict(int j, int q, double delta);
StabilityReport theorem_verdict(int j, int q, double delta, int n, double r);

// gamma* alone: the coupling strength above which delta > delta_star for the
// symmetric cycle with j active nodes on n nodes.
double gamma_star(int n, int j, double r);

// Both checks on the symmetric matrix, with the agreement flag filled in.
StabilityReport symmetric_cycle_report(int j, int q, double delta);
StabilityReport symmetric_cycle_report(int j, int q, double delta, int n,
                                       double r);

// Closed-form dominant eigenvector for q = j: entry i >= 1 equals
// (delta/rho) * sum_{k=0}^{j-i-1} rho^{-k} with rho = r_plus, entry 0 = 1.
Eigen::VectorXd vmax_closed_form(int j, double delta, double r_plus);

// Numeric verification of the root layout of P(lambda) for delta > 0.
struct RootStructure {
  int j = 0;
  int q = 0;
  double delta = 0.0;
  double delta_star = 0.0;
  std::vector<std::complex<double>> root_list;  // desc magnitude
  double r_plus = 0.0;
  int positive_real_count = 0;     // must be exactly 1
  bool dominant_real_negative = false;
  int strictly_inside = 0;         // |lambda| < r_plus, dominant excluded
  int strictly_outside = 0;        // |lambda| > r_plus
  int inside_real_negative = 0;    // real negative roots strictly inside
  double max_residual = 0.0;
  bool conforms = false;
  std::vector<std::string> violations;
};

RootStructure classify_roots(int j, int q, double delta);

// Grid evaluation of theorem vs spectral verdicts (q = j(p-1)); cells within
// the exclusion band of delta_star are skipped.
struct SweepCell {
  int j = 0;
  int p = 0;
  int q = 0;
  double delta = 0.0;
  double delta_star = 0.0;
  bool fas = false;
  bool theorem = false;
  bool agreement = false;
  CheckStatus status = CheckStatus::Decided;
};

std::vector<SweepCell> sweep_grid(const std::vector<int>& js,
                                  const std::vector<int>& ps,
                                  const std::vector<double>& deltas,
                                  double exclusion_band = 0.05,
                                  int jobs = 1);

}  // namespace ringhet

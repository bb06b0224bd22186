#include "ringhet/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>

namespace ringhet {

namespace {

constexpr double kTieTolerance = 1e-9;      // eigenvalue magnitude ties
constexpr double kRealTolerance = 1e-9;     // |Im| below this (relative) is real
constexpr double kEntryTolerance = 1e-9;    // eigenvector entries below are zero
constexpr double kResidualTolerance = 1e-10;

double xhat_of(double r) { return (r - 1.0) / r; }

// decay gain per epoch for a coordinate suppressed by n_s active inhibitors
double delta_ns(int ns, double delta) { return ns * (delta + 1.0) - 1.0; }

std::complex<double> horner(const std::vector<double>& coeffs,
                            std::complex<double> z) {
  std::complex<double> p{0.0, 0.0};
  for (double c : coeffs) p = p * z + c;
  return p;
}

std::complex<double> horner_derivative(const std::vector<double>& coeffs,
                                       std::complex<double> z) {
  std::complex<double> p{0.0, 0.0}, dp{0.0, 0.0};
  for (double c : coeffs) {
    dp = dp * z + p;
    p = p * z + c;
  }
  return dp;
}

bool is_real(const std::complex<double>& z) {
  return std::abs(z.imag()) <= kRealTolerance * std::max(1.0, std::abs(z));
}

// descending magnitude; magnitude ties by |arg| ascending, then positive
// argument first, so conjugate pairs sit adjacent with +Im leading
void sort_by_magnitude(std::vector<std::complex<double>>& zs) {
  std::sort(zs.begin(), zs.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (std::abs(ma - mb) > 1e-12 * std::max(1.0, std::max(ma, mb)))
      return ma > mb;
    const double aa = std::abs(std::arg(a)), ab = std::abs(std::arg(b));
    if (std::abs(aa - ab) > 1e-12) return aa < ab;
    return std::arg(a) > std::arg(b);
  });
}

}  // namespace

Delta delta_from(double r, double gamma) {
  if (!(r > 1.0) || !(r <= 3.0))
    throw std::domain_error(
        "delta_from: r must lie in (1, 3] for the analytic regime");
  if (!(gamma >= 0.0))
    throw std::domain_error("delta_from: gamma must be non-negative");
  Delta d;
  d.r = r;
  d.gamma = gamma;
  d.value = gamma * xhat_of(r) / std::log(r) - 1.0;
  d.saddle = d.value > 0.0;
  return d;
}

TransitionMatrix transition_matrix_symmetric(int j, int q, double delta) {
  if (j < 1 || q < j)
    throw std::domain_error("transition_matrix_symmetric: need q >= j >= 1");
  TransitionMatrix m;
  m.j = j;
  m.q = q;
  m.entries = Eigen::MatrixXd::Zero(q, q);
  const int growing_rows = q - j;
  for (int i = 0; i < q; ++i) {
    m.entries(i, 0) = i < growing_rows ? -1.0 : delta;
    if (i + 1 < q) m.entries(i, i + 1) = 1.0;
    m.row_roles.push_back(i < growing_rows ? RowRole::Growing
                                           : RowRole::Decaying);
  }
  return m;
}

TransitionMatrix transition_matrix_for_cycle(const HetNetwork& net,
                                             const CycleDescriptor& cycle,
                                             const Delta& delta) {
  const int len = static_cast<int>(cycle.path.size());
  if (len < 2)
    throw std::invalid_argument(
        "transition_matrix_for_cycle: cycle must visit at least two fixed "
        "points");

  // resolve the connection for each leg, tolerating descriptors built by hand
  std::vector<const Connection*> legs(len, nullptr);
  for (int k = 0; k < len; ++k) {
    const int src = cycle.path[k];
    const int tgt = cycle.path[(k + 1) % len];
    for (int cid : net.out_edges.at(src)) {
      if (net.connections[cid].target == tgt) {
        legs[k] = &net.connections[cid];
        break;
      }
    }
    if (!legs[k]) {
      std::ostringstream msg;
      msg << "transition_matrix_for_cycle: no connection "
          << to_string(net.fixed_points[src].active) << " -> "
          << to_string(net.fixed_points[tgt].active)
          << "; path is not a closed loop";
      throw std::invalid_argument(msg.str());
    }
  }

  const std::size_t j = net.fixed_points[cycle.path[0]].active.size();
  for (int idx : cycle.path) {
    if (net.fixed_points[idx].active.size() != j)
      throw std::invalid_argument(
          "transition_matrix_for_cycle: active count varies along the cycle "
          "(unsupported)");
  }
  for (const auto* leg : legs) {
    if (leg->displaced.size() != 1)
      throw std::invalid_argument(
          "transition_matrix_for_cycle: a connection displaces " +
          std::to_string(leg->displaced.size()) + " nodes (unsupported)");
  }

  const int n = net.graph.size();
  const int q = n - static_cast<int>(j) - 1;
  if (q < 1)
    throw std::domain_error(
        "transition_matrix_for_cycle: cycle leaves no tracked coordinates");

  // per-epoch bookkeeping: at epoch k the trajectory sits near path[k]; the
  // node displaced on arrival decays through this epoch, the entering node
  // of the outgoing leg activates at its end
  std::vector<std::vector<int>> tracked(len), basis(len);
  std::vector<int> decayer(len), entering(len);
  for (int k = 0; k < len; ++k) {
    decayer[k] = legs[(k - 1 + len) % len]->displaced[0];
    entering[k] = legs[k]->entering;
    const auto& active = net.fixed_points[cycle.path[k]].active;
    for (int node = 1; node <= n; ++node) {
      if (!std::binary_search(active.begin(), active.end(), node) &&
          node != decayer[k])
        tracked[k].push_back(node);
    }
  }
  for (int k = 0; k < len; ++k) {
    // order input coordinates by upcoming activation when the next q
    // activations cover the tracked set exactly; otherwise by node id
    std::vector<int> order;
    for (int i = 0; i < q; ++i) order.push_back(entering[(k + i) % len]);
    std::vector<int> sorted_order = order;
    std::sort(sorted_order.begin(), sorted_order.end());
    sorted_order.erase(std::unique(sorted_order.begin(), sorted_order.end()),
                       sorted_order.end());
    basis[k] = (sorted_order == tracked[k]) ? order : tracked[k];
  }

  std::vector<Eigen::MatrixXd> epoch_maps(len);
  std::vector<std::vector<RowRole>> epoch_roles(len);
  for (int k = 0; k < len; ++k) {
    const int next = (k + 1) % len;
    std::map<int, int> col;
    for (int i = 0; i < q; ++i) col[basis[k][i]] = i;
    const auto profile = suppression_profile(
        net.graph, net.fixed_points[cycle.path[k]].active);
    const int e_col = col.at(entering[k]);

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(q, q);
    std::vector<RowRole> roles;
    for (int i = 0; i < q; ++i) {
      const int s = basis[next][i];
      if (s == decayer[k]) {
        // fell from the active plateau at this epoch's start (log ~ 0)
        m(i, e_col) = delta_ns(profile.suppressed.at(s), delta.value);
        roles.push_back(RowRole::Decaying);
      } else if (auto it = profile.suppressed.find(s);
                 it != profile.suppressed.end()) {
        m(i, col.at(s)) = 1.0;
        m(i, e_col) += delta_ns(it->second, delta.value);
        roles.push_back(RowRole::Decaying);
      } else {
        m(i, col.at(s)) = 1.0;
        m(i, e_col) -= 1.0;
        roles.push_back(RowRole::Growing);
      }
    }
    epoch_maps[k] = std::move(m);
    epoch_roles[k] = std::move(roles);
  }

  TransitionMatrix out;
  out.j = static_cast<int>(j);
  out.q = q;
  out.basis = basis[0];

  bool constant = true;
  for (int k = 1; k < len && constant; ++k)
    constant = (epoch_maps[k] - epoch_maps[0]).cwiseAbs().maxCoeff() == 0.0;
  if (constant) {
    out.entries = epoch_maps[0];
    out.epochs = 1;
    out.row_roles = epoch_roles[0];
  } else {
    Eigen::MatrixXd product = epoch_maps[0];
    for (int k = 1; k < len; ++k) product = epoch_maps[k] * product;
    out.entries = std::move(product);
    out.epochs = len;
  }
  return out;
}

std::vector<double> char_poly(int j, int q, double delta) {
  if (j < 1 || q < j) throw std::domain_error("char_poly: need q >= j >= 1");
  std::vector<double> coeffs(q + 1);
  for (int i = 0; i <= q; ++i) coeffs[i] = i <= q - j ? 1.0 : -delta;
  return coeffs;
}

std::vector<std::complex<double>> roots(const std::vector<double>& coeffs) {
  if (coeffs.size() < 2)
    throw std::invalid_argument("roots: polynomial must have degree >= 1");
  if (std::abs(coeffs[0] - 1.0) > 1e-12)
    throw std::invalid_argument("roots: polynomial must be monic");
  const int degree = static_cast<int>(coeffs.size()) - 1;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i)
    companion(i, degree - 1) = -coeffs[degree - i];

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<std::complex<double>> out(degree);
  for (int i = 0; i < degree; ++i) {
    std::complex<double> z = solver.eigenvalues()[i];
    const auto dp = horner_derivative(coeffs, z);
    if (std::abs(dp) > 1e-30) z -= horner(coeffs, z) / dp;  // one polish step
    out[i] = z;
  }

  for (const auto& z : out) {
    const double residual = std::abs(horner(coeffs, z));
    const double bound =
        kResidualTolerance * std::max(1.0, std::pow(std::abs(z), degree));
    if (residual > bound) {
      std::ostringstream msg;
      msg << "roots: residual " << residual << " at iterate (" << z.real()
          << ", " << z.imag() << ") exceeds " << bound;
      throw std::runtime_error(msg.str());
    }
  }
  sort_by_magnitude(out);
  return out;
}

StabilityReport podvigina_check(const TransitionMatrix& M) {
  const int q = static_cast<int>(M.entries.rows());
  if (q < 1 || M.entries.cols() != q)
    throw std::invalid_argument("podvigina_check: matrix must be square");
  if (M.j < 1)
    throw std::invalid_argument("podvigina_check: active count j not set");

  StabilityReport rep;
  rep.j = M.j;
  rep.q = q;
  rep.delta_star = (q + 1.0 - M.j) / M.j;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(M.entries, true);
  std::vector<int> idx(q);
  for (int i = 0; i < q; ++i) idx[i] = i;
  const auto& ev = solver.eigenvalues();
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ma = std::abs(ev[a]), mb = std::abs(ev[b]);
    if (std::abs(ma - mb) > 1e-12 * std::max(1.0, std::max(ma, mb)))
      return ma > mb;
    const double aa = std::abs(std::arg(ev[a])), ab = std::abs(std::arg(ev[b]));
    if (std::abs(aa - ab) > 1e-12) return aa < ab;
    return std::arg(ev[a]) > std::arg(ev[b]);
  });
  for (int i : idx) rep.roots.push_back(ev[i]);
  rep.lambda_max = rep.roots[0];
  const double top = std::abs(rep.lambda_max);

  if (std::abs(top - 1.0) < kTieTolerance) {
    rep.status = CheckStatus::Resonant;  // out of the criterion's hypothesis
    return rep;
  }

  // everything tied with the top magnitude competes for dominance
  int tied_real = 0;
  bool tied_complex = false;
  for (const auto& z : rep.roots) {
    if (std::abs(z) <= top - kTieTolerance * std::max(1.0, top)) break;
    if (is_real(z))
      ++tied_real;
    else
      tied_complex = true;
  }
  if (tied_complex || tied_real > 1) {
    // no strictly dominant real eigenvalue; condition 1 fails
    rep.fas = false;
    return rep;
  }

  // unique real dominant eigenvalue: extract and sign-check its eigenvector
  Eigen::VectorXcd v = solver.eigenvectors().col(idx[0]);
  int argmax = 0;
  for (int i = 1; i < q; ++i)
    if (std::abs(v[i]) > std::abs(v[argmax])) argmax = i;
  v /= v[argmax];  // largest entry becomes exactly +1
  rep.v_max.resize(q);
  for (int i = 0; i < q; ++i) rep.v_max[i] = v[i].real();

  bool one_signed = true;
  for (int i = 0; i < q; ++i)
    if (!(rep.v_max[i] > kEntryTolerance)) one_signed = false;

  rep.fas = rep.lambda_max.real() > 1.0 && one_signed;
  return rep;
}

StabilityReport theorem_verdict(int j, int q, double delta) {
  if (j < 1 || q < j)
    throw std::domain_error("theorem_verdict: need q >= j >= 1");
  StabilityReport rep;
  rep.j = j;
  rep.q = q;
  rep.delta = delta;
  rep.delta_star = (q + 1.0 - j) / j;
  rep.theorem_applicable = true;
  rep.theorem_verdict = (q == j) && delta > rep.delta_star;
  return rep;
}

StabilityReport theorem_verdict(int j, int q, double delta, int n, double r) {
  StabilityReport rep = theorem_verdict(j, q, delta);
  rep.gamma_star = gamma_star(n, j, r);
  return rep;
}

double gamma_star(int n, int j, double r) {
  if (j < 1 || n <= j)
    throw std::domain_error("gamma_star: need n > j >= 1");
  if (!(r > 1.0) || !(r <= 3.0))
    throw std::domain_error("gamma_star: r must lie in (1, 3]");
  return std::log(r) / xhat_of(r) * (n - j) / j;
}

namespace {

StabilityReport merged_report(int j, int q, double delta,
                              std::optional<std::pair<int, double>> nr) {
  StabilityReport rep =
      podvigina_check(transition_matrix_symmetric(j, q, delta));
  const StabilityReport thm =
      nr ? theorem_verdict(j, q, delta, nr->first, nr->second)
         : theorem_verdict(j, q, delta);
  rep.delta = delta;
  rep.theorem_applicable = true;
  rep.theorem_verdict = thm.theorem_verdict;
  rep.gamma_star = thm.gamma_star;
  if (rep.status == CheckStatus::Decided)
    rep.agreement = (rep.fas == rep.theorem_verdict);
  return rep;
}

}  // namespace

StabilityReport symmetric_cycle_report(int j, int q, double delta) {
  return merged_report(j, q, delta, std::nullopt);
}

StabilityReport symmetric_cycle_report(int j, int q, double delta, int n,
                                       double r) {
  return merged_report(j, q, delta, std::make_pair(n, r));
}

Eigen::VectorXd vmax_closed_form(int j, double delta, double r_plus) {
  if (j < 1) throw std::domain_error("vmax_closed_form: need j >= 1");
  if (!(r_plus > 0.0))
    throw std::domain_error("vmax_closed_form: r_plus must be positive");
  Eigen::VectorXd v(j);
  v[0] = 1.0;
  for (int i = 1; i < j; ++i) {
    double sum = 0.0;
    for (int k = 0; k <= j - i - 1; ++k) sum += std::pow(r_plus, -k);
    v[i] = delta / r_plus * sum;
  }
  return v;
}

RootStructure classify_roots(int j, int q, double delta) {
  if (!(delta > 0.0))
    throw std::domain_error("classify_roots: need delta > 0");
  RootStructure rc;
  rc.j = j;
  rc.q = q;
  rc.delta = delta;
  rc.delta_star = (q + 1.0 - j) / j;

  const auto coeffs = char_poly(j, q, delta);
  rc.root_list = roots(coeffs);
  for (const auto& z : rc.root_list)
    rc.max_residual = std::max(rc.max_residual, std::abs(horner(coeffs, z)));

  std::complex<double> r_plus_root{0.0, 0.0};
  for (const auto& z : rc.root_list) {
    if (is_real(z) && z.real() > 0.0) {
      ++rc.positive_real_count;
      r_plus_root = z;
    }
  }
  if (rc.positive_real_count != 1) {
    rc.violations.push_back("expected exactly one positive real root, found " +
                            std::to_string(rc.positive_real_count));
    rc.r_plus = std::numeric_limits<double>::quiet_NaN();
    return rc;
  }
  rc.r_plus = r_plus_root.real();

  const auto& dominant = rc.root_list[0];
  rc.dominant_real_negative = is_real(dominant) && dominant.real() < 0.0;

  const double band = 1e-9 * std::max(1.0, rc.r_plus);
  for (const auto& z : rc.root_list) {
    const double mag = std::abs(z);
    if (std::abs(mag - rc.r_plus) <= band) continue;  // r_plus sits here
    if (mag < rc.r_plus) {
      ++rc.strictly_inside;
      if (is_real(z) && z.real() < 0.0) ++rc.inside_real_negative;
    } else {
      ++rc.strictly_outside;
    }
  }

  auto expect = [&rc](bool ok, const std::string& what) {
    if (!ok) rc.violations.push_back(what);
  };

  if (q == j) {
    expect(rc.strictly_inside == q - 1 && rc.strictly_outside == 0,
           "q = j: all other roots must lie strictly inside |r_plus|");
    if (std::abs(delta - rc.delta_star) > 1e-9)
      expect((rc.r_plus > 1.0) == (delta > rc.delta_star),
             "q = j: r_plus > 1 must track delta > delta*");
  } else if (j % 2 == 1 && q % 2 == 0) {
    expect(rc.dominant_real_negative,
           "j odd, q even: dominant root must be real negative");
    int complex_inside_dominant = 0;
    const double dom = std::abs(dominant);
    for (std::size_t i = 1; i < rc.root_list.size(); ++i) {
      const auto& z = rc.root_list[i];
      if (!is_real(z) && std::abs(z) < dom - band) ++complex_inside_dominant;
    }
    expect(complex_inside_dominant == q - 2,
           "j odd, q even: expected q-2 complex roots inside the dominant "
           "modulus");
  } else {
    expect(rc.strictly_inside == j - 1,
           "expected j-1 roots strictly inside |r_plus|");
    expect(rc.strictly_outside == q - j,
           "expected q-j roots strictly outside |r_plus|");
    expect(rc.inside_real_negative == (j % 2 == 0 ? 1 : 0),
           "inside real-negative count must be 1 iff j even");
  }

  rc.conforms = rc.violations.empty();
  return rc;
}

std::vector<SweepCell> sweep_grid(const std::vector<int>& js,
                                  const std::vector<int>& ps,
                                  const std::vector<double>& deltas,
                                  double exclusion_band, int jobs) {
  struct Task {
    int j, p, q;
    double delta;
  };
  std::vector<Task> tasks;
  for (int j : js) {
    for (int p : ps) {
      const int q = j * (p - 1);
      const double ds = (q + 1.0 - j) / j;
      for (double d : deltas) {
        if (std::abs(d - ds) < exclusion_band) continue;
        tasks.push_back({j, p, q, d});
      }
    }
  }

  std::vector<SweepCell> cells(tasks.size());
  auto run_range = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < tasks.size(); i += stride) {
      const auto& t = tasks[i];
      const auto rep = symmetric_cycle_report(t.j, t.q, t.delta);
      SweepCell c;
      c.j = t.j;
      c.p = t.p;
      c.q = t.q;
      c.delta = t.delta;
      c.delta_star = rep.delta_star;
      c.fas = rep.fas;
      c.theorem = rep.theorem_verdict;
      c.agreement = rep.agreement.value_or(false);
      c.status = rep.status;
      cells[i] = c;
    }
  };

  const int workers = std::max(1, jobs);
  if (workers == 1 || tasks.size() < 2) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back(run_range, static_cast<std::size_t>(w), workers);
    for (auto& th : pool) th.join();
  }
  return cells;
}

}  // namespace ringhet

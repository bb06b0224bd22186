// Serialization of the library's objects to the flat formats the command-line
// tools exchange: JSON for structured one-shot documents (graphs, networks,
// stability reports, fit results), CSV for row-per-step and row-per-epoch
// series, DOT for network drawings.
//
// Everything here is deterministic: object keys keep a fixed order, lists
// follow the library's canonical orderings (fixed points size-then-lex,
// connections grouped by source), and doubles are printed with the shortest
// representation that round-trips, so re-running a command yields
// byte-identical files and diffs stay readable.  All node indices are
// 1-based, matching the graph file format.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ringhet/dynamics.hpp"
#include "ringhet/network.hpp"
#include "ringhet/stability.hpp"

namespace ringhet {

// Graph files: {"n": int, "m": int} for rings, or
// {"n": int, "edges": [[from, to], ...]} for explicit digraphs (1-based,
// [a, b] meaning a inhibits b).  Exactly one of "m"/"edges" must be present.
// Malformed documents raise std::invalid_argument.
CouplingGraph parse_graph_json(const std::string& text);
std::string graph_json(const CouplingGraph& g);

// Network exports: nodes carry their active set, label and kind
// ("sink"/"saddle"); edges carry source/target indices plus the entering and
// displaced nodes.  The DOT form labels fixed points xi_{...} and draws
// sinks double-circled.
std::string network_json(const HetNetwork& net);
std::string network_dot(const HetNetwork& net);

// Stability report: {j, q, delta, delta_star, lambda_max: {re, im},
// v_max: [...], fas, theorem_verdict, agreement, roots: [{re, im}, ...]}
// followed by status, theorem_applicable and gamma_star.  Unset optionals
// (and NaN deltas) serialize as null.
std::string stability_json(const StabilityReport& rep);

// Fit result: every FitResult field under its own name.
std::string fit_json(const FitResult& fit);

// Trajectory CSV: header "i,x1..xn", one row per recorded step; log-domain
// runs append log_x1..log_xn columns.  Throws on an empty trajectory.
void write_trajectory_csv(const Trajectory& t, std::ostream& out);

// Epoch CSV: header "k,boundary_i,T_k,X_k,shadowed_fixed_point", k counted
// from 1.  The shadow column holds the fixed point's xi_{...} label (quoted:
// the label itself contains commas) or "off-network".
void write_epoch_csv(const EpochSeries& s, const HetNetwork& net,
                     std::ostream& out);

struct EpochRow {
  int k = 0;
  long boundary = 0;
  long duration = 0;
  double valley = 0.0;
  std::string shadow;
};

// Parses a file produced by write_epoch_csv; the header is checked verbatim.
std::vector<EpochRow> read_epoch_csv(std::istream& in);

// Model-curve samples for plotting a fit against its data: header
// "k,X_data,X_model,X_pure" with k aligned to the epoch CSV's k column.
// X_model is the three-term fit, X_pure the best single-geometric fit.
void write_fit_curve_csv(const FitResult& fit,
                         const std::vector<double>& valleys,
                         std::ostream& out);

// Sweep CSV: header "j,p,q,delta,delta_star,fas,theorem,agreement,status",
// one row per evaluated cell; an empty sweep writes the header alone.
void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& out);

// Whole-file helpers used by the tools; failures raise std::runtime_error
// naming the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ringhet

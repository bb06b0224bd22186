// Command-line front end for the ringhet library.  Subcommands map onto the
// library's stages:
//
//   network    build the heteroclinic network, write JSON + DOT + a census
//   cycles     enumerate and classify the network's simple cycles
//   stability  per-cycle stability reports (spectral check + closed form)
//   sweep      theorem-vs-spectrum agreement over a (j, p, delta) grid
//   simulate   integrate the map, write trajectory and epoch CSVs
//   fit        decompose a valley sequence from an epoch CSV
//   verify     run the acceptance suite
//
// Every run echoes its fully-resolved configuration (defaults, then a
// --config INI file, then command-line flags, highest last) on one
// "config:" line and records the same object in <out>/meta.json.  Data
// files are deterministic for a given configuration; the only timestamp
// lives in meta.json, so re-running a command leaves the data files
// byte-identical.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "ringhet/dynamics.hpp"
#include "ringhet/graph.hpp"
#include "ringhet/io.hpp"
#include "ringhet/network.hpp"
#include "ringhet/stability.hpp"
#include "ringhet/verify.hpp"

namespace {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// shared plumbing

struct GraphOpts {
  std::string file;  // JSON document, exclusive with n/m
  int n = 0;
  int m = 1;
};

ringhet::CouplingGraph resolve_graph(const GraphOpts& g) {
  if (!g.file.empty())
    return ringhet::parse_graph_json(ringhet::read_text_file(g.file));
  if (g.n > 0) return ringhet::make_ring(g.n, g.m);
  throw std::invalid_argument("no graph given: pass --graph FILE or --n N [--m M]");
}

struct OutOpts {
  std::string dir = ".";
  std::string format;  // empty = every format the command produces
};

// The command's native formats that survive the --format filter; rejects a
// filter naming a format the command never produces.
std::vector<std::string> resolved_formats(
    const OutOpts& o, std::initializer_list<const char*> native) {
  std::vector<std::string> keep;
  for (const char* f : native)
    if (o.format.empty() || o.format == f) keep.emplace_back(f);
  if (keep.empty())
    throw std::invalid_argument("--format " + o.format +
                                " is not one this command produces");
  return keep;
}

bool wants(const std::vector<std::string>& formats, const char* f) {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

// Output directory plus the list of files written into it (for meta.json).
struct Sink {
  std::string dir;
  std::vector<std::string> files;

  explicit Sink(std::string d) : dir(std::move(d)) {
    std::filesystem::create_directories(dir);
  }

  void write(const std::string& name, const std::string& content) {
    ringhet::write_text_file(dir + "/" + name, content);
    files.push_back(name);
    std::cout << "wrote " << dir << "/" << name << "\n";
  }
};

void echo_config(const json& cfg) {
  std::cout << "config: " << cfg.dump() << "\n";
}

std::string iso_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_meta(const Sink& sink, const json& cfg) {
  json meta;
  meta["generated_at"] = iso_now();
  meta["config"] = cfg;
  meta["outputs"] = sink.files;
  ringhet::write_text_file(sink.dir + "/meta.json", meta.dump(2) + "\n");
  std::cout << "wrote " << sink.dir << "/meta.json\n";
}

json graph_config(const ringhet::CouplingGraph& g) {
  return json::parse(ringhet::graph_json(g));
}

ringhet::ActiveSet parse_active_set(const std::string& text) {
  ringhet::ActiveSet z;
  std::stringstream ss(text);
  std::string tok;
  try {
    while (std::getline(ss, tok, ',')) {
      std::size_t pos = 0;
      const int node = std::stoi(tok, &pos);
      if (pos != tok.size() || node < 1) throw std::invalid_argument(tok);
      z.push_back(node);
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("bad node list '" + text +
                                "': expected comma-separated 1-based indices");
  }
  if (z.empty())
    throw std::invalid_argument("bad node list '" + text + "': empty");
  std::sort(z.begin(), z.end());
  z.erase(std::unique(z.begin(), z.end()), z.end());
  return z;
}

const char* symmetry_name(ringhet::SymmetryClass c) {
  switch (c) {
    case ringhet::SymmetryClass::SingleNode: return "single-node";
    case ringhet::SymmetryClass::CaseI: return "case-I";
    case ringhet::SymmetryClass::CaseII: return "case-II";
    case ringhet::SymmetryClass::None: return "none";
  }
  return "none";
}

json cycle_heading(const ringhet::HetNetwork& net,
                   const ringhet::CycleDescriptor& c, int id) {
  json row;
  row["cycle"] = id;
  row["length"] = static_cast<int>(c.path.size());
  row["active_count"] = c.active_count;
  json path = json::array();
  for (int fp : c.path)
    path.push_back(ringhet::to_string(net.fixed_points[fp].active));
  row["path"] = std::move(path);
  return row;
}

// Cycles are addressed by their 1-based position in the canonical
// enumeration order (length, then lexicographic path), the order the
// `cycles` command prints.
const ringhet::CycleDescriptor& select_cycle(
    const std::vector<ringhet::CycleDescriptor>& all, int id) {
  if (id < 1 || id > static_cast<int>(all.size()))
    throw std::invalid_argument(
        "--cycle " + std::to_string(id) + " out of range: the network has " +
        std::to_string(all.size()) + " cycles (see the cycles command)");
  return all[id - 1];
}

// ---------------------------------------------------------------------------
// network

struct NetworkOpts {
  GraphOpts graph;
  double r = 2.0, gamma = 3.04;
  OutOpts out;
};

int run_network(const NetworkOpts& o) {
  const auto formats = resolved_formats(o.out, {"json", "dot"});
  const auto g = resolve_graph(o.graph);
  const auto net = ringhet::build_network(g, o.r, o.gamma);

  json cfg;
  cfg["command"] = "network";
  cfg["graph"] = graph_config(g);
  cfg["r"] = o.r;
  cfg["gamma"] = o.gamma;
  cfg["out"] = o.out.dir;
  cfg["formats"] = formats;
  echo_config(cfg);

  Sink sink(o.out.dir);
  if (wants(formats, "json"))
    sink.write("network.json", ringhet::network_json(net));
  if (wants(formats, "dot"))
    sink.write("network.dot", ringhet::network_dot(net));

  std::map<int, int> census;
  for (const auto& fp : net.fixed_points)
    ++census[static_cast<int>(fp.active.size())];
  std::cout << net.fixed_points.size() << " fixed points by active count:";
  for (const auto& [size, count] : census)
    std::cout << " " << size << ":" << count;
  std::cout << "\n" << net.connections.size() << " connections\n";
  if (net.sinks.empty()) {
    std::cout << "sinks: none\n";
  } else {
    std::cout << "sinks:";
    for (int s : net.sinks)
      std::cout << " " << ringhet::to_string(net.fixed_points[s].active);
    std::cout << "\n";
  }

  write_meta(sink, cfg);
  return 0;
}

// ---------------------------------------------------------------------------
// cycles

struct CyclesOpts {
  GraphOpts graph;
  double r = 2.0, gamma = 3.04;
  int max_len = 0;
  OutOpts out;
};

int run_cycles(const CyclesOpts& o) {
  const auto formats = resolved_formats(o.out, {"json"});
  const auto g = resolve_graph(o.graph);
  const auto net = ringhet::build_network(g, o.r, o.gamma);
  const auto cycles = ringhet::enumerate_cycles(net, o.max_len);

  json cfg;
  cfg["command"] = "cycles";
  cfg["graph"] = graph_config(g);
  cfg["r"] = o.r;
  cfg["gamma"] = o.gamma;
  cfg["max_len"] = o.max_len;
  cfg["out"] = o.out.dir;
  cfg["formats"] = formats;
  echo_config(cfg);

  json rows = json::array();
  int symmetric = 0;
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const auto& c = cycles[i];
    json row = cycle_heading(net, c, static_cast<int>(i) + 1);
    row["symmetric"] = c.symmetric;
    row["symmetry_class"] = symmetry_name(c.symmetry_class);
    row["rotation"] = c.rotation;
    row["parameter"] = c.parameter;
    rows.push_back(std::move(row));
    symmetric += c.symmetric ? 1 : 0;
  }

  Sink sink(o.out.dir);
  sink.write("cycles.json", rows.dump(2) + "\n");
  std::cout << cycles.size() << " cycles, " << symmetric << " symmetric\n";

  write_meta(sink, cfg);
  return 0;
}

// ---------------------------------------------------------------------------
// stability

struct StabilityOpts {
  GraphOpts graph;
  double r = 2.0, gamma = 3.04;
  std::vector<int> cycles;  // empty = all
  OutOpts out;
};

int run_stability(const StabilityOpts& o) {
  const auto formats = resolved_formats(o.out, {"json"});
  const auto g = resolve_graph(o.graph);
  const auto net = ringhet::build_network(g, o.r, o.gamma);
  const auto delta = ringhet::delta_from(o.r, o.gamma);
  const auto all = ringhet::enumerate_cycles(net);

  std::vector<int> selected = o.cycles;
  if (selected.empty())
    for (std::size_t i = 0; i < all.size(); ++i)
      selected.push_back(static_cast<int>(i) + 1);

  json cfg;
  cfg["command"] = "stability";
  cfg["graph"] = graph_config(g);
  cfg["r"] = o.r;
  cfg["gamma"] = o.gamma;
  cfg["delta"] = delta.value;
  cfg["cycles"] = selected;
  cfg["out"] = o.out.dir;
  cfg["formats"] = formats;
  echo_config(cfg);

  json rows = json::array();
  int unsupported = 0;
  for (int id : selected) {
    const auto& cyc = select_cycle(all, id);
    json row = cycle_heading(net, cyc, id);
    try {
      const auto M = ringhet::transition_matrix_for_cycle(net, cyc, delta);
      auto rep = ringhet::podvigina_check(M);
      rep.delta = delta.value;
      if (cyc.symmetric && M.epochs == 1) {
        // constant per-epoch matrix: the closed-form verdict applies
        const auto thm =
            g.ring_m()
                ? ringhet::theorem_verdict(M.j, M.q, delta.value, g.size(), o.r)
                : ringhet::theorem_verdict(M.j, M.q, delta.value);
        rep.theorem_applicable = true;
        rep.theorem_verdict = thm.theorem_verdict;
        rep.gamma_star = thm.gamma_star;
        if (rep.status == ringhet::CheckStatus::Decided)
          rep.agreement = rep.fas == rep.theorem_verdict;
      }
      row["report"] = json::parse(ringhet::stability_json(rep));
    } catch (const std::exception& e) {
      // unsupported cycle (varying active count, multi-displacement, ...):
      // record the reason and keep going
      row["error"] = e.what();
      ++unsupported;
    }
    rows.push_back(std::move(row));
  }

  Sink sink(o.out.dir);
  sink.write("stability.json", rows.dump(2) + "\n");
  std::cout << selected.size() << " cycles analysed, " << unsupported
            << " unsupported\n";

  write_meta(sink, cfg);
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOpts {
  int j_min = 1, j_max = 5;
  int p_min = 2, p_max = 5;
  double delta_min = 0.1, delta_max = 5.0, delta_step = 0.15;
  double band = 0.05;
  int jobs = 1;
  OutOpts out;
};

int run_sweep(const SweepOpts& o) {
  const auto formats = resolved_formats(o.out, {"csv"});
  if (!(o.delta_step > 0.0))
    throw std::invalid_argument("--delta-step must be positive");

  std::vector<int> js, ps;
  for (int j = o.j_min; j <= o.j_max; ++j) js.push_back(j);
  for (int p = o.p_min; p <= o.p_max; ++p) ps.push_back(p);
  std::vector<double> deltas;
  for (double d = o.delta_min; d <= o.delta_max + 1e-12; d += o.delta_step)
    deltas.push_back(d);

  json cfg;
  cfg["command"] = "sweep";
  cfg["j"] = {{"min", o.j_min}, {"max", o.j_max}};
  cfg["p"] = {{"min", o.p_min}, {"max", o.p_max}};
  cfg["delta"] = {{"min", o.delta_min},
                  {"max", o.delta_max},
                  {"step", o.delta_step}};
  cfg["exclusion_band"] = o.band;
  cfg["jobs"] = o.jobs;
  cfg["out"] = o.out.dir;
  cfg["formats"] = formats;
  echo_config(cfg);

  const auto cells =
      ringhet::sweep_grid(js, ps, deltas, o.band, std::max(1, o.jobs));

  Sink sink(o.out.dir);
  std::ostringstream csv;
  ringhet::write_sweep_csv(cells, csv);
  sink.write("sweep.csv", csv.str());

  int disagreements = 0, resonant = 0;
  for (const auto& c : cells) {
    if (c.status == ringhet::CheckStatus::Resonant)
      ++resonant;
    else if (!c.agreement)
      ++disagreements;
  }
  std::cout << cells.size() << " cells, " << disagreements
            << " disagreements, " << resonant << " resonant\n";

  write_meta(sink, cfg);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  GraphOpts graph;
  double r = 2.0, gamma = 3.04;
  long steps = 100000;
  double theta = -1.0;
  std::optional<double> floor;
  bool log_domain = false;
  int stop_after = 0;
  bool epochs_only = false;
  std::string ic = "perturbed";
  std::string fp;  // active set for --ic perturbed, e.g. "1,3"
  double epsilon = 1e-6;
  std::uint64_t seed = 1;
  int cycle = 0;  // 1-based, for --ic eigenvector/aligned
  int which_eig = 0;
  double scale = -40.0;
  OutOpts out;
};

int run_simulate(const SimulateOpts& o) {
  const auto formats = resolved_formats(o.out, {"csv"});
  const auto g = resolve_graph(o.graph);
  const auto net = ringhet::build_network(g, o.r, o.gamma);

  ringhet::SimParams params;
  params.r = o.r;
  params.gamma = o.gamma;
  params.steps = o.steps;
  params.theta = o.theta;
  params.floor = o.floor;
  params.log_domain = o.log_domain;
  params.stop_after_crossings = o.stop_after;

  // Recording every state costs steps * n (twice that in log mode) doubles;
  // refuse runs that would not fit and point at the streaming path instead.
  const long recorded = o.steps * g.size() * (o.log_domain ? 2 : 1);
  if (!o.epochs_only && recorded > 20'000'000)
    throw std::invalid_argument(
        "recording " + std::to_string(o.steps) +
        " steps would hold too many states in memory; pass --epochs-only "
        "or cut --steps");

  Eigen::VectorXd x0;
  json ic_cfg;
  ic_cfg["mode"] = o.ic;
  if (o.ic == "perturbed") {
    if (o.fp.empty())
      throw std::invalid_argument("--ic perturbed needs --fp (e.g. --fp 1,3)");
    const auto z = parse_active_set(o.fp);
    const int idx = net.index_of(z);
    if (idx < 0)
      throw std::invalid_argument("no fixed point " + ringhet::to_string(z) +
                                  " in this network");
    x0 = ringhet::perturbed_ic(net, idx, o.epsilon, o.seed);
    ic_cfg["fixed_point"] = ringhet::to_string(z);
    ic_cfg["epsilon"] = o.epsilon;
    ic_cfg["seed"] = o.seed;
  } else {
    if (o.cycle < 1)
      throw std::invalid_argument("--ic " + o.ic +
                                  " needs --cycle K (see the cycles command)");
    const auto all = ringhet::enumerate_cycles(net);
    const auto& cyc = select_cycle(all, o.cycle);
    const auto delta = ringhet::delta_from(o.r, o.gamma);
    const auto M = ringhet::transition_matrix_for_cycle(net, cyc, delta);
    x0 = o.ic == "aligned"
             ? ringhet::aligned_eigenvector_ic(net, cyc, M, o.which_eig,
                                               o.scale)
             : ringhet::eigenvector_ic(net, cyc, M, o.which_eig, o.scale);
    ic_cfg["cycle"] = o.cycle;
    ic_cfg["which_eig"] = o.which_eig;
    ic_cfg["scale"] = o.scale;
  }

  json cfg;
  cfg["command"] = "simulate";
  cfg["graph"] = graph_config(g);
  cfg["r"] = o.r;
  cfg["gamma"] = o.gamma;
  cfg["steps"] = o.steps;
  cfg["theta"] = params.resolved_theta();
  cfg["floor"] = o.floor ? json(*o.floor) : json(nullptr);
  cfg["log_domain"] = o.log_domain;
  cfg["stop_after_crossings"] = o.stop_after;
  cfg["epochs_only"] = o.epochs_only;
  cfg["ic"] = ic_cfg;
  cfg["out"] = o.out.dir;
  cfg["formats"] = formats;
  echo_config(cfg);

  Sink sink(o.out.dir);
  ringhet::EpochSeries series;
  if (o.epochs_only) {
    series = ringhet::simulate_epochs(net, x0, params);
  } else {
    const auto traj = ringhet::simulate(g, x0, params);
    for (const auto& w : traj.warnings) std::cout << "warning: " << w << "\n";
    std::ostringstream csv;
    ringhet::write_trajectory_csv(traj, csv);
    sink.write("trajectory.csv", csv.str());
    try {
      series = ringhet::extract_epochs(traj, net, params.resolved_theta());
    } catch (const std::runtime_error&) {
      series.theta = params.resolved_theta();
      std::cout << "fewer than two threshold crossings; epoch series is empty\n";
    }
  }
  for (const auto& w : series.warnings) std::cout << "warning: " << w << "\n";

  std::ostringstream csv;
  ringhet::write_epoch_csv(series, net, csv);
  sink.write("epochs.csv", csv.str());
  std::cout << series.crossings << " crossings, " << series.epochs.size()
            << " epochs\n";

  write_meta(sink, cfg);
  return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitOpts {
  std::string epochs_path;
  GraphOpts graph;
  double r = 2.0, gamma = 3.04;
  int cycle = 0;  // 1-based
  int skip = 0, take = 0;
  OutOpts out;
};

int run_fit(const FitOpts& o) {
  const auto formats = resolved_formats(o.out, {"json", "csv"});
  std::ifstream in(o.epochs_path);
  if (!in)
    throw std::runtime_error("cannot open epoch CSV " + o.epochs_path);
  const auto rows = ringhet::read_epoch_csv(in);

  const auto g = resolve_graph(o.graph);
  const auto net = ringhet::build_network(g, o.r, o.gamma);
  const auto delta = ringhet::delta_from(o.r, o.gamma);
  if (o.cycle < 1)
    throw std::invalid_argument("fit needs --cycle K (see the cycles command)");
  const auto all = ringhet::enumerate_cycles(net);
  const auto& cyc = select_cycle(all, o.cycle);
  const auto M = ringhet::transition_matrix_for_cycle(net, cyc, delta);

  // The model's rates come from the cycle's spectrum in dominance order:
  // lambda1 = the leading complex eigenvalue (oscillatory envelope),
  // lambda2 = the leading real eigenvalue (geometric trend).
  const auto spectrum = ringhet::podvigina_check(M).roots;
  std::optional<std::complex<double>> lambda1;
  std::optional<double> lambda2;
  for (const auto& z : spectrum) {
    const bool real = std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z));
    if (!real && !lambda1) lambda1 = z;
    if (real && !lambda2) lambda2 = z.real();
  }
  if (!lambda1)
    throw std::domain_error(
        "the cycle's spectrum has no complex pair to drive the oscillatory term");
  if (!lambda2)
    throw std::domain_error("the cycle's spectrum has no real eigenvalue");

  std::vector<double> valleys;
  for (std::size_t i = static_cast<std::size_t>(o.skip); i < rows.size(); ++i) {
    if (o.take > 0 && static_cast<int>(valleys.size()) >= o.take) break;
    valleys.push_back(rows[i].valley);
  }

  json cfg;
  cfg["command"] = "fit";
  cfg["epochs"] = o.epochs_path;
  cfg["graph"] = graph_config(g);
  cfg["r"] = o.r;
  cfg["gamma"] = o.gamma;
  cfg["cycle"] = o.cycle;
  cfg["lambda1"] = {{"re", lambda1->real()}, {"im", lambda1->imag()}};
  cfg["lambda2"] = *lambda2;
  cfg["skip"] = o.skip;
  cfg["points"] = valleys.size();
  cfg["out"] = o.out.dir;
  cfg["formats"] = formats;
  echo_config(cfg);

  const auto fit = ringhet::fit_decay(valleys, *lambda1, *lambda2);

  Sink sink(o.out.dir);
  if (wants(formats, "json")) sink.write("fit.json", ringhet::fit_json(fit));
  if (wants(formats, "csv")) {
    std::ostringstream csv;
    ringhet::write_fit_curve_csv(fit, valleys, csv);
    sink.write("fit_curve.csv", csv.str());
  }

  std::cout << "fit over " << fit.points << " epochs: rms " << fit.rms
            << ", pure-geometric rms " << fit.rms_pure_lambda2 << "\n";
  if (fit.degenerate) std::cout << "warning: regressors were rank-deficient\n";
  if (!fit.c3_identifiable)
    std::cout << "warning: oscillation amplitude too small to carry a phase\n";

  write_meta(sink, cfg);
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOpts {
  std::vector<int> criteria;  // empty = all
};

int run_verify(const VerifyOpts& o) {
  json cfg;
  cfg["command"] = "verify";
  cfg["criteria"] = o.criteria.empty() ? json("all") : json(o.criteria);
  echo_config(cfg);

  const auto results = ringhet::run_acceptance(o.criteria);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] %d %-32s (%6.2fs)  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
    failed += r.pass ? 0 : 1;
  }
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// wiring

void add_graph_opts(CLI::App* cmd, GraphOpts& g) {
  auto* file = cmd->add_option(
      "--graph", g.file,
      "graph JSON file: {\"n\", \"m\"} ring or {\"n\", \"edges\"} digraph");
  file->check(CLI::ExistingFile);
  auto* n = cmd->add_option("--n", g.n, "ring size (with --m)")
                ->check(CLI::PositiveNumber);
  cmd->add_option("--m", g.m, "ring inhibition range (with --n)")
      ->check(CLI::PositiveNumber);
  file->excludes(n);
  n->excludes(file);
}

void add_map_params(CLI::App* cmd, double& r, double& gamma) {
  cmd->add_option("--r", r, "logistic parameter, in (1, 3]");
  cmd->add_option("--gamma", gamma, "inhibition strength, >= 0");
}

void add_out_opts(CLI::App* cmd, OutOpts& o) {
  cmd->add_option("--out", o.dir, "output directory (created if missing)");
  cmd->add_option("--format", o.format,
                  "restrict outputs to one format the command produces")
      ->check(CLI::IsMember({"csv", "json", "dot"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "heteroclinic networks of inhibition-coupled logistic-map rings: "
      "construction, stability analysis and simulation"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "",
                 "INI file with option defaults ([subcommand] sections); "
                 "command-line flags win");

  NetworkOpts network_o;
  CyclesOpts cycles_o;
  StabilityOpts stability_o;
  SweepOpts sweep_o;
  SimulateOpts simulate_o;
  FitOpts fit_o;
  VerifyOpts verify_o;
  int rc = 0;

  auto* network = app.add_subcommand(
      "network", "build the heteroclinic network, write JSON/DOT and a census");
  add_graph_opts(network, network_o.graph);
  add_map_params(network, network_o.r, network_o.gamma);
  add_out_opts(network, network_o.out);
  network->callback([&] { rc = run_network(network_o); });

  auto* cycles =
      app.add_subcommand("cycles", "enumerate and classify the simple cycles");
  add_graph_opts(cycles, cycles_o.graph);
  add_map_params(cycles, cycles_o.r, cycles_o.gamma);
  cycles->add_option("--max-len", cycles_o.max_len,
                     "cycle length bound, 0 = unbounded");
  add_out_opts(cycles, cycles_o.out);
  cycles->callback([&] { rc = run_cycles(cycles_o); });

  auto* stability = app.add_subcommand(
      "stability", "per-cycle stability reports: spectral check, closed-form "
                   "verdict and their agreement");
  add_graph_opts(stability, stability_o.graph);
  add_map_params(stability, stability_o.r, stability_o.gamma);
  stability->add_option("--cycle", stability_o.cycles,
                        "cycle ids to analyse (1-based, repeatable); default "
                        "all");
  add_out_opts(stability, stability_o.out);
  stability->callback([&] { rc = run_stability(stability_o); });

  auto* sweep = app.add_subcommand(
      "sweep", "theorem-vs-spectrum agreement over a (j, p, delta) grid");
  sweep->add_option("--j-min", sweep_o.j_min, "smallest active count");
  sweep->add_option("--j-max", sweep_o.j_max, "largest active count");
  sweep->add_option("--p-min", sweep_o.p_min, "smallest p (q = j(p-1))");
  sweep->add_option("--p-max", sweep_o.p_max, "largest p");
  sweep->add_option("--delta-min", sweep_o.delta_min, "first delta");
  sweep->add_option("--delta-max", sweep_o.delta_max, "last delta");
  sweep->add_option("--delta-step", sweep_o.delta_step, "delta increment");
  sweep->add_option("--band", sweep_o.band,
                    "skip cells with |delta - delta*| below this");
  sweep->add_option("--jobs", sweep_o.jobs, "worker threads for the grid")
      ->check(CLI::PositiveNumber);
  add_out_opts(sweep, sweep_o.out);
  sweep->callback([&] { rc = run_sweep(sweep_o); });

  auto* simulate = app.add_subcommand(
      "simulate", "integrate the map, write trajectory and epoch CSVs");
  add_graph_opts(simulate, simulate_o.graph);
  add_map_params(simulate, simulate_o.r, simulate_o.gamma);
  simulate->add_option("--steps", simulate_o.steps, "iteration budget")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--theta", simulate_o.theta,
                       "epoch crossing threshold; negative = xhat/2");
  simulate->add_option("--floor", simulate_o.floor,
                       "clamp components below this value");
  simulate->add_flag("--log-domain", simulate_o.log_domain,
                     "integrate X = log x (exact deep valleys)");
  simulate->add_option("--stop-after", simulate_o.stop_after,
                       "stop after this many upward crossings, 0 = never");
  simulate->add_flag("--epochs-only", simulate_o.epochs_only,
                     "stream epoch summaries only; skip the trajectory CSV");
  simulate->add_option("--ic", simulate_o.ic, "initial condition mode")
      ->check(CLI::IsMember({"perturbed", "eigenvector", "aligned"}));
  simulate->add_option("--fp", simulate_o.fp,
                       "fixed point to perturb, e.g. 1,3 (--ic perturbed)");
  simulate->add_option("--epsilon", simulate_o.epsilon,
                       "perturbation size (--ic perturbed)");
  simulate->add_option("--seed", simulate_o.seed,
                       "RNG seed (--ic perturbed)");
  simulate->add_option("--cycle", simulate_o.cycle,
                       "cycle id, 1-based (--ic eigenvector/aligned)");
  simulate->add_option("--which-eig", simulate_o.which_eig,
                       "eigenvalue index in dominance order (--ic "
                       "eigenvector/aligned)");
  simulate->add_option("--scale", simulate_o.scale,
                       "deepest coordinate's log-depth, < 0 (--ic "
                       "eigenvector/aligned)");
  add_out_opts(simulate, simulate_o.out);
  simulate->callback([&] { rc = run_simulate(simulate_o); });

  auto* fit = app.add_subcommand(
      "fit", "decompose an epoch CSV's valley sequence into geometric trend "
             "plus oscillating envelope");
  fit->add_option("--epochs", fit_o.epochs_path, "epoch CSV from simulate")
      ->required()
      ->check(CLI::ExistingFile);
  add_graph_opts(fit, fit_o.graph);
  add_map_params(fit, fit_o.r, fit_o.gamma);
  fit->add_option("--cycle", fit_o.cycle,
                  "cycle whose transition matrix supplies the rates "
                  "(1-based)");
  fit->add_option("--skip", fit_o.skip, "drop this many leading epochs");
  fit->add_option("--take", fit_o.take,
                  "fit at most this many epochs, 0 = all");
  add_out_opts(fit, fit_o.out);
  fit->callback([&] { rc = run_fit(fit_o); });

  auto* verify =
      app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--criterion", verify_o.criteria,
                     "criterion ids to run (repeatable); default all")
      ->check(CLI::Range(1, 9));
  verify->callback([&] { rc = run_verify(verify_o); });

  // let --config (and any future app-level flag) appear after the subcommand
  for (auto* sub : {network, cycles, stability, sweep, simulate, fit, verify})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}

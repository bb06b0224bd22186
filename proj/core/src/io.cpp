#include "ringhet/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <nlohmann/json.hpp>

namespace ringhet {
namespace {

// Insertion-ordered objects: the report layout is part of the contract, and
// stable key order keeps exports diffable.
using json = nlohmann::ordered_json;

// Shortest decimal form that parses back to the same double ("0.1", not
// "0.10000000000000001"); CSV consumers re-reading our files lose nothing.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const char* bool_str(bool b) { return b ? "true" : "false"; }

json graph_to_json(const CouplingGraph& g) {
  json doc;
  doc["n"] = g.size();
  if (const auto m = g.ring_m()) {
    doc["m"] = *m;
  } else {
    json edges = json::array();
    for (int a = 1; a <= g.size(); ++a)
      for (int b : g.targets_of(a)) edges.push_back({a, b});
    doc["edges"] = std::move(edges);
  }
  return doc;
}

json complex_to_json(const std::complex<double>& z) {
  json doc;
  doc["re"] = z.real();
  doc["im"] = z.imag();
  return doc;
}

// NaN placeholders (an unset delta) serialize as null rather than the
// non-standard NaN literal.
json finite_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

bool is_sink(const HetNetwork& net, int fp) {
  return std::find(net.sinks.begin(), net.sinks.end(), fp) != net.sinks.end();
}

[[noreturn]] void bad_graph(const std::string& why) {
  throw std::invalid_argument("graph JSON: " + why);
}

}  // namespace

CouplingGraph parse_graph_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad_graph(e.what());
  }
  if (!doc.is_object()) bad_graph("top level must be an object");
  if (!doc.contains("n") || !doc["n"].is_number_integer())
    bad_graph("\"n\" (integer) is required");
  const int n = doc["n"].get<int>();

  const bool has_m = doc.contains("m");
  const bool has_edges = doc.contains("edges");
  if (has_m == has_edges)
    bad_graph("exactly one of \"m\" (ring) or \"edges\" (digraph) is required");

  if (has_m) {
    if (!doc["m"].is_number_integer()) bad_graph("\"m\" must be an integer");
    return make_ring(n, doc["m"].get<int>());
  }

  if (!doc["edges"].is_array()) bad_graph("\"edges\" must be an array");
  if (n < 1) bad_graph("\"n\" must be positive");
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      bad_graph("each edge must be a [from, to] pair of integers");
    const int a = e[0].get<int>();
    const int b = e[1].get<int>();
    if (a < 1 || a > n || b < 1 || b > n)
      bad_graph("edge [" + std::to_string(a) + ", " + std::to_string(b) +
                "] is outside 1.." + std::to_string(n));
    adj[a - 1][b - 1] = true;
  }
  try {
    return CouplingGraph::from_adjacency(adj);
  } catch (const std::invalid_argument& e) {
    bad_graph(e.what());
  }
}

std::string graph_json(const CouplingGraph& g) {
  return graph_to_json(g).dump(2) + "\n";
}

std::string network_json(const HetNetwork& net) {
  json doc;
  doc["graph"] = graph_to_json(net.graph);
  doc["r"] = net.r;
  doc["gamma"] = net.gamma;

  json nodes = json::array();
  for (std::size_t i = 0; i < net.fixed_points.size(); ++i) {
    const auto& fp = net.fixed_points[i];
    json node;
    node["id"] = static_cast<int>(i);
    node["label"] = to_string(fp.active);
    node["active"] = fp.active;
    node["kind"] = is_sink(net, static_cast<int>(i)) ? "sink" : "saddle";
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);

  json edges = json::array();
  for (const auto& c : net.connections) {
    json edge;
    edge["source"] = c.source;
    edge["target"] = c.target;
    edge["entering"] = c.entering;
    edge["displaced"] = c.displaced;
    edges.push_back(std::move(edge));
  }
  doc["edges"] = std::move(edges);
  doc["sinks"] = net.sinks;
  return doc.dump(2) + "\n";
}

std::string network_dot(const HetNetwork& net) {
  std::ostringstream out;
  const std::string& label = net.graph.label();
  out << "digraph \"" << (label.empty() ? "network" : label) << "\" {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=circle];\n";
  for (std::size_t i = 0; i < net.fixed_points.size(); ++i) {
    out << "  fp" << i << " [label=\"" << to_string(net.fixed_points[i].active)
        << "\"";
    if (is_sink(net, static_cast<int>(i))) out << ", shape=doublecircle";
    out << "];\n";
  }
  for (const auto& c : net.connections)
    out << "  fp" << c.source << " -> fp" << c.target << ";\n";
  out << "}\n";
  return out.str();
}

std::string stability_json(const StabilityReport& rep) {
  json doc;
  doc["j"] = rep.j;
  doc["q"] = rep.q;
  doc["delta"] = finite_or_null(rep.delta);
  doc["delta_star"] = rep.delta_star;
  doc["lambda_max"] = complex_to_json(rep.lambda_max);
  json v = json::array();
  for (Eigen::Index i = 0; i < rep.v_max.size(); ++i) v.push_back(rep.v_max[i]);
  doc["v_max"] = std::move(v);
  doc["fas"] = rep.fas;
  doc["theorem_verdict"] = rep.theorem_verdict;
  doc["agreement"] = rep.agreement ? json(*rep.agreement) : json(nullptr);
  json roots = json::array();
  for (const auto& z : rep.roots) roots.push_back(complex_to_json(z));
  doc["roots"] = std::move(roots);
  doc["status"] =
      rep.status == CheckStatus::Decided ? "decided" : "resonant";
  doc["theorem_applicable"] = rep.theorem_applicable;
  doc["gamma_star"] = rep.gamma_star ? json(*rep.gamma_star) : json(nullptr);
  return doc.dump(2) + "\n";
}

std::string fit_json(const FitResult& fit) {
  json doc;
  doc["lambda2"] = fit.lambda2;
  doc["lambda1_mod"] = fit.lambda1_mod;
  doc["lambda1_arg"] = fit.lambda1_arg;
  doc["c1"] = fit.c1;
  doc["c2"] = fit.c2;
  doc["c3"] = fit.c3;
  doc["rms"] = fit.rms;
  doc["rms_pure_lambda2"] = fit.rms_pure_lambda2;
  doc["c3_identifiable"] = fit.c3_identifiable;
  doc["degenerate"] = fit.degenerate;
  doc["points"] = fit.points;
  return doc.dump(2) + "\n";
}

void write_trajectory_csv(const Trajectory& t, std::ostream& out) {
  if (t.states.empty())
    throw std::invalid_argument("trajectory CSV: no states recorded");
  const Eigen::Index n = t.states[0].size();
  const bool with_logs = !t.log_states.empty();
  const std::size_t rows =
      with_logs ? std::min(t.states.size(), t.log_states.size())
                : t.states.size();

  out << "i";
  for (Eigen::Index c = 1; c <= n; ++c) out << ",x" << c;
  if (with_logs)
    for (Eigen::Index c = 1; c <= n; ++c) out << ",log_x" << c;
  out << '\n';

  std::string line;
  for (std::size_t i = 0; i < rows; ++i) {
    line.clear();
    line += std::to_string(i);
    for (Eigen::Index c = 0; c < n; ++c) {
      line += ',';
      line += fmt(t.states[i][c]);
    }
    if (with_logs)
      for (Eigen::Index c = 0; c < n; ++c) {
        line += ',';
        line += fmt(t.log_states[i][c]);
      }
    line += '\n';
    out << line;
  }
}

void write_epoch_csv(const EpochSeries& s, const HetNetwork& net,
                     std::ostream& out) {
  out << "k,boundary_i,T_k,X_k,shadowed_fixed_point\n";
  int k = 1;
  for (const auto& epoch : s.epochs) {
    if (epoch.shadow >= static_cast<int>(net.fixed_points.size()))
      throw std::invalid_argument(
          "epoch CSV: shadow index " + std::to_string(epoch.shadow) +
          " is not a fixed point of the given network");
    const std::string label =
        epoch.shadow >= 0 ? to_string(net.fixed_points[epoch.shadow].active)
                          : "off-network";
    out << k++ << ',' << epoch.boundary << ',' << epoch.duration << ','
        << fmt(epoch.valley) << ",\"" << label << "\"\n";
  }
}

namespace {

[[noreturn]] void bad_epoch_csv(std::size_t line_no, const std::string& why) {
  throw std::invalid_argument("epoch CSV, line " + std::to_string(line_no) +
                              ": " + why);
}

template <typename T>
T parse_number(const std::string& field, std::size_t line_no) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  std::from_chars_result res;
  if constexpr (std::is_floating_point_v<T>)
    res = std::from_chars(first, last, value, std::chars_format::general);
  else
    res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last)
    bad_epoch_csv(line_no, "'" + field + "' is not a number");
  return value;
}

}  // namespace

std::vector<EpochRow> read_epoch_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("epoch CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "k,boundary_i,T_k,X_k,shadowed_fixed_point")
    throw std::invalid_argument("epoch CSV: unexpected header '" + line + "'");

  std::vector<EpochRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    // Four numeric fields, then the label as the rest of the line (it is
    // quoted because xi_{...} labels contain commas).
    std::array<std::string, 4> numeric;
    std::size_t start = 0;
    for (auto& field : numeric) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos)
        bad_epoch_csv(line_no, "expected 5 fields");
      field = line.substr(start, comma - start);
      start = comma + 1;
    }
    std::string shadow = line.substr(start);
    if (shadow.size() >= 2 && shadow.front() == '"' && shadow.back() == '"')
      shadow = shadow.substr(1, shadow.size() - 2);

    EpochRow row;
    row.k = parse_number<int>(numeric[0], line_no);
    row.boundary = parse_number<long>(numeric[1], line_no);
    row.duration = parse_number<long>(numeric[2], line_no);
    row.valley = parse_number<double>(numeric[3], line_no);
    row.shadow = std::move(shadow);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_fit_curve_csv(const FitResult& fit,
                         const std::vector<double>& valleys,
                         std::ostream& out) {
  // Re-derive the single-geometric coefficient the same way fit_decay scores
  // rms_pure_lambda2: the projection of the data onto lambda2^k alone.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < valleys.size(); ++i) {
    const double g = std::pow(fit.lambda2, static_cast<double>(i));
    num += g * valleys[i];
    den += g * g;
  }
  const double c_pure = den > 0.0 ? num / den : 0.0;

  out << "k,X_data,X_model,X_pure\n";
  for (std::size_t i = 0; i < valleys.size(); ++i) {
    const auto k = static_cast<double>(i);
    const double model =
        fit.c1 * std::pow(fit.lambda2, k) +
        fit.c2 * std::pow(fit.lambda1_mod, k) *
            std::cos(fit.lambda1_arg * k + fit.c3);
    const double pure = c_pure * std::pow(fit.lambda2, k);
    out << (i + 1) << ',' << fmt(valleys[i]) << ',' << fmt(model) << ','
        << fmt(pure) << '\n';
  }
}

void write_sweep_csv(const std::vector<SweepCell>& cells, std::ostream& out) {
  out << "j,p,q,delta,delta_star,fas,theorem,agreement,status\n";
  for (const auto& c : cells)
    out << c.j << ',' << c.p << ',' << c.q << ',' << fmt(c.delta) << ','
        << fmt(c.delta_star) << ',' << bool_str(c.fas) << ','
        << bool_str(c.theorem) << ',' << bool_str(c.agreement) << ','
        << (c.status == CheckStatus::Decided ? "decided" : "resonant")
        << '\n';
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw std::runtime_error("error while reading " + path);
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("error while writing " + path);
}

}  // namespace ringhet

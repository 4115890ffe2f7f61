#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linar/connectivity.hpp"
#include "linar/geometry.hpp"
#include "linar/graph.hpp"

namespace linar {

/// A deployment: node positions plus the radio model that induces the graph.
struct Topology {
  FieldSize field;
  double range = 20.0;
  double sensing_range = 20.0;
  int k = 1;
  std::uint64_t seed = 0;
  std::vector<Position> nodes;  // index == NodeId

  std::size_t size() const { return nodes.size(); }

  friend bool operator==(const Topology&, const Topology&) = default;
};

/// Unit-disk graph over an arbitrary position list.
inline Graph unit_disk_graph(const std::vector<Position>& pos, double range) {
  Graph g(pos.size());
  for (NodeId a = 0; a < static_cast<NodeId>(pos.size()); ++a)
    for (NodeId b = a + 1; b < static_cast<NodeId>(pos.size()); ++b)
      if (in_range(pos[a], pos[b], range)) g.add_edge(a, b);
  return g;
}

inline Graph to_graph(const Topology& t) { return unit_disk_graph(t.nodes, t.range); }

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TopologyParseError : public std::runtime_error {
 public:
  TopologyParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Uniform double in [0,1) from the top 53 bits; independent of the
/// standard library's distribution implementation.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct GenerateOptions {
  int max_attempts = 5000;
  /// Average degree the first attempts aim for; adapted on every rejection.
  double initial_mean_degree = 0.0;
};

/// Seeded rejection sampler for unit-disk deployments with vertex
/// connectivity exactly `target_k`.
///
/// Nodes are scattered in a square sub-region of the field whose side is
/// adapted between attempts: shrunk when the sample is under-connected,
/// grown when it is over-connected. Only the final connectivity check
/// decides acceptance.
inline Topology generate(int n, int target_k, FieldSize field, double range, std::uint64_t seed,
                         GenerateOptions opts = {}) {
  if (target_k < 1) throw std::domain_error("generate: target_k must be >= 1");
  if (n < target_k + 1) throw std::domain_error("generate: need n >= target_k + 1");
  if (!(range > 0.0)) throw std::domain_error("generate: range must be positive");
  if (!(field.width > 0.0 && field.height > 0.0)) throw std::domain_error("generate: empty field");

  std::mt19937_64 rng(seed);
  const double max_side = std::min(field.width, field.height);
  const double mean_deg = opts.initial_mean_degree > 0 ? opts.initial_mean_degree : 2.0 * target_k + 5.0;
  const double pi = 3.14159265358979323846;
  double side = std::min(max_side, range * std::sqrt((n - 1) * pi / mean_deg));

  Topology t;
  t.field = field;
  t.range = range;
  t.sensing_range = range;
  t.k = target_k;
  t.seed = seed;

  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    const double ox = unit_uniform(rng) * (field.width - side);
    const double oy = unit_uniform(rng) * (field.height - side);
    t.nodes.resize(n);
    for (auto& p : t.nodes) {
      p.x = quantize_coord(std::clamp(ox + unit_uniform(rng) * side, 0.0, field.width));
      p.y = quantize_coord(std::clamp(oy + unit_uniform(rng) * side, 0.0, field.height));
    }
    const Graph g = to_graph(t);
    const int kappa = static_cast<int>(g.min_degree()) < target_k ? -1 : vertex_connectivity(g).kappa;
    if (kappa == target_k) return t;
    if (kappa < target_k)
      side = std::max(range * 0.05, side * 0.96);
    else
      side = std::min(max_side, side * 1.04);
  }
  throw GenerationError("generate: no topology with kappa == " + std::to_string(target_k) + " for n=" +
                        std::to_string(n) + ", range=" + format_coord(range) + ", field=" +
                        format_coord(field.width) + "x" + format_coord(field.height) + " after " +
                        std::to_string(opts.max_attempts) + " attempts");
}

inline void write_topology(std::ostream& os, const Topology& t) {
  os << "field " << format_coord(t.field.width) << ' ' << format_coord(t.field.height) << '\n';
  os << "range " << format_coord(t.range) << '\n';
  os << "sensing " << format_coord(t.sensing_range) << '\n';
  os << "k " << t.k << '\n';
  os << "seed " << t.seed << '\n';
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    os << "node " << i << ' ' << format_coord(t.nodes[i].x) << ' ' << format_coord(t.nodes[i].y) << '\n';
}

namespace detail {

struct Token {
  std::string text;
  int column;
};

inline std::vector<Token> split_tokens(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size() || line[i] == '#') break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

inline double parse_number(const Token& tok, int line) {
  char* end = nullptr;
  double v = std::strtod(tok.text.c_str(), &end);
  if (end == tok.text.c_str() || *end != '\0' || !std::isfinite(v))
    throw TopologyParseError(line, tok.column, "expected a number, got '" + tok.text + "'");
  return v;
}

inline long long parse_integer(const Token& tok, int line) {
  char* end = nullptr;
  long long v = std::strtoll(tok.text.c_str(), &end, 10);
  if (end == tok.text.c_str() || *end != '\0')
    throw TopologyParseError(line, tok.column, "expected an integer, got '" + tok.text + "'");
  return v;
}

}  // namespace detail

inline Topology read_topology(std::istream& is) {
  using detail::Token;
  Topology t;
  t.nodes.clear();
  bool have_field = false, have_range = false, have_sensing = false, have_k = false;
  std::vector<std::pair<long long, Position>> raw;
  std::vector<int> raw_line;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto toks = detail::split_tokens(line);
    if (toks.empty()) continue;
    const std::string& key = toks[0].text;
    auto need = [&](std::size_t count) {
      if (toks.size() != count)
        throw TopologyParseError(lineno, toks.size() < count ? static_cast<int>(line.size()) + 1 : toks[count].column,
                                 "'" + key + "' expects " + std::to_string(count - 1) + " value(s)");
    };
    if (key == "field") {
      need(3);
      t.field.width = detail::parse_number(toks[1], lineno);
      t.field.height = detail::parse_number(toks[2], lineno);
      if (!(t.field.width > 0 && t.field.height > 0)) throw TopologyParseError(lineno, toks[1].column, "field must be positive");
      have_field = true;
    } else if (key == "range") {
      need(2);
      t.range = detail::parse_number(toks[1], lineno);
      if (!(t.range > 0)) throw TopologyParseError(lineno, toks[1].column, "range must be positive");
      have_range = true;
    } else if (key == "sensing") {
      need(2);
      t.sensing_range = detail::parse_number(toks[1], lineno);
      have_sensing = true;
    } else if (key == "k") {
      need(2);
      t.k = static_cast<int>(detail::parse_integer(toks[1], lineno));
      have_k = true;
    } else if (key == "seed") {
      need(2);
      t.seed = static_cast<std::uint64_t>(detail::parse_integer(toks[1], lineno));
    } else if (key == "node") {
      need(4);
      long long id = detail::parse_integer(toks[1], lineno);
      if (id < 0) throw TopologyParseError(lineno, toks[1].column, "negative node id");
      Position p{detail::parse_number(toks[2], lineno), detail::parse_number(toks[3], lineno)};
      raw.emplace_back(id, p);
      raw_line.push_back(lineno);
    } else {
      throw TopologyParseError(lineno, toks[0].column, "unknown directive '" + key + "'");
    }
  }
  if (!have_field) throw TopologyParseError(lineno + 1, 1, "missing 'field' line");
  if (!have_range) throw TopologyParseError(lineno + 1, 1, "missing 'range' line");
  if (!have_k) throw TopologyParseError(lineno + 1, 1, "missing 'k' line");
  if (!have_sensing) t.sensing_range = t.range;

  t.nodes.assign(raw.size(), Position{});
  std::vector<int> seen(raw.size(), 0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [id, p] = raw[i];
    if (id >= static_cast<long long>(raw.size()))
      throw TopologyParseError(raw_line[i], 6, "node id " + std::to_string(id) + " breaks the dense 0..n-1 numbering");
    if (seen[id]) throw TopologyParseError(raw_line[i], 6, "duplicate node id " + std::to_string(id));
    if (!t.field.contains(p))
      throw TopologyParseError(raw_line[i], 1, "node " + std::to_string(id) + " lies outside the field");
    seen[id] = 1;
    t.nodes[id] = p;
  }
  return t;
}

inline void save_topology(const Topology& t, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_topology(os, t);
}

inline Topology load_topology(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_topology(is);
}

}  // namespace linar

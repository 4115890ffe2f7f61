#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linar/baselines.hpp"
#include "linar/connectivity.hpp"
#include "linar/coverage.hpp"
#include "linar/simulator.hpp"
#include "linar/topology.hpp"

namespace linar {

inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names{"linar", "mccr", "tapu", "greedy", "localized", "basic"};
  return names;
}

struct ExperimentConfig {
  std::vector<int> n{20, 40};
  std::vector<int> k{1, 2, 3};
  std::vector<double> beta{0.0};
  double failure_fraction = 0.2;
  int repetitions = 10;
  std::uint64_t seed = 1;
  std::vector<std::string> algorithms = known_algorithms();
  FieldSize field{200.0, 200.0};
  double range = 20.0;
  double sensing_range = 20.0;
  double resolution = 0.0;  // coverage grid step; 0 picks the default for the field
  std::string output_dir = "out";
  SimConfig sim{};

  double coverage_resolution() const { return resolution > 0 ? resolution : default_resolution(field); }
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_value(const std::string& text, const std::string& key, int line) {
  std::istringstream is(text);
  T v{};
  is >> v;
  if (!is || !(is >> std::ws).eof())
    throw ConfigError("line " + std::to_string(line) + ": bad value '" + text + "' for " + key);
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key, int line) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_value<T>(item, key, line));
  return out;
}

}  // namespace detail

/// Rejects empty lists, unknown algorithms and out-of-range values.
inline void validate_config(const ExperimentConfig& c) {
  if (c.n.empty() || c.k.empty() || c.beta.empty() || c.algorithms.empty())
    throw ConfigError("n, k, beta and algorithms must be nonempty");
  if (!(c.failure_fraction > 0.0 && c.failure_fraction < 1.0)) throw ConfigError("failure_fraction must be in (0,1)");
  if (c.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  for (int k : c.k)
    if (k < 1) throw ConfigError("k must be >= 1");
  for (int n : c.n)
    for (int k : c.k)
      if (n < k + 1) throw ConfigError("n = " + std::to_string(n) + " too small for k = " + std::to_string(k));
  for (double b : c.beta)
    if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("beta must be in [0,1]");
  for (const auto& a : c.algorithms)
    if (std::find(known_algorithms().begin(), known_algorithms().end(), a) == known_algorithms().end())
      throw ConfigError("unknown algorithm '" + a + "'");
  if (!(c.range > 0) || !(c.sensing_range > 0)) throw ConfigError("range and sensing_range must be positive");
  if (!(c.field.width > 0) || !(c.field.height > 0)) throw ConfigError("field must be nonempty");
}

/// Applies `key = value` lines on top of `base`. '#' starts a comment;
/// lists are comma separated.
inline ExperimentConfig parse_config(std::istream& is, ExperimentConfig base = {}) {
  using namespace detail;
  ExperimentConfig c = std::move(base);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(raw.substr(0, eq));
    const std::string val = trim(raw.substr(eq + 1));
    if (val.empty()) throw ConfigError("line " + std::to_string(line) + ": empty value for " + key);
    if (key == "n")
      c.n = parse_list<int>(val, key, line);
    else if (key == "k")
      c.k = parse_list<int>(val, key, line);
    else if (key == "beta")
      c.beta = parse_list<double>(val, key, line);
    else if (key == "algorithms")
      c.algorithms = split_list(val);
    else if (key == "failure_fraction")
      c.failure_fraction = parse_value<double>(val, key, line);
    else if (key == "repetitions")
      c.repetitions = parse_value<int>(val, key, line);
    else if (key == "seed")
      c.seed = parse_value<std::uint64_t>(val, key, line);
    else if (key == "field_width")
      c.field.width = parse_value<double>(val, key, line);
    else if (key == "field_height")
      c.field.height = parse_value<double>(val, key, line);
    else if (key == "range")
      c.range = parse_value<double>(val, key, line);
    else if (key == "sensing_range")
      c.sensing_range = parse_value<double>(val, key, line);
    else if (key == "resolution")
      c.resolution = parse_value<double>(val, key, line);
    else if (key == "output_dir")
      c.output_dir = val;
    else if (key == "ts")
      c.sim.ts = parse_value<double>(val, key, line);
    else if (key == "latency")
      c.sim.latency = parse_value<double>(val, key, line);
    else if (key == "beacon_period")
      c.sim.beacon_period = parse_value<double>(val, key, line);
    else if (key == "beacon_timeout")
      c.sim.beacon_timeout = parse_value<double>(val, key, line);
    else if (key == "search_timeout_factor")
      c.sim.search_timeout_factor = parse_value<double>(val, key, line);
    else
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
  validate_config(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  return parse_config(is, std::move(base));
}

/// One CSV row: a setup row (event 0) or one failure event of one run.
struct MetricsRecord {
  std::string algorithm;
  int n = 0;
  int k = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  int event = 0;
  NodeId failed = -1;
  std::string failed_label;    // ground truth on the live graph before the failure
  std::string protocol_label;  // LINAR's own label for the failed node
  std::string status = "ok";
  int moves = 0;
  double movement_m = 0.0;
  ByteLedger::Counters bytes{};
  ByteLedger::Counters counts{};
  int kappa_before = 0;
  int kappa_after = 0;
  double primary_loss_pct = 0.0;
  double general_loss_pct = 0.0;
  double event_time_s = 0.0;

  std::uint64_t total_bytes() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < kMessageKinds; ++i)
      if (i != static_cast<std::size_t>(MessageKind::Beacon)) s += bytes[i];
    return s;
  }
  std::uint64_t total_messages() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < kMessageKinds; ++i)
      if (i != static_cast<std::size_t>(MessageKind::Beacon)) s += counts[i];
    return s;
  }
  bool restored() const { return status == "ok" && kappa_after >= kappa_before; }
};

// ---- CSV -------------------------------------------------------------------

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string fmt_real(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string fmt_beta(double b) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", b);
  return buf;
}

inline std::vector<std::string> raw_header() {
  std::vector<std::string> h{"algorithm", "n",           "k",       "beta",   "seed",
                             "event",     "failed",      "failed_label", "protocol_label", "status",
                             "moves",     "movement_m",  "bytes_total",  "messages_total"};
  for (auto name : kMessageKindNames) h.push_back("bytes_" + std::string(name));
  for (auto name : kMessageKindNames) h.push_back("count_" + std::string(name));
  for (const char* c : {"kappa_before", "kappa_after", "restored", "primary_loss_pct", "general_loss_pct", "event_time_s"})
    h.emplace_back(c);
  return h;
}

inline void write_csv_line(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << csv_escape(cells[i]);
  }
  os << '\n';
}

inline std::vector<std::string> raw_cells(const MetricsRecord& r) {
  std::vector<std::string> c{r.algorithm,
                             std::to_string(r.n),
                             std::to_string(r.k),
                             fmt_beta(r.beta),
                             std::to_string(r.seed),
                             std::to_string(r.event),
                             r.failed >= 0 ? std::to_string(r.failed) : std::string(),
                             r.failed_label,
                             r.protocol_label,
                             r.status,
                             std::to_string(r.moves),
                             fmt_real(r.movement_m),
                             std::to_string(r.total_bytes()),
                             std::to_string(r.total_messages())};
  for (auto b : r.bytes) c.push_back(std::to_string(b));
  for (auto n : r.counts) c.push_back(std::to_string(n));
  c.push_back(std::to_string(r.kappa_before));
  c.push_back(std::to_string(r.kappa_after));
  c.push_back(r.restored() ? "1" : "0");
  c.push_back(fmt_real(r.primary_loss_pct, 4));
  c.push_back(fmt_real(r.general_loss_pct, 4));
  c.push_back(fmt_real(r.event_time_s, 3));
  return c;
}

inline void write_raw_csv(std::ostream& os, const std::vector<MetricsRecord>& rows) {
  write_csv_line(os, raw_header());
  for (const auto& r : rows) write_csv_line(os, raw_cells(r));
}

class CsvSchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed CSV: header plus rows, quoted fields allowed.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw CsvSchemaError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  auto end_record = [&] {
    rec.push_back(std::move(field));
    field.clear();
    if (t.header.empty())
      t.header = std::move(rec);
    else
      t.rows.push_back(std::move(rec));
    rec.clear();
    any = false;
  };
  char c;
  while (is.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      rec.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (quoted) throw CsvSchemaError("unterminated quoted field");
  if (any || !field.empty()) end_record();
  for (const auto& r : t.rows)
    if (r.size() != t.header.size()) throw CsvSchemaError("row width differs from header");
  return t;
}

// ---- runs ------------------------------------------------------------------

/// Seeds of one repetition; every algorithm and β sees the same topology and
/// the same failure order.
inline std::uint64_t run_seed(std::uint64_t base, int n, int k, int rep) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(rep)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32 | out[1]) % 1'000'000'000ULL;
}

inline std::vector<NodeId> failure_order(int n, double fraction, std::uint64_t seed) {
  std::vector<NodeId> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::shuffle(ids.begin(), ids.end(), rng);
  auto count = static_cast<std::size_t>(std::lround(fraction * n));
  count = std::min(count, ids.size() > 0 ? ids.size() - 1 : 0);
  ids.resize(count);
  return ids;
}

struct RunSpec {
  std::string algorithm;
  int k = 1;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::vector<NodeId> failures;
};

namespace detail {

inline int kappa_of(const Graph& g) { return g.size() == 0 ? 0 : vertex_connectivity(g).kappa; }

inline std::string label_of(const Graph& g, NodeId v) {
  if (g.size() < 3) return "";
  return std::string(to_string(is_trusted_oracle(g, v) ? NodeStatus::Trusted : NodeStatus::Joint));
}

inline MetricsRecord base_record(const RunSpec& spec, const Topology& topo) {
  MetricsRecord r;
  r.algorithm = spec.algorithm;
  r.n = static_cast<int>(topo.nodes.size());
  r.k = spec.k;
  r.beta = spec.beta;
  r.seed = spec.seed;
  return r;
}

inline void fill_coverage(MetricsRecord& r, const Topology& topo, const std::vector<Position>& now, double res) {
  auto rep = coverage_losses(topo.nodes, now, topo.field, topo.sensing_range, res);
  r.primary_loss_pct = rep.primary_loss_pct;
  r.general_loss_pct = rep.general_loss_pct;
}

inline ByteLedger::Counters diff(const ByteLedger::Counters& a, const ByteLedger::Counters& b) {
  ByteLedger::Counters d{};
  for (std::size_t i = 0; i < kMessageKinds; ++i) d[i] = a[i] - b[i];
  return d;
}

inline std::vector<MetricsRecord> run_linar(const RunSpec& spec, const Topology& topo, const SimConfig& sc,
                                            double res) {
  std::vector<MetricsRecord> rows;
  Simulator sim(topo, spec.k, spec.beta, sc);
  MetricsRecord setup = base_record(spec, topo);
  sim.run_phase1();
  setup.bytes = sim.ledger().bytes_by_kind();
  setup.counts = sim.ledger().counts_by_kind();
  setup.kappa_before = setup.kappa_after = kappa_of(sim.live_graph().graph);
  setup.event_time_s = sim.last_protocol_time();
  rows.push_back(setup);

  int event = 0;
  for (NodeId w : spec.failures) {
    MetricsRecord r = base_record(spec, topo);
    r.event = ++event;
    r.failed = w;
    auto before = sim.live_graph();
    r.kappa_before = kappa_of(before.graph);
    r.failed_label = label_of(before.graph, *before.local(w));
    r.protocol_label = to_string(sim.agent(w).status());
    const auto b0 = sim.ledger().bytes_by_kind();
    const auto c0 = sim.ledger().counts_by_kind();
    try {
      auto ep = sim.fail_node(w);
      r.moves = ep.moves;
      r.movement_m = ep.movement;
      r.event_time_s = std::max(0.0, ep.end_time - ep.start_time);
    } catch (const SimulationError& e) {
      r.status = std::string("error: ") + e.what();
      rows.push_back(r);
      break;  // simulator state is no longer meaningful
    }
    r.bytes = diff(sim.ledger().bytes_by_kind(), b0);
    r.counts = diff(sim.ledger().counts_by_kind(), c0);
    r.kappa_after = kappa_of(sim.live_graph().graph);
    fill_coverage(r, topo, sim.live_positions(), res);
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<MetricsRecord> run_central(const RunSpec& spec, const Topology& topo, double res) {
  std::vector<MetricsRecord> rows;
  Snapshot cur = snapshot_of(topo);
  MetricsRecord setup = base_record(spec, topo);
  setup.kappa_before = setup.kappa_after = kappa_of(cur.graph());
  rows.push_back(setup);
  SparePool spares(Position{0.0, 0.0}, spec.failures.size(), static_cast<NodeId>(topo.nodes.size()));

  int event = 0;
  for (NodeId w : spec.failures) {
    MetricsRecord r = base_record(spec, topo);
    r.event = ++event;
    r.failed = w;
    Graph g = cur.graph();
    r.kappa_before = kappa_of(g);
    r.failed_label = label_of(g, static_cast<NodeId>(cur.index_of(w)));
    RestorationPlan plan;
    try {
      const std::string& a = spec.algorithm;
      if (a == "mccr")
        plan = mccr_restore(cur, w, spec.k);
      else if (a == "tapu")
        plan = tapu_restore(cur, w, spec.k);
      else if (a == "greedy")
        plan = greedy_restore(cur, w, spec.k);
      else if (a == "localized")
        plan = localized_restore(cur, w, spec.k);
      else
        plan = spares.restore(cur, w);
    } catch (const RestorationInfeasible& e) {
      r.status = std::string("infeasible: ") + e.what();
      plan = {};
    }
    Snapshot next = apply_plan(cur, w, plan);
    ByteLedger ledger;
    if (spec.algorithm == "basic")
      basic_ledger(cur.without(w), ledger);
    else
      central_ledger(cur.without(w), plan, ledger);
    r.bytes = ledger.bytes_by_kind();
    r.counts = ledger.counts_by_kind();
    r.moves = static_cast<int>(plan.moves.size());
    r.movement_m = plan.total_cost;
    cur = std::move(next);
    r.kappa_after = kappa_of(cur.graph());
    fill_coverage(r, topo, cur.pos, res);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace detail

/// Runs one algorithm over one topology and failure sequence.
inline std::vector<MetricsRecord> run_scenario(const RunSpec& spec, const Topology& topo, const SimConfig& sc,
                                               double resolution) {
  if (spec.algorithm == "linar") return detail::run_linar(spec, topo, sc, resolution);
  return detail::run_central(spec, topo, resolution);
}

/// Every (n, k, repetition, algorithm, β) combination in a fixed order.
/// Baselines ignore β and run once, reported with β = 0.
inline std::vector<MetricsRecord> run_sweep(const ExperimentConfig& cfg, std::ostream* progress = nullptr) {
  validate_config(cfg);
  std::vector<MetricsRecord> rows;
  for (int n : cfg.n)
    for (int k : cfg.k)
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        const std::uint64_t seed = run_seed(cfg.seed, n, k, rep);
        Topology topo;
        std::string gen_error;
        try {
          topo = generate(n, k, cfg.field, cfg.range, seed);
          topo.sensing_range = cfg.sensing_range;
        } catch (const std::exception& e) {
          gen_error = e.what();
        }
        const auto failures = failure_order(n, cfg.failure_fraction, seed);
        for (const auto& alg : cfg.algorithms) {
          std::vector<double> betas = alg == "linar" ? cfg.beta : std::vector<double>{0.0};
          for (double b : betas) {
            RunSpec spec{alg, k, b, seed, failures};
            if (!gen_error.empty()) {
              MetricsRecord r;
              r.algorithm = alg;
              r.n = n;
              r.k = k;
              r.beta = b;
              r.seed = seed;
              r.status = "error: " + gen_error;
              rows.push_back(r);
              continue;
            }
            try {
              auto part = run_scenario(spec, topo, cfg.sim, cfg.coverage_resolution());
              rows.insert(rows.end(), part.begin(), part.end());
            } catch (const std::exception& e) {
              MetricsRecord r = detail::base_record(spec, topo);
              r.status = std::string("error: ") + e.what();
              rows.push_back(r);
            }
            if (progress) *progress << alg << " n=" << n << " k=" << k << " beta=" << fmt_beta(b) << " seed=" << seed << '\n';
          }
        }
      }
  return rows;
}

// ---- aggregation -----------------------------------------------------------

/// Per-run totals, keyed by (algorithm, n, k, β, seed).
struct RunSummary {
  std::string algorithm;
  int n = 0, k = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  int events = 0;
  int restored = 0;
  int infeasible = 0;
  double movement_m = 0.0;
  double bytes = 0.0;
  double messages = 0.0;
  double primary_loss_pct = 0.0;  // after the last event
  double general_loss_pct = 0.0;
  double event_time_s = 0.0;      // mean over failure events
};

/// Groups raw CSV rows into runs. Works from the text so aggregates stay a
/// pure function of the raw file.
inline std::vector<RunSummary> summarize_runs(const CsvTable& t) {
  const auto ca = t.column("algorithm"), cn = t.column("n"), ck = t.column("k"), cb = t.column("beta"),
             cs = t.column("seed"), ce = t.column("event"), cst = t.column("status"), cm = t.column("movement_m"),
             cby = t.column("bytes_total"), cmsg = t.column("messages_total"), cr = t.column("restored"),
             cp = t.column("primary_loss_pct"), cg = t.column("general_loss_pct"), ct = t.column("event_time_s");
  std::vector<RunSummary> runs;
  std::map<std::tuple<std::string, int, int, std::string, std::string>, std::size_t> index;
  for (const auto& row : t.rows) {
    auto key = std::make_tuple(row[ca], std::stoi(row[cn]), std::stoi(row[ck]), row[cb], row[cs]);
    auto [it, fresh] = index.try_emplace(key, runs.size());
    if (fresh) {
      RunSummary s;
      s.algorithm = row[ca];
      s.n = std::stoi(row[cn]);
      s.k = std::stoi(row[ck]);
      s.beta = std::stod(row[cb]);
      s.seed = std::stoull(row[cs]);
      runs.push_back(s);
    }
    RunSummary& s = runs[it->second];
    s.movement_m += std::stod(row[cm]);
    s.bytes += std::stod(row[cby]);
    s.messages += std::stod(row[cmsg]);
    if (std::stoi(row[ce]) == 0) continue;
    ++s.events;
    if (row[cr] == "1") ++s.restored;
    if (row[cst].rfind("infeasible", 0) == 0) ++s.infeasible;
    s.primary_loss_pct = std::stod(row[cp]);
    s.general_loss_pct = std::stod(row[cg]);
    s.event_time_s += std::stod(row[ct]);
  }
  for (auto& s : runs)
    if (s.events) s.event_time_s /= s.events;
  return runs;
}

inline void write_aggregate_csv(std::ostream& os, const std::vector<RunSummary>& runs) {
  write_csv_line(os, {"algorithm", "n", "k", "beta", "runs", "events", "restored_fraction", "infeasible",
                      "movement_m_mean", "bytes_mean", "messages_mean", "primary_loss_pct_mean",
                      "general_loss_pct_mean", "event_time_s_mean"});
  struct Acc {
    int runs = 0, events = 0, restored = 0, infeasible = 0;
    double mv = 0, by = 0, msg = 0, pl = 0, gl = 0, et = 0;
  };
  std::vector<std::tuple<std::string, int, int, double>> order;
  std::map<std::tuple<std::string, int, int, double>, Acc> acc;
  for (const auto& s : runs) {
    auto key = std::make_tuple(s.algorithm, s.n, s.k, s.beta);
    if (!acc.count(key)) order.push_back(key);
    Acc& a = acc[key];
    ++a.runs;
    a.events += s.events;
    a.restored += s.restored;
    a.infeasible += s.infeasible;
    a.mv += s.movement_m;
    a.by += s.bytes;
    a.msg += s.messages;
    a.pl += s.primary_loss_pct;
    a.gl += s.general_loss_pct;
    a.et += s.event_time_s;
  }
  for (const auto& key : order) {
    const Acc& a = acc[key];
    const double r = a.runs;
    write_csv_line(os, {std::get<0>(key), std::to_string(std::get<1>(key)), std::to_string(std::get<2>(key)),
                        fmt_beta(std::get<3>(key)), std::to_string(a.runs), std::to_string(a.events),
                        fmt_real(a.events ? static_cast<double>(a.restored) / a.events : 1.0, 4),
                        std::to_string(a.infeasible), fmt_real(a.mv / r), fmt_real(a.by / r, 1),
                        fmt_real(a.msg / r, 1), fmt_real(a.pl / r, 4), fmt_real(a.gl / r, 4), fmt_real(a.et / r, 3)});
  }
}

// ---- plot data ---------------------------------------------------------------

struct SeriesPoint {
  std::string series;
  double x = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

struct FigureSpec {
  std::string name;
  std::string x;       // "n", "k" or "beta"
  std::string metric;  // RunSummary field
  bool linar_only = false;
};

inline const std::vector<FigureSpec>& figure_specs() {
  static const std::vector<FigureSpec> specs{
      {"movement_vs_n", "n", "movement_m", false},
      {"movement_vs_k", "k", "movement_m", false},
      {"bytes_vs_n", "n", "bytes", false},
      {"bytes_vs_k", "k", "bytes", false},
      {"event_time_vs_n", "n", "event_time_s", true},
      {"movement_vs_beta", "beta", "movement_m", true},
      {"primary_loss_vs_beta", "beta", "primary_loss_pct", true},
      {"general_loss_vs_beta", "beta", "general_loss_pct", true},
      {"primary_loss_vs_n", "n", "primary_loss_pct", false},
  };
  return specs;
}

inline double metric_of(const RunSummary& s, const std::string& m) {
  if (m == "movement_m") return s.movement_m;
  if (m == "bytes") return s.bytes;
  if (m == "messages") return s.messages;
  if (m == "event_time_s") return s.event_time_s;
  if (m == "primary_loss_pct") return s.primary_loss_pct;
  if (m == "general_loss_pct") return s.general_loss_pct;
  throw CsvSchemaError("unknown metric '" + m + "'");
}

/// Series label: the algorithm, plus β for LINAR when the x axis is not β,
/// plus k when plotting against β.
inline std::string series_of(const RunSummary& s, const FigureSpec& f) {
  if (f.x == "beta") return s.algorithm + " k=" + std::to_string(s.k);
  if (s.algorithm == "linar") return "linar beta=" + fmt_beta(s.beta);
  return s.algorithm;
}

inline std::vector<SeriesPoint> figure_series(const std::vector<RunSummary>& runs, const FigureSpec& f) {
  std::map<std::pair<std::string, double>, std::vector<double>> groups;
  for (const auto& s : runs) {
    if (f.linar_only && s.algorithm != "linar") continue;
    const double x = f.x == "n" ? s.n : f.x == "k" ? s.k : s.beta;
    groups[{series_of(s, f), x}].push_back(metric_of(s, f.metric));
  }
  std::vector<SeriesPoint> out;
  for (const auto& [key, vals] : groups) {
    SeriesPoint p;
    p.series = key.first;
    p.x = key.second;
    p.count = vals.size();
    double sum = 0;
    for (double v : vals) sum += v;
    p.mean = sum / static_cast<double>(vals.size());
    if (vals.size() > 1) {
      double ss = 0;
      for (double v : vals) ss += (v - p.mean) * (v - p.mean);
      p.stderr_ = std::sqrt(ss / static_cast<double>(vals.size() - 1)) / std::sqrt(static_cast<double>(vals.size()));
    }
    out.push_back(p);
  }
  return out;
}

inline void write_series_csv(std::ostream& os, const std::vector<SeriesPoint>& pts) {
  write_csv_line(os, {"series", "x", "mean", "stderr", "count"});
  for (const auto& p : pts)
    write_csv_line(os, {p.series, fmt_beta(p.x), fmt_real(p.mean), fmt_real(p.stderr_), std::to_string(p.count)});
}

/// Keeps runs whose column equals value; keys are n, k, beta or algorithm.
inline std::vector<RunSummary> filter_runs(const std::vector<RunSummary>& runs, const std::string& key,
                                           const std::string& value) {
  std::vector<RunSummary> out;
  for (const auto& s : runs) {
    bool keep;
    if (key == "algorithm")
      keep = s.algorithm == value;
    else if (key == "n")
      keep = s.n == std::stoi(value);
    else if (key == "k")
      keep = s.k == std::stoi(value);
    else if (key == "beta")
      keep = s.beta == std::stod(value);
    else
      throw CsvSchemaError("cannot filter on '" + key + "'");
    if (keep) out.push_back(s);
  }
  return out;
}

}  // namespace linar

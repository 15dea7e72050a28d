#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dscd/bilevel.hpp"
#include "dscd/hybrid.hpp"
#include "dscd/objective.hpp"
#include "dscd/rng.hpp"

namespace dscd {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("parse_double: bad number '" + std::string(s) + "'");
  return v;
}

inline long parse_long(std::string_view s) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("parse_long: bad integer '" + std::string(s) + "'");
  return v;
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// One benchmark entrant. `lr` applies to the gradient steps and is therefore
// only meaningful for the adam optimizer; absent means constant 0.01.
struct MethodSpec {
  std::string optimizer;  // "adam" | "dscd" | "uniform"
  std::optional<LrSchedule> lr;
  bool with_dscd = false;
};

inline void validate_method(const MethodSpec& spec) {
  if (spec.optimizer != "adam" && spec.optimizer != "dscd" && spec.optimizer != "uniform")
    throw std::invalid_argument("unknown optimizer '" + spec.optimizer + "'");
  if (spec.optimizer != "adam") {
    if (spec.lr.has_value())
      throw std::invalid_argument("optimizer '" + spec.optimizer + "' takes no learning rate");
    if (spec.with_dscd)
      throw std::invalid_argument("with_dscd only applies to the adam optimizer");
  }
}

inline std::string lr_description(const LrSchedule& lr) {
  if (lr.kind == LrKind::constant) return format_double(lr.lr_start);
  return "linear:" + format_double(lr.lr_start) + ":" + format_double(lr.lr_end);
}

inline std::string method_label(const MethodSpec& spec) {
  if (spec.optimizer != "adam") return spec.optimizer;
  const LrSchedule lr = spec.lr.value_or(constant_lr(0.01));
  std::string label = "adam(" + lr_description(lr) + ")";
  if (spec.with_dscd) label += "+dscd";
  return label;
}

// "linear:A:B" with A, B > 0.
inline LrSchedule parse_lr_schedule(const std::string& text) {
  const std::string prefix = "linear:";
  if (text.rfind(prefix, 0) != 0)
    throw std::invalid_argument("lr schedule must look like linear:A:B, got '" + text + "'");
  const std::string rest = text.substr(prefix.size());
  const std::size_t colon = rest.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("lr schedule must look like linear:A:B, got '" + text + "'");
  const double a = parse_double(std::string_view(rest).substr(0, colon));
  const double b = parse_double(std::string_view(rest).substr(colon + 1));
  return linear_lr(a, b, 1);  // placeholder horizon; each run resizes it to its budget
}

struct BenchConfig {
  std::string objective = "styblinski-tang";
  int dim = 10;
  std::vector<MethodSpec> methods;
  int replicates = 20;
  long budget = 20000;
  std::uint64_t base_seed = 1;
  long k = 1000;
  long t = 50;
  std::string out_dir;  // optional; the CLI flag takes precedence
};

inline void validate_bench_config(const BenchConfig& config) {
  objective_by_name(config.objective, config.dim);  // throws on unknown name / bad dim
  if (config.methods.empty()) throw std::invalid_argument("bench config: methods must be non-empty");
  for (const MethodSpec& m : config.methods) validate_method(m);
  if (config.replicates < 1) throw std::invalid_argument("bench config: replicates must be >= 1");
  if (config.budget < 1) throw std::invalid_argument("bench config: budget must be >= 1");
  if (config.k < 1) throw std::invalid_argument("bench config: k must be >= 1");
  if (config.t < 1) throw std::invalid_argument("bench config: t must be >= 1");
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& known,
                                const std::string& where) {
  for (const auto& item : j.items())
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw std::runtime_error("unknown key '" + item.key() + "' in " + where);
}

}  // namespace detail

inline MethodSpec method_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::runtime_error("method entry must be an object");
  detail::reject_unknown_keys(j, {"optimizer", "lr", "lr_schedule", "with_dscd"}, "method entry");
  MethodSpec spec;
  spec.optimizer = j.at("optimizer").get<std::string>();
  if (j.contains("lr") && j.contains("lr_schedule"))
    throw std::runtime_error("method entry: lr and lr_schedule are mutually exclusive");
  if (j.contains("lr")) spec.lr = constant_lr(j.at("lr").get<double>());
  if (j.contains("lr_schedule")) spec.lr = parse_lr_schedule(j.at("lr_schedule").get<std::string>());
  if (j.contains("with_dscd")) spec.with_dscd = j.at("with_dscd").get<bool>();
  validate_method(spec);
  return spec;
}

inline nlohmann::json method_to_json(const MethodSpec& spec) {
  nlohmann::json j;
  j["optimizer"] = spec.optimizer;
  if (spec.lr.has_value()) {
    if (spec.lr->kind == LrKind::constant)
      j["lr"] = spec.lr->lr_start;
    else
      j["lr_schedule"] = lr_description(*spec.lr);
  }
  if (spec.with_dscd) j["with_dscd"] = true;
  return j;
}

inline BenchConfig bench_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::runtime_error("bench config must be a JSON object");
  detail::reject_unknown_keys(
      j, {"objective", "dim", "methods", "replicates", "budget", "base_seed", "k", "t", "out_dir"},
      "bench config");
  BenchConfig config;
  if (j.contains("objective")) config.objective = j.at("objective").get<std::string>();
  if (j.contains("dim")) config.dim = j.at("dim").get<int>();
  if (!j.contains("methods")) throw std::runtime_error("bench config: methods is required");
  if (!j.at("methods").is_array()) throw std::runtime_error("bench config: methods must be an array");
  for (const auto& m : j.at("methods")) config.methods.push_back(method_from_json(m));
  if (j.contains("replicates")) config.replicates = j.at("replicates").get<int>();
  if (j.contains("budget")) config.budget = j.at("budget").get<long>();
  if (j.contains("base_seed")) config.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("k")) config.k = j.at("k").get<long>();
  if (j.contains("t")) config.t = j.at("t").get<long>();
  if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();
  validate_bench_config(config);
  return config;
}

inline nlohmann::json bench_config_to_json(const BenchConfig& config) {
  nlohmann::json j;
  j["objective"] = config.objective;
  j["dim"] = config.dim;
  j["methods"] = nlohmann::json::array();
  for (const MethodSpec& m : config.methods) j["methods"].push_back(method_to_json(m));
  j["replicates"] = config.replicates;
  j["budget"] = config.budget;
  j["base_seed"] = config.base_seed;
  j["k"] = config.k;
  j["t"] = config.t;
  if (!config.out_dir.empty()) j["out_dir"] = config.out_dir;
  return j;
}

inline nlohmann::json json_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("cannot parse " + path + ": " + e.what());
  }
  return j;
}

inline BenchConfig bench_config_from_file(const std::string& path) {
  return bench_config_from_json(json_from_file(path));
}

inline HybridConfig hybrid_config_for(const MethodSpec& spec, const BenchConfig& config) {
  HybridConfig hc;
  hc.budget = config.budget;
  hc.window_capacity = config.k;
  if (spec.optimizer == "adam") {
    hc.initial_mode = StepKind::local;
    hc.t_switch = spec.with_dscd ? config.t : kNeverSwitch;
    hc.lr = spec.lr.value_or(constant_lr(0.01));
  } else {  // "dscd": global-only
    hc.initial_mode = StepKind::global;
    hc.t_switch = kNeverSwitch;
  }
  return hc;
}

// All runs, method-major: trace index = method_index * replicates + replicate.
// Replicate r of every method shares the seed base_seed + r, so methods are
// paired through identical initial positions.
inline std::vector<RunTrace> run_replicates(const BenchConfig& config) {
  validate_bench_config(config);
  const Objective obj = objective_by_name(config.objective, config.dim);
  std::vector<RunTrace> traces;
  traces.reserve(config.methods.size() * static_cast<std::size_t>(config.replicates));
  for (const MethodSpec& spec : config.methods) {
    for (int r = 0; r < config.replicates; ++r) {
      Rng rng(config.base_seed + static_cast<std::uint64_t>(r));
      if (spec.optimizer == "uniform")
        traces.push_back(run_baseline_uniform(obj, config.budget, rng));
      else
        traces.push_back(run_hybrid(obj, hybrid_config_for(spec, config), rng));
    }
  }
  return traces;
}

struct MedianCi {
  double median = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

inline double median_of_sorted(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n == 0) throw std::invalid_argument("median_of_sorted: empty input");
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Linear-interpolation quantile of a sorted sample (R type 7).
inline double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile_sorted: empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile_sorted: q outside [0, 1]");
  const double h = q * static_cast<double>(v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (h - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

// Sample median plus a seeded percentile-bootstrap CI of the median. Values
// are sorted up front, so the result does not depend on input order. The CI
// is widened to contain the point estimate when the percentile endpoints
// would exclude it.
inline MedianCi median_ci(std::vector<double> values, double confidence = 0.95,
                          int resamples = 10000, std::uint64_t seed = 0) {
  if (values.empty()) throw std::invalid_argument("median_ci: empty input");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("median_ci: confidence outside (0, 1)");
  if (resamples < 1) throw std::invalid_argument("median_ci: resamples must be >= 1");
  std::sort(values.begin(), values.end());
  const double med = median_of_sorted(values);
  if (values.size() == 1) return {med, med, med};

  Rng rng(seed);
  const std::size_t n = values.size();
  std::vector<double> boot(static_cast<std::size_t>(resamples));
  std::vector<double> resample(n);
  for (double& b : boot) {
    for (double& x : resample) x = values[rng.below(n)];
    std::sort(resample.begin(), resample.end());
    b = median_of_sorted(resample);
  }
  std::sort(boot.begin(), boot.end());
  const double tail = 0.5 * (1.0 - confidence);
  MedianCi out{med, quantile_sorted(boot, tail), quantile_sorted(boot, 1.0 - tail)};
  out.lo = std::min(out.lo, med);
  out.hi = std::max(out.hi, med);
  return out;
}

// Shared eval_index grid: every index when the budget is small, otherwise at
// most max_points indices evenly spaced and always including first and last.
inline std::vector<long> aggregate_grid(long budget, long max_points = 201) {
  if (budget < 1) throw std::invalid_argument("aggregate_grid: budget must be >= 1");
  if (max_points < 2) throw std::invalid_argument("aggregate_grid: max_points must be >= 2");
  std::vector<long> grid;
  if (budget <= max_points) {
    grid.resize(static_cast<std::size_t>(budget));
    for (long i = 0; i < budget; ++i) grid[static_cast<std::size_t>(i)] = i;
    return grid;
  }
  grid.reserve(static_cast<std::size_t>(max_points));
  for (long i = 0; i < max_points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(max_points - 1);
    const long idx = std::lround(f * static_cast<double>(budget - 1));
    if (grid.empty() || grid.back() != idx) grid.push_back(idx);
  }
  return grid;
}

struct AggregatePoint {
  long eval_index = 0;
  double median = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct MethodAggregate {
  std::string method;
  std::vector<AggregatePoint> points;
};

struct AggregateResult {
  std::vector<MethodAggregate> methods;
};

// Median best-so-far with bootstrap CI per method and grid index. Bootstrap
// seeds derive from (ci_seed, method index, grid position), so the result is
// reproducible and, because median_ci sorts, independent of replicate order.
inline AggregateResult aggregate_traces(const std::vector<std::string>& labels,
                                        const std::vector<RunTrace>& traces, int replicates,
                                        const std::vector<long>& grid, int resamples = 10000,
                                        std::uint64_t ci_seed = 0) {
  if (replicates < 1) throw std::invalid_argument("aggregate_traces: replicates must be >= 1");
  if (grid.empty()) throw std::invalid_argument("aggregate_traces: empty grid");
  if (traces.size() != labels.size() * static_cast<std::size_t>(replicates))
    throw std::invalid_argument("aggregate_traces: trace count must be methods * replicates");

  AggregateResult result;
  result.methods.reserve(labels.size());
  std::vector<double> values(static_cast<std::size_t>(replicates));
  for (std::size_t m = 0; m < labels.size(); ++m) {
    MethodAggregate agg;
    agg.method = labels[m];
    agg.points.reserve(grid.size());
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const long idx = grid[gi];
      for (int r = 0; r < replicates; ++r) {
        const RunTrace& trace = traces[m * static_cast<std::size_t>(replicates) + r];
        if (idx < 0 || idx >= static_cast<long>(trace.records.size()))
          throw std::invalid_argument("aggregate_traces: grid index outside trace");
        values[static_cast<std::size_t>(r)] = trace.records[static_cast<std::size_t>(idx)].best_so_far;
      }
      const MedianCi ci = median_ci(values, 0.95, resamples, mix_seed(mix_seed(ci_seed, m), gi));
      agg.points.push_back({idx, ci.median, ci.lo, ci.hi});
    }
    result.methods.push_back(std::move(agg));
  }
  return result;
}

inline std::vector<std::string> method_labels(const BenchConfig& config) {
  std::vector<std::string> labels;
  labels.reserve(config.methods.size());
  for (const MethodSpec& m : config.methods) labels.push_back(method_label(m));
  return labels;
}

inline constexpr const char* kTraceHeader =
    "eval_index,mode,dimension,loss,best_so_far,window_best,phi,accepted,lr";

inline void emit_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : trace.records) {
    out << r.eval_index << ',' << step_kind_name(r.kind) << ',';
    if (r.dimension >= 0) out << r.dimension;
    out << ',' << format_double(r.loss) << ',' << format_double(r.best_so_far) << ','
        << format_double(r.window_best) << ',' << format_double(r.phi) << ','
        << (r.accepted ? '1' : '0') << ',' << format_double(r.lr) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline constexpr const char* kAggregateHeader = "method,eval_index,median,ci_lo,ci_hi";

inline void emit_aggregate_csv(const AggregateResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kAggregateHeader << '\n';
  for (const MethodAggregate& m : result.methods)
    for (const AggregatePoint& p : m.points)
      out << m.method << ',' << p.eval_index << ',' << format_double(p.median) << ','
          << format_double(p.ci_lo) << ',' << format_double(p.ci_hi) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline AggregateResult read_aggregate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kAggregateHeader)
    throw std::runtime_error("bad aggregate header in " + path);
  AggregateResult result;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string_view, 5> cols;
    std::string_view rest = line;
    for (int c = 0; c < 4; ++c) {
      const std::size_t comma = rest.find(',');
      if (comma == std::string_view::npos) throw std::runtime_error("bad aggregate row in " + path);
      cols[c] = rest.substr(0, comma);
      rest.remove_prefix(comma + 1);
    }
    cols[4] = rest;
    if (result.methods.empty() || result.methods.back().method != cols[0])
      result.methods.push_back({std::string(cols[0]), {}});
    result.methods.back().points.push_back({parse_long(cols[1]), parse_double(cols[2]),
                                            parse_double(cols[3]), parse_double(cols[4])});
  }
  return result;
}

inline nlohmann::json aggregate_to_json(const AggregateResult& result, const BenchConfig& config) {
  nlohmann::json j;
  j["config"] = bench_config_to_json(config);
  j["x_axis"] = "evaluations";
  j["methods"] = nlohmann::json::array();
  for (const MethodAggregate& m : result.methods) {
    nlohmann::json jm;
    jm["method"] = m.method;
    jm["points"] = nlohmann::json::array();
    for (const AggregatePoint& p : m.points)
      jm["points"].push_back(
          {{"eval_index", p.eval_index}, {"median", p.median}, {"ci_lo", p.ci_lo}, {"ci_hi", p.ci_hi}});
    j["methods"].push_back(std::move(jm));
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

// Full study: run every method x replicate, aggregate on the shared grid,
// write aggregate.csv and summary.json under out_dir.
inline AggregateResult run_bench(const BenchConfig& config, const std::string& out_dir) {
  validate_bench_config(config);
  if (out_dir.empty()) throw std::invalid_argument("run_bench: output directory required");
  const std::vector<RunTrace> traces = run_replicates(config);
  const std::vector<long> grid = aggregate_grid(config.budget);
  const AggregateResult result = aggregate_traces(method_labels(config), traces, config.replicates,
                                                  grid, 10000, mix_seed(config.base_seed, 0x9caf));
  std::filesystem::create_directories(out_dir);
  emit_aggregate_csv(result, out_dir + "/aggregate.csv");
  write_text_file(out_dir + "/summary.json", aggregate_to_json(result, config).dump(2) + "\n");
  return result;
}

// Toy architecture-search run description: the search parameters plus the
// seed of the search's own random stream.
struct ToyRunConfig {
  ToySearchConfig search;
  std::uint64_t seed = 1;
};

inline ToyRunConfig toy_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::runtime_error("toy config must be a JSON object");
  detail::reject_unknown_keys(j,
                              {"budget", "t_switch", "window_capacity", "mix", "xi", "lr_alpha",
                               "lr_w", "n_train", "n_val", "data_seed", "checkpoint_every",
                               "threshold", "phi_cap", "proposal_half_width", "w_init_half_width",
                               "seed"},
                              "toy config");
  ToyRunConfig config;
  ToySearchConfig& s = config.search;
  if (j.contains("budget")) s.budget = j.at("budget").get<long>();
  if (j.contains("t_switch")) s.t_switch = j.at("t_switch").get<long>();
  if (j.contains("window_capacity")) s.window_capacity = j.at("window_capacity").get<long>();
  if (j.contains("mix")) {
    const std::string mix = j.at("mix").get<std::string>();
    if (mix == "sigmoid")
      s.mix = MixKind::sigmoid;
    else if (mix == "softmax")
      s.mix = MixKind::softmax;
    else
      throw std::runtime_error("toy config: mix must be 'sigmoid' or 'softmax'");
  }
  if (j.contains("xi")) s.xi = j.at("xi").get<double>();
  if (j.contains("lr_alpha")) s.lr_alpha = j.at("lr_alpha").get<double>();
  if (j.contains("lr_w")) s.lr_w = j.at("lr_w").get<double>();
  if (j.contains("n_train")) s.n_train = j.at("n_train").get<int>();
  if (j.contains("n_val")) s.n_val = j.at("n_val").get<int>();
  if (j.contains("data_seed")) s.data_seed = j.at("data_seed").get<std::uint64_t>();
  if (j.contains("checkpoint_every")) s.checkpoint_every = j.at("checkpoint_every").get<long>();
  if (j.contains("threshold")) s.threshold = j.at("threshold").get<double>();
  if (j.contains("phi_cap")) s.phi_cap = j.at("phi_cap").get<double>();
  if (j.contains("proposal_half_width")) s.proposal_half_width = j.at("proposal_half_width").get<double>();
  if (j.contains("w_init_half_width")) s.w_init_half_width = j.at("w_init_half_width").get<double>();
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  return config;
}

inline ToyRunConfig toy_config_from_file(const std::string& path) {
  return toy_config_from_json(json_from_file(path));
}

inline nlohmann::json toy_config_to_json(const ToyRunConfig& config) {
  const ToySearchConfig& s = config.search;
  nlohmann::json j;
  j["budget"] = s.budget;
  j["t_switch"] = s.t_switch;
  j["window_capacity"] = s.window_capacity;
  j["mix"] = s.mix == MixKind::sigmoid ? "sigmoid" : "softmax";
  j["xi"] = s.xi;
  j["lr_alpha"] = s.lr_alpha;
  j["lr_w"] = s.lr_w;
  j["n_train"] = s.n_train;
  j["n_val"] = s.n_val;
  j["data_seed"] = s.data_seed;
  j["checkpoint_every"] = s.checkpoint_every;
  j["threshold"] = s.threshold;
  j["phi_cap"] = s.phi_cap;
  j["proposal_half_width"] = s.proposal_half_width;
  j["w_init_half_width"] = s.w_init_half_width;
  j["seed"] = config.seed;
  return j;
}

// Runs the toy search and writes trace.csv plus checkpoints.json to out_dir.
inline ToySearchResult run_toy(const ToyRunConfig& config, const std::string& out_dir) {
  if (out_dir.empty()) throw std::invalid_argument("run_toy: output directory required");
  Rng rng(config.seed);
  ToySearchResult result = run_toy_search(config.search, rng);
  std::filesystem::create_directories(out_dir);
  emit_trace_csv(result.trace, out_dir + "/trace.csv");

  nlohmann::json j;
  j["config"] = toy_config_to_json(config);
  j["checkpoints"] = nlohmann::json::array();
  for (const SearchCheckpoint& c : result.checkpoints)
    j["checkpoints"].push_back(
        {{"step", c.step},
         {"group_means", {{"normal", c.group_means[0]}, {"reduction", c.group_means[1]}}},
         {"valid_after_discretization", c.valid_after_discretization}});
  const ValidityResult validity =
      validity_check(cell_masks(result.final_cell, config.search.threshold), result.final_cell.structure);
  j["final"] = {{"alpha",
                 {{"normal", result.final_cell.alpha[0]}, {"reduction", result.final_cell.alpha[1]}}},
                {"w", {{"normal", result.final_cell.w[0]}, {"reduction", result.final_cell.w[1]}}},
                {"group_means",
                 {{"normal", group_means(result.final_cell)[0]},
                  {"reduction", group_means(result.final_cell)[1]}}},
                {"valid_after_discretization", validity.valid},
                {"invalid_groups", validity.invalid_groups}};
  write_text_file(out_dir + "/checkpoints.json", j.dump(2) + "\n");
  return result;
}

// One-sided sign-test p-value: P(X >= wins) for X ~ Binomial(n, 1/2).
inline double sign_test_p(int wins, int n) {
  if (n < 1 || wins < 0 || wins > n) throw std::invalid_argument("sign_test_p: bad counts");
  double p = 0.0;
  for (int k = wins; k <= n; ++k) {
    double c = 0.0;  // log C(n, k)
    for (int i = 1; i <= k; ++i) c += std::log(static_cast<double>(n - k + i)) - std::log(static_cast<double>(i));
    p += std::exp(c - static_cast<double>(n) * std::log(2.0));
  }
  return std::min(p, 1.0);
}

}  // namespace dscd

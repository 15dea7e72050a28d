#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dscd/harness.hpp"

using namespace dscd;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "dscd_harness_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// trace whose best_so_far column is exactly `values`
RunTrace trace_of(const std::vector<double>& values) {
  RunTrace t;
  for (std::size_t i = 0; i < values.size(); ++i)
    t.records.push_back({static_cast<long>(i), StepKind::local, -1, values[i], values[i],
                         values[i], 0.0, false, 0.0});
  return t;
}

}  // namespace

TEST_CASE("doubles survive the text round trip") {
  for (double v : {0.1, 1.0 / 3.0, -391.66165703771415, 1e-300, 0.0, 12345678901234567.0,
                   6.103515625e-05}) {
    const std::string s = format_double(v);
    CHECK(parse_double(s) == v);
  }
  const std::string neg_zero = format_double(-0.0);
  CHECK(std::signbit(parse_double(neg_zero)));

  CHECK_THROWS_AS(parse_double("1.5x"), std::runtime_error);
  CHECK_THROWS_AS(parse_double(""), std::runtime_error);
  CHECK_THROWS_AS(parse_double("--2"), std::runtime_error);
  CHECK(parse_long("123") == 123);
  CHECK(parse_long("-7") == -7);
  CHECK_THROWS_AS(parse_long("12.5"), std::runtime_error);
  CHECK_THROWS_AS(parse_long(""), std::runtime_error);
}

TEST_CASE("seed mixing separates streams") {
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(mix_seed(0, 0) != 0);
  CHECK(mix_seed(5, 0) != mix_seed(5, 1));
}

TEST_CASE("method labels name what runs") {
  CHECK(method_label({"adam", std::nullopt, false}) == "adam(0.01)");
  CHECK(method_label({"adam", constant_lr(0.1), false}) == "adam(0.1)");
  CHECK(method_label({"adam", constant_lr(0.001), true}) == "adam(0.001)+dscd");
  CHECK(method_label({"adam", linear_lr(0.1, 0.001, 1), true}) == "adam(linear:0.1:0.001)+dscd");
  CHECK(method_label({"dscd", std::nullopt, false}) == "dscd");
  CHECK(method_label({"uniform", std::nullopt, false}) == "uniform");
}

TEST_CASE("method validation rejects meaningless combinations") {
  CHECK_NOTHROW(validate_method({"adam", constant_lr(0.1), true}));
  CHECK_THROWS_AS(validate_method({"sgd", std::nullopt, false}), std::invalid_argument);
  CHECK_THROWS_AS(validate_method({"dscd", constant_lr(0.1), false}), std::invalid_argument);
  CHECK_THROWS_AS(validate_method({"uniform", std::nullopt, true}), std::invalid_argument);
}

TEST_CASE("lr schedule strings parse") {
  const LrSchedule s = parse_lr_schedule("linear:0.1:0.001");
  CHECK(s.kind == LrKind::linear);
  CHECK(s.lr_start == 0.1);
  CHECK(s.lr_end == 0.001);

  CHECK_THROWS_AS(parse_lr_schedule("cosine:1:0.1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_lr_schedule("linear:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_lr_schedule("linear:a:b"), std::runtime_error);
  CHECK_THROWS_AS(parse_lr_schedule("linear:0:0.1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_lr_schedule("linear:0.1:0.001:5"), std::runtime_error);
}

TEST_CASE("bench configs parse from json with strict keys") {
  const nlohmann::json good = {
      {"objective", "schwefel"},
      {"dim", 3},
      {"methods",
       {{{"optimizer", "adam"}, {"lr", 0.1}, {"with_dscd", true}},
        {{"optimizer", "adam"}, {"lr_schedule", "linear:0.1:0.001"}},
        {{"optimizer", "dscd"}},
        {{"optimizer", "uniform"}}}},
      {"replicates", 5},
      {"budget", 500},
      {"base_seed", 42},
      {"k", 100},
      {"t", 25},
      {"out_dir", "results"}};
  const BenchConfig config = bench_config_from_json(good);
  CHECK(config.objective == "schwefel");
  CHECK(config.dim == 3);
  REQUIRE(config.methods.size() == 4);
  CHECK(method_label(config.methods[0]) == "adam(0.1)+dscd");
  CHECK(method_label(config.methods[1]) == "adam(linear:0.1:0.001)");
  CHECK(config.replicates == 5);
  CHECK(config.budget == 500);
  CHECK(config.base_seed == 42);
  CHECK(config.k == 100);
  CHECK(config.t == 25);
  CHECK(config.out_dir == "results");

  // round trip through the emitter
  const BenchConfig again = bench_config_from_json(bench_config_to_json(config));
  CHECK(bench_config_to_json(again) == bench_config_to_json(config));

  const nlohmann::json minimal = {{"methods", {{{"optimizer", "dscd"}}}}};
  const BenchConfig defaults = bench_config_from_json(minimal);
  CHECK(defaults.objective == "styblinski-tang");
  CHECK(defaults.dim == 10);
  CHECK(defaults.replicates == 20);
  CHECK(defaults.budget == 20000);
  CHECK(defaults.base_seed == 1);
  CHECK(defaults.k == 1000);
  CHECK(defaults.t == 50);
  CHECK(defaults.out_dir.empty());
}

TEST_CASE("bench config parsing rejects malformed input") {
  const auto parse = [](const nlohmann::json& j) { return bench_config_from_json(j); };
  CHECK_THROWS_AS(parse({{"methods", {{{"optimizer", "dscd"}}}}, {"typo", 1}}), std::runtime_error);
  CHECK_THROWS_AS(parse({{"methods", {{{"optimizer", "dscd"}, {"bogus", 1}}}}}), std::runtime_error);
  CHECK_THROWS_AS(parse({{"methods",
                          {{{"optimizer", "adam"}, {"lr", 0.1}, {"lr_schedule", "linear:0.1:0.001"}}}}}),
                  std::runtime_error);
  CHECK_THROWS_AS(parse(nlohmann::json::object()), std::runtime_error);          // missing methods
  CHECK_THROWS_AS(parse({{"methods", 3}}), std::runtime_error);                  // not an array
  CHECK_THROWS_AS(parse({{"methods", {{{"optimizer", "uniform"}, {"lr", 0.1}}}}}), std::invalid_argument);
  CHECK_THROWS_AS(parse({{"methods", {{{"optimizer", "dscd"}}}}, {"replicates", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(parse({{"methods", {{{"optimizer", "dscd"}}}}, {"budget", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(parse({{"methods", {{{"optimizer", "dscd"}}}}, {"k", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(parse({{"methods", {{{"optimizer", "dscd"}}}}, {"t", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(parse({{"methods", {{{"optimizer", "dscd"}}}}, {"dim", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(parse({{"methods", {{{"optimizer", "dscd"}}}}, {"objective", "rosenbrock"}}),
                  std::invalid_argument);
}

TEST_CASE("replicate runs are method-major and seed-paired") {
  BenchConfig config;
  config.objective = "styblinski-tang";
  config.dim = 2;
  config.methods = {{"adam", std::nullopt, false}, {"dscd", std::nullopt, false},
                    {"uniform", std::nullopt, false}};
  config.replicates = 2;
  config.budget = 50;
  config.base_seed = 9;
  config.k = 10;
  config.t = 5;

  const std::vector<RunTrace> traces = run_replicates(config);
  REQUIRE(traces.size() == 6);
  for (const RunTrace& t : traces) REQUIRE(t.records.size() == 50);

  CHECK(traces[0].records[1].kind == StepKind::local);
  CHECK(traces[2].records[1].kind == StepKind::global);
  CHECK(traces[4].records[0].kind == StepKind::uniform);

  // replicate r shares its seed across methods: identical starting point
  for (int r = 0; r < 2; ++r) {
    const double y0 = traces[r].records[0].loss;
    CHECK(traces[2 + r].records[0].loss == y0);
    CHECK(traces[4 + r].records[0].loss == y0);
  }
  CHECK(traces[0].records[0].loss != traces[1].records[0].loss);

  const std::vector<RunTrace> again = run_replicates(config);
  for (std::size_t i = 0; i < traces.size(); ++i)
    for (std::size_t e = 0; e < 50; ++e)
      REQUIRE(traces[i].records[e].loss == again[i].records[e].loss);
}

TEST_CASE("sorted medians and quantiles interpolate linearly") {
  CHECK(median_of_sorted({5.0}) == 5.0);
  CHECK(median_of_sorted({1.0, 2.0, 3.0}) == 2.0);
  CHECK(median_of_sorted({1.0, 2.0, 3.0, 4.0}) == 2.5);
  CHECK_THROWS_AS(median_of_sorted({}), std::invalid_argument);

  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 4.0);
  CHECK(quantile_sorted(v, 0.5) == 2.5);
  CHECK(quantile_sorted(v, 0.25) == 1.75);
  CHECK_THROWS_AS(quantile_sorted({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile_sorted(v, 1.5), std::invalid_argument);
}

TEST_CASE("median ci brackets the point estimate deterministically") {
  const MedianCi single = median_ci({5.0});
  CHECK(single.median == 5.0);
  CHECK(single.lo == 5.0);
  CHECK(single.hi == 5.0);

  const MedianCi a = median_ci({1.0, 2.0, 3.0, 4.0}, 0.95, 2000, 7);
  CHECK(a.median == 2.5);
  CHECK(a.lo <= a.median);
  CHECK(a.hi >= a.median);

  const MedianCi b = median_ci({4.0, 1.0, 3.0, 2.0}, 0.95, 2000, 7);  // order must not matter
  CHECK(b.median == a.median);
  CHECK(b.lo == a.lo);
  CHECK(b.hi == a.hi);

  CHECK_THROWS_AS(median_ci({}), std::invalid_argument);
  CHECK_THROWS_AS(median_ci({1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(median_ci({1.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(median_ci({1.0, 2.0}, 0.95, 0), std::invalid_argument);
}

TEST_CASE("bootstrap ci covers the true median at roughly nominal rate") {
  // 100 samples of n = 20 standard normals; the population median is 0
  int covered = 0;
  Rng rng(123);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> sample(20);
    for (double& x : sample) x = rng.normal();
    const MedianCi ci = median_ci(sample, 0.95, 2000, 1000 + rep);
    if (ci.lo <= 0.0 && 0.0 <= ci.hi) ++covered;
  }
  CHECK(covered >= 88);
}

TEST_CASE("the aggregation grid is dense when small and bounded when large") {
  CHECK(aggregate_grid(1) == std::vector<long>{0});
  const std::vector<long> dense = aggregate_grid(10);
  REQUIRE(dense.size() == 10);
  for (long i = 0; i < 10; ++i) CHECK(dense[static_cast<std::size_t>(i)] == i);
  CHECK(aggregate_grid(201).size() == 201);

  const std::vector<long> sparse = aggregate_grid(20000);
  REQUIRE(sparse.size() <= 201);
  CHECK(sparse.front() == 0);
  CHECK(sparse.back() == 19999);
  for (std::size_t i = 1; i < sparse.size(); ++i) REQUIRE(sparse[i] > sparse[i - 1]);

  CHECK_THROWS_AS(aggregate_grid(0), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_grid(10, 1), std::invalid_argument);
}

TEST_CASE("trace aggregation reduces replicates per method and grid point") {
  const std::vector<std::string> labels{"a", "b"};
  const std::vector<RunTrace> traces{
      trace_of({10.0, 8.0, 6.0, 4.0, 2.0}), trace_of({9.0, 7.0, 5.0, 3.0, 1.0}),
      trace_of({20.0, 18.0, 16.0, 14.0, 12.0}), trace_of({19.0, 17.0, 15.0, 13.0, 11.0})};
  const std::vector<long> grid{0, 4};
  const AggregateResult result = aggregate_traces(labels, traces, 2, grid, 500, 3);

  REQUIRE(result.methods.size() == 2);
  CHECK(result.methods[0].method == "a");
  CHECK(result.methods[1].method == "b");
  for (const MethodAggregate& m : result.methods) {
    REQUIRE(m.points.size() == 2);
    CHECK(m.points[0].eval_index == 0);
    CHECK(m.points[1].eval_index == 4);
    for (const AggregatePoint& p : m.points) {
      CHECK(p.ci_lo <= p.median);
      CHECK(p.ci_hi >= p.median);
    }
  }
  CHECK(result.methods[0].points[0].median == 9.5);
  CHECK(result.methods[0].points[1].median == 1.5);
  CHECK(result.methods[1].points[0].median == 19.5);

  // swapping replicate order within a method changes nothing
  const std::vector<RunTrace> swapped{traces[1], traces[0], traces[3], traces[2]};
  const AggregateResult r2 = aggregate_traces(labels, swapped, 2, grid, 500, 3);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t p = 0; p < 2; ++p) {
      CHECK(r2.methods[m].points[p].median == result.methods[m].points[p].median);
      CHECK(r2.methods[m].points[p].ci_lo == result.methods[m].points[p].ci_lo);
      CHECK(r2.methods[m].points[p].ci_hi == result.methods[m].points[p].ci_hi);
    }

  // single replicate degenerates to the trace itself
  const AggregateResult one = aggregate_traces({"a"}, {trace_of({3.0, 2.0})}, 1, {0, 1}, 100, 0);
  CHECK(one.methods[0].points[0].median == 3.0);
  CHECK(one.methods[0].points[0].ci_lo == 3.0);
  CHECK(one.methods[0].points[0].ci_hi == 3.0);

  CHECK_THROWS_AS(aggregate_traces(labels, traces, 3, grid, 100, 0), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_traces(labels, traces, 2, {}, 100, 0), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_traces(labels, traces, 2, {0, 7}, 100, 0), std::invalid_argument);
}

TEST_CASE("csv headers are pinned") {
  CHECK(std::strcmp(kTraceHeader, "eval_index,mode,dimension,loss,best_so_far,window_best,phi,accepted,lr") == 0);
  CHECK(std::strcmp(kAggregateHeader, "method,eval_index,median,ci_lo,ci_hi") == 0);
}

TEST_CASE("trace csv bytes are exactly specified") {
  RunTrace trace;
  trace.records.push_back({0, StepKind::local, -1, 1.5, 1.5, 1.5, 0.0, true, 0.1});
  trace.records.push_back({1, StepKind::global, 3, -2.25, -2.25, -2.25, 0.5, false, 0.0});
  trace.records.push_back({2, StepKind::uniform, -1, 0.1, -2.25, -2.25, 0.0, false, 0.0});

  const fs::path path = scratch_dir() / "golden_trace.csv";
  emit_trace_csv(trace, path.string());
  const std::string expected =
      "eval_index,mode,dimension,loss,best_so_far,window_best,phi,accepted,lr\n"
      "0,local,,1.5,1.5,1.5,0,1,0.1\n"
      "1,global,3,-2.25,-2.25,-2.25,0.5,0,0\n"
      "2,uniform,,0.1,-2.25,-2.25,0,0,0\n";
  CHECK(slurp(path) == expected);

  CHECK_THROWS_AS(emit_trace_csv(trace, "/nonexistent-dir-zz/trace.csv"), std::runtime_error);
}

TEST_CASE("aggregate csv round-trips bitwise") {
  AggregateResult result;
  result.methods.push_back(
      {"adam(0.01)+dscd",
       {{0, -391.66165703771415, -392.0, -391.0}, {19999, 1.0 / 3.0, 0.1, 1e-300}}});
  result.methods.push_back({"uniform", {{0, 0.0, -0.5, 0.5}}});

  const fs::path path = scratch_dir() / "roundtrip_aggregate.csv";
  emit_aggregate_csv(result, path.string());
  const AggregateResult back = read_aggregate_csv(path.string());
  REQUIRE(back.methods.size() == 2);
  CHECK(back.methods[0].method == "adam(0.01)+dscd");
  REQUIRE(back.methods[0].points.size() == 2);
  REQUIRE(back.methods[1].points.size() == 1);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t p = 0; p < result.methods[m].points.size(); ++p) {
      CHECK(back.methods[m].points[p].eval_index == result.methods[m].points[p].eval_index);
      CHECK(back.methods[m].points[p].median == result.methods[m].points[p].median);
      CHECK(back.methods[m].points[p].ci_lo == result.methods[m].points[p].ci_lo);
      CHECK(back.methods[m].points[p].ci_hi == result.methods[m].points[p].ci_hi);
    }

  const fs::path copy = scratch_dir() / "roundtrip_aggregate_2.csv";
  emit_aggregate_csv(back, copy.string());
  CHECK(slurp(path) == slurp(copy));

  CHECK_THROWS_AS(read_aggregate_csv((scratch_dir() / "missing.csv").string()), std::runtime_error);
  const fs::path bad = scratch_dir() / "bad_header.csv";
  write_text_file(bad.string(), "nope\n");
  CHECK_THROWS_AS(read_aggregate_csv(bad.string()), std::runtime_error);
}

TEST_CASE("aggregate json names its axes and echoes the config") {
  BenchConfig config;
  config.methods = {{"dscd", std::nullopt, false}};
  config.dim = 2;
  config.budget = 10;
  config.replicates = 2;
  AggregateResult result;
  result.methods.push_back({"dscd", {{0, 1.0, 0.5, 1.5}}});

  const nlohmann::json j = aggregate_to_json(result, config);
  CHECK(j.at("x_axis") == "evaluations");
  CHECK(j.at("config").at("objective") == "styblinski-tang");
  CHECK(j.at("config").at("budget") == 10);
  REQUIRE(j.at("methods").size() == 1);
  CHECK(j.at("methods")[0].at("method") == "dscd");
  CHECK(j.at("methods")[0].at("points")[0].at("eval_index") == 0);
  CHECK(j.at("methods")[0].at("points")[0].at("median") == 1.0);
}

TEST_CASE("json files load with clear failure modes") {
  const fs::path good = scratch_dir() / "good.json";
  write_text_file(good.string(), "{\"methods\": [{\"optimizer\": \"dscd\"}]}\n");
  CHECK(bench_config_from_file(good.string()).methods.size() == 1);

  CHECK_THROWS_WITH(json_from_file((scratch_dir() / "absent.json").string()),
                    Catch::Matchers::StartsWith("cannot open"));
  const fs::path bad = scratch_dir() / "bad.json";
  write_text_file(bad.string(), "{not json");
  CHECK_THROWS_WITH(json_from_file(bad.string()), Catch::Matchers::StartsWith("cannot parse"));
}

TEST_CASE("hybrid configs derive from the method spec") {
  BenchConfig config;
  config.budget = 500;
  config.k = 77;
  config.t = 33;
  config.methods = {{"adam", std::nullopt, false}};

  const HybridConfig plain = hybrid_config_for({"adam", std::nullopt, false}, config);
  CHECK(plain.budget == 500);
  CHECK(plain.window_capacity == 77);
  CHECK(plain.t_switch == kNeverSwitch);
  CHECK(plain.initial_mode == StepKind::local);
  CHECK(plain.lr.lr_start == 0.01);

  const HybridConfig mixed = hybrid_config_for({"adam", constant_lr(0.1), true}, config);
  CHECK(mixed.t_switch == 33);
  CHECK(mixed.lr.lr_start == 0.1);

  const HybridConfig global = hybrid_config_for({"dscd", std::nullopt, false}, config);
  CHECK(global.initial_mode == StepKind::global);
  CHECK(global.t_switch == kNeverSwitch);
}

TEST_CASE("bench runs write reproducible artifacts") {
  BenchConfig config;
  config.objective = "styblinski-tang";
  config.dim = 2;
  config.methods = {{"adam", std::nullopt, true}, {"uniform", std::nullopt, false}};
  config.replicates = 3;
  config.budget = 30;
  config.base_seed = 5;
  config.k = 10;
  config.t = 5;

  const fs::path out_a = scratch_dir() / "bench_a";
  const fs::path out_b = scratch_dir() / "bench_b";
  const AggregateResult result = run_bench(config, out_a.string());
  run_bench(config, out_b.string());

  REQUIRE(fs::exists(out_a / "aggregate.csv"));
  REQUIRE(fs::exists(out_a / "summary.json"));
  CHECK(slurp(out_a / "aggregate.csv") == slurp(out_b / "aggregate.csv"));
  CHECK(slurp(out_a / "summary.json") == slurp(out_b / "summary.json"));

  REQUIRE(result.methods.size() == 2);
  CHECK(result.methods[0].method == "adam(0.01)+dscd");
  CHECK(result.methods[1].method == "uniform");
  for (const MethodAggregate& m : result.methods) {
    REQUIRE(m.points.size() == 30);
    CHECK(m.points.front().eval_index == 0);
    CHECK(m.points.back().eval_index == 29);
    for (const AggregatePoint& p : m.points) {
      CHECK(p.ci_lo <= p.median);
      CHECK(p.ci_hi >= p.median);
    }
  }

  const AggregateResult back = read_aggregate_csv((out_a / "aggregate.csv").string());
  REQUIRE(back.methods.size() == 2);
  for (std::size_t m = 0; m < 2; ++m) {
    REQUIRE(back.methods[m].points.size() == result.methods[m].points.size());
    for (std::size_t p = 0; p < back.methods[m].points.size(); ++p)
      CHECK(back.methods[m].points[p].median == result.methods[m].points[p].median);
  }

  const nlohmann::json summary = json_from_file((out_a / "summary.json").string());
  CHECK(summary.at("x_axis") == "evaluations");
  CHECK(summary.at("methods").size() == 2);

  CHECK_THROWS_AS(run_bench(config, ""), std::invalid_argument);
}

TEST_CASE("toy configs parse with defaults and strict keys") {
  const ToyRunConfig defaults = toy_config_from_json(nlohmann::json::object());
  CHECK(defaults.search.budget == 2000);
  CHECK(defaults.search.t_switch == 50);
  CHECK(defaults.search.window_capacity == 1000);
  CHECK(defaults.search.mix == MixKind::sigmoid);
  CHECK(defaults.search.xi == 0.0);
  CHECK(defaults.search.lr_alpha == 0.025);
  CHECK(defaults.search.lr_w == 0.05);
  CHECK(defaults.search.n_train == 64);
  CHECK(defaults.search.n_val == 64);
  CHECK(defaults.search.threshold == 0.85);
  CHECK(defaults.seed == 1);

  const ToyRunConfig custom = toy_config_from_json(
      {{"budget", 123}, {"mix", "softmax"}, {"xi", 0.01}, {"seed", 99}, {"threshold", 0.9}});
  CHECK(custom.search.budget == 123);
  CHECK(custom.search.mix == MixKind::softmax);
  CHECK(custom.search.xi == 0.01);
  CHECK(custom.search.threshold == 0.9);
  CHECK(custom.seed == 99);

  const ToyRunConfig round = toy_config_from_json(toy_config_to_json(custom));
  CHECK(toy_config_to_json(round) == toy_config_to_json(custom));

  CHECK_THROWS_AS(toy_config_from_json({{"bogus", 1}}), std::runtime_error);
  CHECK_THROWS_AS(toy_config_from_json({{"mix", "relu"}}), std::runtime_error);
}

TEST_CASE("toy runs write a trace and checkpoint report") {
  ToyRunConfig config;
  config.search.budget = 40;
  config.search.t_switch = 10;
  config.search.checkpoint_every = 10;
  config.seed = 4;

  const fs::path out_a = scratch_dir() / "toy_a";
  const fs::path out_b = scratch_dir() / "toy_b";
  run_toy(config, out_a.string());
  run_toy(config, out_b.string());

  REQUIRE(fs::exists(out_a / "trace.csv"));
  REQUIRE(fs::exists(out_a / "checkpoints.json"));
  CHECK(slurp(out_a / "trace.csv") == slurp(out_b / "trace.csv"));
  CHECK(slurp(out_a / "checkpoints.json") == slurp(out_b / "checkpoints.json"));

  const std::string trace = slurp(out_a / "trace.csv");
  std::size_t lines = 0;
  for (char c : trace) lines += c == '\n';
  CHECK(lines == 41);  // header + one row per evaluation
  CHECK(trace.rfind(kTraceHeader, 0) == 0);

  const nlohmann::json report = json_from_file((out_a / "checkpoints.json").string());
  CHECK(report.at("config").at("budget") == 40);
  REQUIRE(report.at("checkpoints").size() == 5);  // steps 0, 10, 20, 30, 39
  CHECK(report.at("checkpoints")[0].at("step") == 0);
  CHECK(report.at("checkpoints")[0].at("group_means").at("normal") == 0.5);
  CHECK(report.at("checkpoints").back().at("step") == 39);
  CHECK(report.at("final").contains("alpha"));
  CHECK(report.at("final").contains("w"));
  CHECK(report.at("final").contains("valid_after_discretization"));
  CHECK(report.at("final").at("invalid_groups").is_array());

  CHECK_THROWS_AS(run_toy(config, ""), std::invalid_argument);
}

TEST_CASE("sign test p-values are exact binomial tails") {
  CHECK_THAT(sign_test_p(15, 20), WithinAbs(0.020694732666015625, 1e-12));
  CHECK_THAT(sign_test_p(14, 20), WithinAbs(0.057659149169921875, 1e-12));
  CHECK_THAT(sign_test_p(0, 20), WithinAbs(1.0, 1e-12));
  CHECK_THAT(sign_test_p(10, 10), WithinAbs(std::pow(0.5, 10), 1e-15));
  CHECK_THAT(sign_test_p(1, 1), WithinAbs(0.5, 1e-15));
  CHECK_THROWS_AS(sign_test_p(-1, 10), std::invalid_argument);
  CHECK_THROWS_AS(sign_test_p(11, 10), std::invalid_argument);
  CHECK_THROWS_AS(sign_test_p(0, 0), std::invalid_argument);
}

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dscd/dscd.hpp"

namespace {

struct OptimizeArgs {
  std::string function;
  int dim = 0;
  long budget = 0;
  std::string method;
  double lr = 0.0;
  std::string lr_schedule;
  std::uint64_t seed = 1;
  long k = 1000;
  long t = 50;
  std::string out;
};

dscd::MethodSpec method_spec_from_args(const OptimizeArgs& args) {
  dscd::MethodSpec spec;
  if (args.method == "adam" || args.method == "adam+dscd") {
    spec.optimizer = "adam";
    spec.with_dscd = args.method == "adam+dscd";
    if (!args.lr_schedule.empty())
      spec.lr = dscd::parse_lr_schedule(args.lr_schedule);
    else if (args.lr > 0.0)
      spec.lr = dscd::constant_lr(args.lr);
  } else if (args.method == "dscd" || args.method == "uniform") {
    spec.optimizer = args.method;
    if (args.lr > 0.0 || !args.lr_schedule.empty())
      throw std::invalid_argument("--lr/--lr-schedule only apply to adam methods");
  } else {
    throw std::invalid_argument("unknown method '" + args.method +
                                "' (expected adam, adam+dscd, dscd, or uniform)");
  }
  return spec;
}

int run_optimize(const OptimizeArgs& args) {
  const dscd::Objective obj = dscd::objective_by_name(args.function, args.dim);
  const dscd::MethodSpec spec = method_spec_from_args(args);

  dscd::BenchConfig shim;  // reuse the method -> run mapping of the harness
  shim.objective = args.function;
  shim.dim = args.dim;
  shim.budget = args.budget;
  shim.k = args.k;
  shim.t = args.t;

  dscd::Rng rng(args.seed);
  dscd::RunTrace trace = spec.optimizer == "uniform"
                             ? dscd::run_baseline_uniform(obj, args.budget, rng)
                             : dscd::run_hybrid(obj, dscd::hybrid_config_for(spec, shim), rng);
  dscd::emit_trace_csv(trace, args.out);
  std::cout << "wrote " << args.out << " (" << trace.records.size() << " records, method "
            << dscd::method_label(spec) << ")\n";
  return 0;
}

int run_bench_cmd(const std::string& config_path, const std::string& out_flag) {
  const dscd::BenchConfig config = dscd::bench_config_from_file(config_path);
  const std::string out_dir = !out_flag.empty() ? out_flag : config.out_dir;
  if (out_dir.empty())
    throw std::invalid_argument("no output directory: pass --out or set out_dir in the config");
  dscd::run_bench(config, out_dir);
  std::cout << "wrote " << out_dir << "/aggregate.csv and " << out_dir << "/summary.json\n";
  return 0;
}

int run_bilevel_cmd(const std::string& config_path, const std::string& out_dir) {
  const dscd::ToyRunConfig config = dscd::toy_config_from_file(config_path);
  dscd::run_toy(config, out_dir);
  std::cout << "wrote " << out_dir << "/trace.csv and " << out_dir << "/checkpoints.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinate-descent global/local hybrid optimizer"};
  app.require_subcommand(1);

  OptimizeArgs opt;
  CLI::App* optimize = app.add_subcommand("optimize", "single run, trace CSV out");
  optimize->add_option("--function", opt.function, "styblinski-tang or schwefel")->required();
  optimize->add_option("--dim", opt.dim, "dimensionality")->required();
  optimize->add_option("--budget", opt.budget, "objective evaluations")->required();
  optimize->add_option("--method", opt.method, "adam, adam+dscd, dscd, or uniform")->required();
  CLI::Option* lr_opt = optimize->add_option("--lr", opt.lr, "constant learning rate");
  optimize->add_option("--lr-schedule", opt.lr_schedule, "linear:A:B")->excludes(lr_opt);
  optimize->add_option("--seed", opt.seed, "rng seed (default 1)");
  optimize->add_option("--k", opt.k, "loss window capacity (default 1000)");
  optimize->add_option("--t", opt.t, "mode-switch threshold (default 50)");
  optimize->add_option("--out", opt.out, "trace CSV path")->required();

  std::string bench_config, bench_out;
  CLI::App* bench = app.add_subcommand("bench", "replicated study, aggregate CSV/JSON out");
  bench->add_option("--config", bench_config, "bench config JSON")->required();
  bench->add_option("--out", bench_out, "output directory (overrides config out_dir)");

  std::string bilevel_config, bilevel_out;
  CLI::App* bilevel = app.add_subcommand("bilevel", "toy architecture search, trace + checkpoints out");
  bilevel->add_option("--config", bilevel_config, "toy config JSON")->required();
  bilevel->add_option("--out", bilevel_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed()) return run_optimize(opt);
    if (bench->parsed()) return run_bench_cmd(bench_config, bench_out);
    if (bilevel->parsed()) return run_bilevel_cmd(bilevel_config, bilevel_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

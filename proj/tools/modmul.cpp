/*
 * Copyright 2026 The modmul Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// modmul: command-line front end for dataset generation, secret recovery,
// sweeps, landscapes, tokenization, metrics and the DH loss checks.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "modmul/circreg.hpp"
#include "modmul/dhloss.hpp"
#include "modmul/harness.hpp"
#include "modmul/landscape.hpp"
#include "modmul/modnum.hpp"
#include "modmul/seqrep.hpp"

namespace {

using namespace modmul;

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  return in;
}

UpdateRule parse_variant(const std::string& name) {
  if (name == "reciprocal") return UpdateRule::reciprocal_gradient;
  if (name == "plain") return UpdateRule::plain_gradient;
  throw ValidationError("unknown variant '" + name + "'");
}

HaltMode parse_halt(const std::string& name) {
  if (name == "verify") return HaltMode::verify_rounding;
  if (name == "loss") return HaltMode::loss_tolerance;
  if (name == "half") return HaltMode::relaxed_half_m;
  throw ValidationError("unknown halt mode '" + name + "'");
}

struct GenArgs {
  std::int64_t p = 0;
  std::int64_t secret = 0;
  double sigma = 3.0;
  std::uint64_t seed = 0;
  std::string out;
};

void run_gen(const GenArgs& args) {
  Rng rng(args.seed);
  const auto d = gen_dataset(Modulus(args.p), args.secret, args.sigma, rng,
                             args.seed);
  Output out(args.out);
  write_dataset(out.stream(), d);
}

struct SolveArgs {
  std::string data;
  double eta = 2.0;
  std::size_t batch_size = 256;
  std::string variant = "reciprocal";
  std::optional<std::int64_t> init;
  std::optional<std::size_t> max_steps;
  std::string halt = "verify";
  double epsilon = 1.0;
  std::optional<std::int64_t> tau;
  std::optional<double> rho;
  std::size_t verify_batch = 1024;
  double grad_floor = 1e-8;
  std::uint64_t seed = 0;
  std::string trace;
};

void run_solve(const SolveArgs& args) {
  auto in = open_input(args.data);
  const Dataset full = read_dataset(in);
  RegressionConfig cfg = RegressionConfig::for_noise(full.sigma());
  cfg.learning_rate = args.eta;
  cfg.batch_size = args.batch_size;
  cfg.variant = parse_variant(args.variant);
  cfg.initial_guess = args.init;
  cfg.max_steps = args.max_steps;
  cfg.halt_mode = parse_halt(args.halt);
  cfg.loss_tolerance = args.epsilon;
  if (args.tau) cfg.verify_threshold = *args.tau;
  if (args.rho) cfg.verify_fraction = *args.rho;
  cfg.verify_batch_size = args.verify_batch;
  cfg.grad_floor = args.grad_floor;
  cfg.record_trace = !args.trace.empty();

  Rng rng(args.seed);
  const auto result = solve(full.without_secret(), cfg, rng);

  if (cfg.record_trace) {
    Output trace(args.trace);
    trace.stream() << "step,s_t,batch_loss\n";
    for (const auto& row : result.trace) {
      trace.stream() << row.step << ',' << format_real(row.s) << ','
                     << format_real(row.batch_loss) << '\n';
    }
  }

  nlohmann::ordered_json report;
  report["success"] = result.success;
  report["success_at_init"] = result.success_at_init;
  report["steps"] = result.steps_taken;
  report["final_s"] = result.final_s;
  report["recovered_secret"] = result.recovered_secret;
  report["matches_secret"] =
      full.secret() ? nlohmann::ordered_json(result.success &&
                                             result.recovered_secret ==
                                                 *full.secret())
                    : nlohmann::ordered_json();
  std::cout << report.dump() << '\n';
}

struct SweepArgs {
  std::vector<std::int64_t> primes;
  std::vector<double> etas{0.5, 1.0, 2.0};
  std::vector<std::size_t> batch_sizes{64, 128, 256, 512};
  std::size_t trials = 20;
  double sigma = 3.0;
  std::uint64_t seed = 0;
  std::string variant = "reciprocal";
  std::optional<std::size_t> max_steps;
  std::optional<std::size_t> threads;
  std::string out;
};

void run_sweep_command(const SweepArgs& args) {
  SweepSpec spec;
  spec.primes = args.primes;
  spec.learning_rates = args.etas;
  spec.batch_sizes = args.batch_sizes;
  spec.trials_per_cell = args.trials;
  spec.sigma = args.sigma;
  spec.master_seed = args.seed;
  spec.variant = parse_variant(args.variant);
  spec.max_steps = args.max_steps;
  const auto report =
      run_sweep(spec, args.threads.value_or(default_worker_count()));
  Output out(args.out);
  write_sweep_csv(out.stream(), report);
  for (const auto& row : report.rows) {
    for (std::size_t t = 0; t < row.outcomes.size(); ++t) {
      if (!row.outcomes[t].diagnostic.empty()) {
        std::cerr << "p=" << row.p << " eta=" << format_real(row.learning_rate)
                  << " k=" << row.batch_size << " trial " << t << ": "
                  << row.outcomes[t].diagnostic << '\n';
      }
    }
  }
}

void run_steps_command(const SweepArgs& args) {
  const auto report =
      run_steps_experiment(args.primes, args.trials, args.sigma, args.seed,
                           args.threads.value_or(default_worker_count()));
  Output out(args.out);
  write_steps_csv(out.stream(), report);
}

struct LandscapeArgs {
  std::int64_t p = 0;
  std::int64_t secret = 0;
  std::string what = "loss";
  double from = 0.0;
  std::optional<double> to;
  double step = 0.01;
  std::string out;
};

void run_landscape(const LandscapeArgs& args) {
  Output out(args.out);
  emit_landscape(args.p, args.secret, parse_curve_kind(args.what), args.from,
                 args.to.value_or(static_cast<double>(args.p)), args.step,
                 out.stream());
}

struct TokenizeArgs {
  std::int64_t p = 0;
  int base = 10;
  std::optional<std::int64_t> value;
  std::vector<int> digits;
  std::string data;
  std::string out;
};

void run_tokenize(const TokenizeArgs& args) {
  const std::size_t width = width_for(args.p, args.base);
  Output out(args.out);
  if (args.value) {
    out.stream() << nlohmann::json(encode(*args.value, args.base, width).digits)
                 << '\n';
  } else if (!args.digits.empty()) {
    out.stream() << decode({args.base, args.digits}) << '\n';
  } else if (!args.data.empty()) {
    auto in = open_input(args.data);
    const Dataset d = read_dataset(in);
    const std::size_t t = width_for(d.p(), args.base);
    nlohmann::ordered_json meta;
    meta["p"] = d.p();
    meta["base"] = args.base;
    meta["width"] = t;
    out.stream() << meta.dump() << '\n';
    for (const auto& [a, b] : d.samples()) {
      nlohmann::ordered_json row;
      row["a"] = a;
      row["a_digits"] = encode(a, args.base, t).digits;
      row["b"] = b;
      row["b_digits"] = encode(b, args.base, t).digits;
      out.stream() << row.dump() << '\n';
    }
  } else {
    throw ValidationError("tokenize needs --value, --digits or --data");
  }
}

void run_metrics(const std::string& pairs) {
  auto in = open_input(pairs);
  const auto summary = summarize(read_prediction_file(in));
  nlohmann::ordered_json report;
  report["count"] = summary.count;
  report["exact_match_accuracy"] = summary.exact_match_accuracy;
  report["mean_arithmetic_difference"] = summary.mean_arithmetic_difference;
  report["mean_normalized_difference"] = summary.mean_normalized_difference;
  std::cout << report.dump() << '\n';
}

struct DhGenArgs {
  std::int64_t p = 0;
  std::int64_t g = 0;
  std::int64_t secret = 0;
  std::size_t count = 0;
  int base = 2;
  std::uint64_t seed = 0;
  std::string out;
};

void run_dh_gen(const DhGenArgs& args) {
  Rng rng(args.seed);
  const auto inst = gen_dh_dataset(Modulus(args.p), args.g, args.secret,
                                   args.count, args.base, rng);
  Output out(args.out);
  write_dh_dataset(out.stream(), inst);
}

int run_dh_check(const std::string& data, std::size_t points,
                 std::uint64_t seed) {
  auto in = open_input(data);
  const auto inst = read_dh_dataset(in);
  Rng rng(seed);
  const auto report = check_dh_instance(inst, rng, points);
  std::cout << "primitive_root " << (report.primitive_root ? "ok" : "FAIL")
            << '\n'
            << "exact_residuals " << report.samples - report.residual_failures
            << '/' << report.samples << '\n'
            << "smooth_loss_max " << format_real(report.max_smooth_loss)
            << " over " << report.smooth_checked << " samples\n"
            << "gradient_rel_err_max " << format_real(report.max_gradient_error)
            << " over " << report.gradient_points << '/'
            << report.gradient_requested << " points\n"
            << (report.passed() ? "PASS" : "FAIL") << '\n';
  return report.passed() ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modular multiplication learnability lab"};
  app.require_subcommand(1);
  int exit_code = 0;

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a noisy 1-D LWE dataset");
  gen_cmd->add_option("--p", gen.p, "Prime modulus")->required();
  gen_cmd->add_option("--secret", gen.secret, "Secret in [1, p-1]")->required();
  gen_cmd->add_option("--sigma", gen.sigma, "Noise standard deviation");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--out", gen.out, "Output path (default stdout)");
  gen_cmd->callback([&] { run_gen(gen); });

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Recover the secret by circular regression");
  solve_cmd->add_option("--data", solve_args.data, "Dataset JSONL")->required();
  solve_cmd->add_option("--eta", solve_args.eta, "Learning rate");
  solve_cmd->add_option("--batch-size", solve_args.batch_size, "Batch size k");
  solve_cmd->add_option("--variant", solve_args.variant, "reciprocal|plain");
  solve_cmd->add_option("--init", solve_args.init, "Fixed initial guess s_0");
  solve_cmd->add_option("--max-steps", solve_args.max_steps, "Step cap (default p)");
  solve_cmd->add_option("--halt", solve_args.halt, "verify|loss|half");
  solve_cmd->add_option("--epsilon", solve_args.epsilon, "Loss tolerance for --halt loss");
  solve_cmd->add_option("--tau", solve_args.tau, "Residual threshold (default ceil(4 sigma))");
  solve_cmd->add_option("--rho", solve_args.rho, "Required fraction within tau");
  solve_cmd->add_option("--verify-batch", solve_args.verify_batch, "Verification subset size");
  solve_cmd->add_option("--grad-floor", solve_args.grad_floor, "Reciprocal clamp");
  solve_cmd->add_option("--seed", solve_args.seed, "RNG seed");
  solve_cmd->add_option("--trace", solve_args.trace, "Write step,s_t,batch_loss CSV here");
  solve_cmd->callback([&] { run_solve(solve_args); });

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Success counts over a (p, eta, k) grid");
  sweep_cmd->add_option("--primes", sweep.primes, "Primes")->delimiter(',')->required();
  sweep_cmd->add_option("--etas", sweep.etas, "Learning rates")->delimiter(',');
  sweep_cmd->add_option("--batch-sizes", sweep.batch_sizes, "Batch sizes")->delimiter(',');
  sweep_cmd->add_option("--trials", sweep.trials, "Secrets per cell");
  sweep_cmd->add_option("--sigma", sweep.sigma, "Noise standard deviation");
  sweep_cmd->add_option("--seed", sweep.seed, "Master seed");
  sweep_cmd->add_option("--variant", sweep.variant, "reciprocal|plain");
  sweep_cmd->add_option("--max-steps", sweep.max_steps, "Step cap (default p)");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker count (default MODMUL_THREADS)");
  sweep_cmd->add_option("--out", sweep.out, "CSV path (default stdout)");
  sweep_cmd->callback([&] { run_sweep_command(sweep); });

  SweepArgs steps;
  auto* steps_cmd = app.add_subcommand("steps", "Step counts at eta = 2, k = 256");
  steps_cmd->add_option("--primes", steps.primes, "Primes")->delimiter(',')->required();
  steps_cmd->add_option("--trials", steps.trials, "Secrets per prime");
  steps_cmd->add_option("--sigma", steps.sigma, "Noise standard deviation");
  steps_cmd->add_option("--seed", steps.seed, "Master seed");
  steps_cmd->add_option("--threads", steps.threads, "Worker count (default MODMUL_THREADS)");
  steps_cmd->add_option("--out", steps.out, "CSV path (default stdout)");
  steps_cmd->callback([&] { run_steps_command(steps); });

  LandscapeArgs landscape;
  auto* landscape_cmd = app.add_subcommand("landscape", "Loss/gradient curve CSV");
  landscape_cmd->add_option("--p", landscape.p, "Prime modulus")->required();
  landscape_cmd->add_option("--secret", landscape.secret, "Secret")->required();
  landscape_cmd->add_option("--what", landscape.what, "loss|grad|grad-recip");
  landscape_cmd->add_option("--from", landscape.from, "Range start");
  landscape_cmd->add_option("--to", landscape.to, "Range end (default p)");
  landscape_cmd->add_option("--step", landscape.step, "Spacing");
  landscape_cmd->add_option("--out", landscape.out, "CSV path (default stdout)");
  landscape_cmd->callback([&] { run_landscape(landscape); });

  TokenizeArgs tokenize;
  auto* tokenize_cmd = app.add_subcommand("tokenize", "Base-B fixed-width digits");
  tokenize_cmd->add_option("--p", tokenize.p, "Modulus fixing the width")->required();
  tokenize_cmd->add_option("--base", tokenize.base, "Base B")->required();
  auto* value_opt = tokenize_cmd->add_option("--value", tokenize.value, "Integer to encode");
  auto* digits_opt = tokenize_cmd->add_option("--digits", tokenize.digits, "Digits to decode")
                         ->delimiter(',');
  auto* data_opt = tokenize_cmd->add_option("--data", tokenize.data, "Dataset JSONL to tokenize");
  value_opt->excludes(digits_opt)->excludes(data_opt);
  digits_opt->excludes(data_opt);
  tokenize_cmd->add_option("--out", tokenize.out, "Output path (default stdout)");
  tokenize_cmd->callback([&] { run_tokenize(tokenize); });

  std::string pairs;
  auto* metrics_cmd = app.add_subcommand("metrics", "Exact-match and arithmetic difference");
  metrics_cmd->add_option("--pairs", pairs, "Prediction-pair JSONL")->required();
  metrics_cmd->callback([&] { run_metrics(pairs); });

  DhGenArgs dh_gen;
  auto* dh_gen_cmd = app.add_subcommand("dh-gen", "Generate a Diffie-Hellman dataset");
  dh_gen_cmd->add_option("--p", dh_gen.p, "Prime modulus")->required();
  dh_gen_cmd->add_option("--g", dh_gen.g, "Primitive root")->required();
  dh_gen_cmd->add_option("--secret", dh_gen.secret, "Secret in [1, p-2]")->required();
  dh_gen_cmd->add_option("--count", dh_gen.count, "Number of samples")->required();
  dh_gen_cmd->add_option("--base", dh_gen.base, "Digit base B");
  dh_gen_cmd->add_option("--seed", dh_gen.seed, "RNG seed");
  dh_gen_cmd->add_option("--out", dh_gen.out, "Output path (default stdout)");
  dh_gen_cmd->callback([&] { run_dh_gen(dh_gen); });

  std::string dh_data;
  std::size_t dh_points = 50;
  std::uint64_t dh_seed = 0;
  auto* dh_check_cmd = app.add_subcommand("dh-check", "Verify a DH dataset and the loss gradient");
  dh_check_cmd->add_option("--data", dh_data, "DH dataset JSONL")->required();
  dh_check_cmd->add_option("--points", dh_points, "Gradient check points");
  dh_check_cmd->add_option("--seed", dh_seed, "RNG seed");
  dh_check_cmd->callback([&] { exit_code = run_dh_check(dh_data, dh_points, dh_seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return exit_code;
}

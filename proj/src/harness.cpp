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

#include "modmul/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <thread>

namespace modmul {

void SweepSpec::validate() const {
  if (primes.empty() || learning_rates.empty() || batch_sizes.empty()) {
    throw ValidationError("sweep needs at least one prime, eta and batch size");
  }
  if (trials_per_cell < 1) throw ValidationError("trials must be >= 1");
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be nonnegative");
  for (const auto p : primes) {
    const Modulus checked(p);
    if (trials_per_cell > static_cast<std::size_t>(p - 1)) {
      throw ValidationError("p = " + std::to_string(p) + " has only " +
                            std::to_string(p - 1) + " possible secrets");
    }
  }
  for (const auto eta : learning_rates) {
    if (!(eta > 0.0)) throw ValidationError("learning rates must be positive");
  }
  for (const auto k : batch_sizes) {
    if (k == 0) throw ValidationError("batch sizes must be positive");
  }
  if (max_steps && *max_steps == 0) {
    throw ValidationError("max_steps must be positive");
  }
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("MODMUL_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) {
      return static_cast<std::size_t>(value);
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * parts.size());
  for (const auto part : parts) {
    words.push_back(static_cast<std::uint32_t>(part));
    words.push_back(static_cast<std::uint32_t>(part >> 32U));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32U) | out[0];
}

namespace {

enum SeedTag : std::uint64_t { kSecrets = 1, kData = 2, kSolver = 3 };

struct Task {
  std::size_t row;
  std::size_t trial;
};

TrialOutcome run_trial(const SweepSpec& spec, const SweepRow& row,
                       std::int64_t secret, std::size_t trial) {
  TrialOutcome outcome;
  outcome.secret = secret;
  try {
    const Modulus p(row.p);
    const auto p_word = static_cast<std::uint64_t>(row.p);
    // The dataset stream ignores (eta, k) so every cell sees the same data.
    Rng data_rng(derive_seed({spec.master_seed, kData, p_word, trial}));
    const Dataset d = gen_dataset(p, secret, spec.sigma, data_rng);

    RegressionConfig cfg = RegressionConfig::for_noise(spec.sigma);
    cfg.learning_rate = row.learning_rate;
    cfg.batch_size = row.batch_size;
    cfg.variant = spec.variant;
    cfg.max_steps = spec.max_steps;
    Rng solver_rng(derive_seed(
        {spec.master_seed, kSolver, p_word,
         std::bit_cast<std::uint64_t>(row.learning_rate), row.batch_size,
         trial}));
    const auto result = solve(d.without_secret(), cfg, solver_rng);
    outcome.steps = result.steps_taken;
    outcome.recovered = result.recovered_secret;
    outcome.success = result.success && result.recovered_secret == secret;
    if (result.success && !outcome.success) {
      outcome.diagnostic = "verified candidate " +
                           std::to_string(result.recovered_secret) +
                           " differs from the true secret";
    }
  } catch (const std::exception& e) {
    outcome.success = false;
    outcome.diagnostic = e.what();
  }
  return outcome;
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

}  // namespace

std::vector<std::int64_t> draw_secrets(std::int64_t p, std::size_t count,
                                       std::uint64_t master_seed) {
  if (p < 2 || count > static_cast<std::size_t>(p - 1)) {
    throw ValidationError("more secrets requested than [1, p-1] holds");
  }
  std::vector<std::int64_t> pool(static_cast<std::size_t>(p - 1));
  std::iota(pool.begin(), pool.end(), std::int64_t{1});
  Rng rng(derive_seed({master_seed, kSecrets, static_cast<std::uint64_t>(p)}));
  std::vector<std::int64_t> secrets(count);
  std::sample(pool.begin(), pool.end(), secrets.begin(), count, rng);
  std::shuffle(secrets.begin(), secrets.end(), rng);
  return secrets;
}

SweepReport run_sweep(const SweepSpec& spec, std::size_t workers) {
  spec.validate();
  const auto primes = sorted_unique(spec.primes);
  const auto etas = sorted_unique(spec.learning_rates);
  const auto ks = sorted_unique(spec.batch_sizes);

  SweepReport report;
  std::vector<std::vector<std::int64_t>> secrets_by_row;
  for (const auto p : primes) {
    const auto secrets = draw_secrets(p, spec.trials_per_cell, spec.master_seed);
    for (const auto eta : etas) {
      for (const auto k : ks) {
        SweepRow row;
        row.p = p;
        row.learning_rate = eta;
        row.batch_size = k;
        row.trials = spec.trials_per_cell;
        row.outcomes.resize(spec.trials_per_cell);
        report.rows.push_back(std::move(row));
        secrets_by_row.push_back(secrets);
      }
    }
  }

  std::vector<Task> tasks;
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    for (std::size_t t = 0; t < spec.trials_per_cell; ++t) {
      tasks.push_back({r, t});
    }
  }
  std::vector<double> seconds(tasks.size(), 0.0);

  // Each task writes only its own outcome slot.
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto [r, t] = tasks[i];
      const auto start = std::chrono::steady_clock::now();
      report.rows[r].outcomes[t] =
          run_trial(spec, report.rows[r], secrets_by_row[r][t], t);
      seconds[i] = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, tasks.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    report.rows[tasks[i].row].wall_seconds += seconds[i];
  }
  for (auto& row : report.rows) {
    for (const auto& outcome : row.outcomes) {
      if (!outcome.success) continue;
      ++row.successes;
      row.step_counts.push_back(outcome.steps);
    }
    std::sort(row.step_counts.begin(), row.step_counts.end());
  }
  return report;
}

SweepSpec steps_spec(std::vector<std::int64_t> primes, std::size_t trials,
                     double sigma, std::uint64_t master_seed) {
  SweepSpec spec;
  spec.primes = std::move(primes);
  spec.learning_rates = {2.0};
  spec.batch_sizes = {256};
  spec.trials_per_cell = trials;
  spec.sigma = sigma;
  spec.master_seed = master_seed;
  return spec;
}

SweepReport run_steps_experiment(std::vector<std::int64_t> primes,
                                 std::size_t trials, double sigma,
                                 std::uint64_t master_seed,
                                 std::size_t workers) {
  return run_sweep(steps_spec(std::move(primes), trials, sigma, master_seed),
                   workers);
}

namespace {

std::string join_steps(const std::vector<std::size_t>& steps) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i > 0) out += ';';
    out += std::to_string(steps[i]);
  }
  return out;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "p,eta,k,successes,trials,steps\n";
  for (const auto& row : report.rows) {
    out << row.p << ',' << format_real(row.learning_rate) << ','
        << row.batch_size << ',' << row.successes << ',' << row.trials << ','
        << join_steps(row.step_counts) << '\n';
  }
}

void write_steps_csv(std::ostream& out, const SweepReport& report) {
  out << "p,log2_p,successes,trials,steps\n";
  for (const auto& row : report.rows) {
    out << row.p << ','
        << std::bit_width(static_cast<std::uint64_t>(row.p)) << ','
        << row.successes << ',' << row.trials << ','
        << join_steps(row.step_counts) << '\n';
  }
}

void emit_landscape(std::int64_t p, std::int64_t secret, CurveKind what,
                    double from, double to, double resolution,
                    std::ostream& out) {
  Rng unused(0);  // sigma = 0 draws nothing
  const Dataset d = gen_dataset(Modulus(p), secret, 0.0, unused);
  write_curve_csv(out, sample_curve(d, what, from, to, resolution));
}

}  // namespace modmul

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

#ifndef MODMUL_HARNESS_HPP_
#define MODMUL_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "modmul/circreg.hpp"
#include "modmul/landscape.hpp"

namespace modmul {

// A grid of (p, eta, k) cells, each solved on trials_per_cell secrets.
struct SweepSpec {
  std::vector<std::int64_t> primes;
  std::vector<double> learning_rates;
  std::vector<std::size_t> batch_sizes;
  std::size_t trials_per_cell = 20;
  double sigma = 3.0;
  std::uint64_t master_seed = 0;
  UpdateRule variant = UpdateRule::reciprocal_gradient;
  std::optional<std::size_t> max_steps;  // p when unset

  void validate() const;
};

struct TrialOutcome {
  std::int64_t secret = 0;
  bool success = false;
  std::size_t steps = 0;
  std::int64_t recovered = 0;
  std::string diagnostic;  // set when the trial threw or misidentified
};

struct SweepRow {
  std::int64_t p = 0;
  double learning_rate = 0.0;
  std::size_t batch_size = 0;  // as requested; solver clamps to m
  std::size_t successes = 0;
  std::size_t trials = 0;
  std::vector<std::size_t> step_counts;  // successful trials, ascending
  double wall_seconds = 0.0;             // summed over the cell's trials
  std::vector<TrialOutcome> outcomes;    // by trial index
};

struct SweepReport {
  std::vector<SweepRow> rows;  // sorted by (p, eta, k)
};

// MODMUL_THREADS when set and positive, else the hardware thread count.
std::size_t default_worker_count();

// Stable 64-bit seed from a tuple of words, mixed through std::seed_seq.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

// `count` distinct secrets from [1, p-1]; depends only on (p, master_seed).
std::vector<std::int64_t> draw_secrets(std::int64_t p, std::size_t count,
                                       std::uint64_t master_seed);

// Results do not depend on `workers`. A trial that throws counts as a failure
// and keeps its message in the outcome diagnostic.
SweepReport run_sweep(const SweepSpec& spec,
                      std::size_t workers = default_worker_count());

// Fixed cell eta = 2, k = 256 per prime.
SweepSpec steps_spec(std::vector<std::int64_t> primes, std::size_t trials,
                     double sigma, std::uint64_t master_seed);
SweepReport run_steps_experiment(std::vector<std::int64_t> primes,
                                 std::size_t trials, double sigma,
                                 std::uint64_t master_seed,
                                 std::size_t workers = default_worker_count());

// p,eta,k,successes,trials,steps with steps ';'-joined.
void write_sweep_csv(std::ostream& out, const SweepReport& report);
// p,log2_p,successes,trials,steps with log2_p the bit length of p.
void write_steps_csv(std::ostream& out, const SweepReport& report);

// Curve over the noiseless dataset for (p, secret).
void emit_landscape(std::int64_t p, std::int64_t secret, CurveKind what,
                    double from, double to, double resolution,
                    std::ostream& out);

}  // namespace modmul

#endif  // MODMUL_HARNESS_HPP_

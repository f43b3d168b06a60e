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

#include "modmul/circreg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace modmul {

RegressionConfig RegressionConfig::for_noise(double sigma) {
  RegressionConfig cfg;
  if (sigma == 0.0) {
    cfg.verify_threshold = 0;
    cfg.verify_fraction = 1.0;
  } else {
    cfg.verify_threshold = static_cast<std::int64_t>(std::ceil(4.0 * sigma));
    cfg.verify_fraction = 0.95;
  }
  return cfg;
}

void RegressionConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning rate must be positive and finite");
  }
  if (batch_size == 0) throw ValidationError("batch size must be positive");
  if (max_steps && *max_steps == 0) {
    throw ValidationError("max_steps must be positive");
  }
  if (verify_threshold < 0) {
    throw ValidationError("verify threshold must be nonnegative");
  }
  if (!(verify_fraction > 0.0 && verify_fraction <= 1.0)) {
    throw ValidationError("verify fraction must lie in (0, 1]");
  }
  if (verify_batch_size == 0) {
    throw ValidationError("verify batch size must be positive");
  }
  if (!(grad_floor > 0.0) || !std::isfinite(grad_floor)) {
    throw ValidationError("grad floor must be positive and finite");
  }
  if (halt_mode == HaltMode::loss_tolerance &&
      (!(loss_tolerance > 0.0) || !std::isfinite(loss_tolerance))) {
    throw ValidationError("loss tolerance must be positive and finite");
  }
}

double step(double s_t, const AngleDataset& data, IndexList batch,
            const RegressionConfig& cfg) {
  double ascent = -mean_gradient<double>(s_t, data, batch);
  if (cfg.variant == UpdateRule::plain_gradient) {
    return s_t + cfg.learning_rate * ascent;
  }
  if (std::abs(ascent) < cfg.grad_floor) {
    ascent = ascent < 0.0 ? -cfg.grad_floor : cfg.grad_floor;
  }
  return s_t + cfg.learning_rate / ascent;
}

std::int64_t round_to_residue(double s, std::int64_t p) {
  const double rounded = std::floor(s + 0.5);
  const double wrapped = rounded - static_cast<double>(p) *
                                       std::floor(rounded / static_cast<double>(p));
  return reduce(static_cast<std::int64_t>(wrapped), p);
}

bool verify_candidate(std::int64_t candidate, const Dataset& d,
                      std::int64_t tau, double rho,
                      std::size_t verify_batch_size) {
  const std::int64_t p = d.p();
  const std::size_t m = d.size();
  const std::size_t n = std::min(m, std::max<std::size_t>(verify_batch_size, 1));
  const std::int64_t s = reduce(candidate, p);
  std::size_t within = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& [a, b] = d.samples()[j * m / n];
    if (std::abs(centered_residue(mul_mod(a, s, p) - b, p)) <= tau) ++within;
  }
  return static_cast<double>(within) >=
         rho * static_cast<double>(n) - 1e-9;
}

namespace {

double wrap(double s, double p) { return s - p * std::floor(s / p); }

bool gate_open(const RegressionConfig& cfg, const AngleDataset& data,
               double s) {
  const double m = static_cast<double>(data.size());
  switch (cfg.halt_mode) {
    case HaltMode::verify_rounding:
      return true;
    case HaltMode::loss_tolerance:
      return loss<double>(s, data) <= -m + cfg.loss_tolerance;
    case HaltMode::relaxed_half_m:
      return loss<double>(s, data) <= -m / 2.0;
  }
  return true;
}

}  // namespace

RegressionResult solve(const Dataset& d, const RegressionConfig& cfg,
                       Rng& rng) {
  cfg.validate();
  if (d.secret()) {
    throw ValidationError("solver input must not carry the secret");
  }
  const std::int64_t p = d.p();
  const double p_real = static_cast<double>(p);
  const AngleDataset data = to_angles(d);
  const std::size_t m = d.size();
  const std::size_t k = std::min(cfg.batch_size, m);
  const std::size_t max_steps =
      cfg.max_steps.value_or(static_cast<std::size_t>(p));

  std::vector<Eigen::Index> all_rows(m);
  std::iota(all_rows.begin(), all_rows.end(), Eigen::Index{0});
  std::vector<Eigen::Index> batch(k);

  const auto accept = [&](double s) {
    return gate_open(cfg, data, s) &&
           verify_candidate(round_to_residue(s, p), d, cfg.verify_threshold,
                            cfg.verify_fraction, cfg.verify_batch_size);
  };

  RegressionResult result;
  double s = 0.0;
  if (cfg.initial_guess) {
    s = static_cast<double>(reduce(*cfg.initial_guess, p));
  } else {
    std::uniform_int_distribution<std::int64_t> uniform(0, p - 1);
    s = static_cast<double>(uniform(rng));
  }
  if (cfg.record_trace) result.trace.push_back({0, s, loss<double>(s, data)});

  bool done = accept(s);
  result.success_at_init = done;
  std::size_t t = 0;
  while (!done && t < max_steps) {
    ++t;
    IndexList rows = all_rows;
    if (k < m) {
      std::sample(all_rows.begin(), all_rows.end(), batch.begin(), k, rng);
      rows = batch;
    }
    s = step(s, data, rows, cfg);
    if (!std::isfinite(s)) throw std::runtime_error("iterate diverged");
    s = wrap(s, p_real);
    if (cfg.record_trace) {
      result.trace.push_back({t, s, loss<double>(s, data, rows)});
    }
    done = accept(s);
  }

  result.success = done;
  result.steps_taken = t;
  result.final_s = s;
  result.recovered_secret = round_to_residue(s, p);
  return result;
}

}  // namespace modmul

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

#ifndef MODMUL_CIRCREG_HPP_
#define MODMUL_CIRCREG_HPP_

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "modmul/error.hpp"
#include "modmul/modnum.hpp"

namespace modmul {

// Samples rescaled onto the unit circle: y_i = 2*pi*b_i / p, with the
// multipliers a_i kept as scalars so expressions stay vectorised.
template <typename Scalar>
struct AngleData {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Scalar modulus{};
  Array a;
  Array y;

  Eigen::Index size() const { return a.size(); }
  Scalar frequency() const {
    return Scalar(2) * std::numbers::pi_v<Scalar> / modulus;
  }
};

using AngleDataset = AngleData<double>;

// Row selection for batch evaluation.
using IndexList = std::span<const Eigen::Index>;

// p is not required to be prime here.
template <typename Scalar = double>
AngleData<Scalar> to_angles(std::int64_t p, std::span<const Sample> samples) {
  AngleData<Scalar> out;
  out.modulus = static_cast<Scalar>(p);
  const auto m = static_cast<Eigen::Index>(samples.size());
  out.a.resize(m);
  out.y.resize(m);
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& sample = samples[static_cast<std::size_t>(i)];
    out.a(i) = static_cast<Scalar>(sample.a);
    out.y(i) = two_pi * static_cast<Scalar>(sample.b) / out.modulus;
  }
  return out;
}

inline AngleDataset to_angles(const Dataset& d) {
  return to_angles<double>(d.p(), d.samples());
}

namespace internal {

template <typename Scalar, typename Rows>
Scalar loss_impl(Scalar s, const AngleData<Scalar>& data, const Rows& rows) {
  const Scalar w = data.frequency();
  return -(data.y(rows) - (w * s) * data.a(rows)).cos().sum();
}

template <typename Scalar, typename Rows>
Scalar gradient_impl(Scalar s, const AngleData<Scalar>& data,
                     const Rows& rows) {
  const Scalar w = data.frequency();
  return -w * (data.a(rows) * (data.y(rows) - (w * s) * data.a(rows)).sin())
                  .sum();
}

inline void require_rows(IndexList rows, Eigen::Index size) {
  if (rows.empty()) throw ValidationError("empty subset: objective undefined");
  for (const auto i : rows) {
    if (i < 0 || i >= size) throw ValidationError("subset index out of range");
  }
}

}  // namespace internal

// Circular regression loss -sum cos(y_i - (2pi/p) a_i s). Periodic in s with
// period p and bounded by the subset size.
template <typename Scalar>
Scalar loss(std::type_identity_t<Scalar> s, const AngleData<Scalar>& data) {
  if (data.size() == 0) throw ValidationError("empty dataset");
  return internal::loss_impl(s, data, Eigen::seqN(0, data.size()));
}

template <typename Scalar>
Scalar loss(std::type_identity_t<Scalar> s, const AngleData<Scalar>& data,
            IndexList subset) {
  internal::require_rows(subset, data.size());
  return internal::loss_impl(s, data, subset);
}

// d(loss)/ds = -(2pi/p) sum a_i sin(y_i - (2pi/p) a_i s).
template <typename Scalar>
Scalar gradient(std::type_identity_t<Scalar> s, const AngleData<Scalar>& data) {
  if (data.size() == 0) throw ValidationError("empty dataset");
  return internal::gradient_impl(s, data, Eigen::seqN(0, data.size()));
}

template <typename Scalar>
Scalar gradient(std::type_identity_t<Scalar> s, const AngleData<Scalar>& data,
                IndexList subset) {
  internal::require_rows(subset, data.size());
  return internal::gradient_impl(s, data, subset);
}

template <typename Scalar>
Scalar mean_gradient(std::type_identity_t<Scalar> s,
                     const AngleData<Scalar>& data, IndexList batch) {
  return gradient(s, data, batch) / static_cast<Scalar>(batch.size());
}

template <typename Scalar>
Scalar mean_gradient(std::type_identity_t<Scalar> s,
                     const AngleData<Scalar>& data) {
  return gradient(s, data) / static_cast<Scalar>(data.size());
}

enum class UpdateRule { plain_gradient, reciprocal_gradient };

// When the solver rounds the iterate and runs the residual check.
//  - verify_rounding: every step.
//  - loss_tolerance: once the full-data loss is <= -m + epsilon.
//  - relaxed_half_m: once the full-data loss is <= -m/2.
enum class HaltMode { verify_rounding, loss_tolerance, relaxed_half_m };

struct RegressionConfig {
  double learning_rate = 2.0;
  std::size_t batch_size = 256;  // clamped to m
  std::optional<std::size_t> max_steps;  // defaults to p
  UpdateRule variant = UpdateRule::reciprocal_gradient;
  std::optional<std::int64_t> initial_guess;  // uniform in [0, p) if unset
  std::int64_t verify_threshold = 12;
  double verify_fraction = 0.95;
  std::size_t verify_batch_size = 1024;
  double grad_floor = 1e-8;
  HaltMode halt_mode = HaltMode::verify_rounding;
  double loss_tolerance = 1.0;
  bool record_trace = false;

  // tau = ceil(4 sigma), rho = 0.95; noiseless data uses tau = 0, rho = 1.
  static RegressionConfig for_noise(double sigma);

  void validate() const;
};

// Row 0 holds s_0 with the full-data loss; row t holds s_t and the loss on the
// batch that produced it.
struct TraceRow {
  std::size_t step = 0;
  double s = 0.0;
  double batch_loss = 0.0;
};

struct RegressionResult {
  bool success = false;
  bool success_at_init = false;
  std::size_t steps_taken = 0;
  double final_s = 0.0;
  std::int64_t recovered_secret = 0;
  std::vector<TraceRow> trace;
};

// One update. With q = (2pi/p)(1/k) sum a_i sin(y_i - (2pi/p) a_i s_t), the
// plain rule moves by eta*q and the reciprocal rule by eta/q, where |q| is
// first raised to at least grad_floor keeping its sign (zero counts as +).
double step(double s_t, const AngleDataset& data, IndexList batch,
            const RegressionConfig& cfg);

// The integer in (s - 1/2, s + 1/2], reduced into [0, p).
std::int64_t round_to_residue(double s, std::int64_t p);

// True iff |centered_residue(a*s - b)| <= tau for at least a fraction rho of
// an evenly strided subset of min(m, verify_batch_size) samples.
bool verify_candidate(std::int64_t candidate, const Dataset& d,
                      std::int64_t tau, double rho,
                      std::size_t verify_batch_size);

// Gradient-based secret recovery. Verification runs on s_0 before any
// update, so a lucky start succeeds at step 0. Iterates are kept in [0, p).
// The dataset must not carry its secret.
RegressionResult solve(const Dataset& d, const RegressionConfig& cfg, Rng& rng);

}  // namespace modmul

#endif  // MODMUL_CIRCREG_HPP_

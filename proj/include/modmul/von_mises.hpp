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

#ifndef MODMUL_VON_MISES_HPP_
#define MODMUL_VON_MISES_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>

#include "modmul/error.hpp"
#include "modmul/modnum.hpp"

namespace modmul {

// Modified Bessel function I0 by its power series
// sum_j ((kappa/2)^j / j!)^2, stopped once a term drops below 1e-16 of the
// partial sum.
template <typename Scalar>
Scalar bessel_i0(Scalar kappa) {
  if (!(kappa >= Scalar(0))) throw ValidationError("kappa must be >= 0");
  const Scalar quarter_sq = kappa * kappa / Scalar(4);
  Scalar term(1);
  Scalar sum(1);
  for (int j = 1; term >= Scalar(1e-16) * sum; ++j) {
    term *= quarter_sq / static_cast<Scalar>(j * j);
    sum += term;
  }
  return sum;
}

struct VonMisesParams {
  double mu = 0.0;
  double kappa = 0.0;
};

template <typename Scalar>
Scalar von_mises_pdf(Scalar theta, Scalar mu, Scalar kappa) {
  return std::exp(kappa * std::cos(theta - mu)) /
         (Scalar(2) * std::numbers::pi_v<Scalar> * bessel_i0(kappa));
}

inline double von_mises_pdf(double theta, const VonMisesParams& params) {
  return von_mises_pdf(theta, params.mu, params.kappa);
}

// von Mises restricted to the angles 2*pi*n/p, n in [-(p-1)/2, (p-1)/2],
// rescaled by a constant c so the p support values sum to one. c comes from
// direct summation over the support.
class DiscreteVonMises {
 public:
  DiscreteVonMises(VonMisesParams params, const Modulus& p);

  double pmf(std::int64_t n) const;

  std::int64_t support_min() const { return -(p_ - 1) / 2; }
  std::int64_t support_max() const { return (p_ - 1) / 2; }
  double normalizer() const { return normalizer_; }
  const VonMisesParams& params() const { return params_; }

 private:
  VonMisesParams params_;
  std::int64_t p_;
  double normalizer_;
};

}  // namespace modmul

#endif  // MODMUL_VON_MISES_HPP_

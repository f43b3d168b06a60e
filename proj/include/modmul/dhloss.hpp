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

#ifndef MODMUL_DHLOSS_HPP_
#define MODMUL_DHLOSS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <span>
#include <vector>

#include "modmul/error.hpp"
#include "modmul/modnum.hpp"
#include "modmul/seqrep.hpp"

namespace modmul {

// g fails to generate (Z/pZ)*: g^((p-1)/q) == 1 for the prime q | p-1.
class PrimitiveRootError : public ValidationError {
 public:
  PrimitiveRootError(std::int64_t g, std::int64_t p, std::int64_t q)
      : ValidationError(std::to_string(g) + " is not a primitive root mod " +
                        std::to_string(p) + ": g^((p-1)/" + std::to_string(q) +
                        ") = 1"),
        factor_(q) {}

  std::int64_t factor() const { return factor_; }

 private:
  std::int64_t factor_;
};

// A smooth_mod argument sits within 1e-6*p of a multiple of p, where the
// surrogate is not differentiable.
class WrapProximityError : public ValidationError {
 public:
  explicit WrapProximityError(std::size_t factor)
      : ValidationError("factor " + std::to_string(factor) +
                        " lies too close to a wrap point of smooth_mod"),
        factor_(factor) {}

  std::size_t factor() const { return factor_; }

 private:
  std::size_t factor_;
};

// Distinct prime divisors of n >= 1, ascending.
std::vector<std::int64_t> prime_factors(std::int64_t n);

bool is_primitive_root(std::int64_t g, const Modulus& p);

// Throws PrimitiveRootError naming the first offending prime factor.
void require_primitive_root(std::int64_t g, const Modulus& p);

struct DhSample {
  std::int64_t a = 0;
  std::int64_t y = 0;  // g^(a*s) mod p

  friend bool operator==(const DhSample&, const DhSample&) = default;
};

// Samples y = g^(a*s) mod p together with the table g_i = g^(B^i) mod p used
// to factor g^pred over the base-B digits of pred = a*s mod (p-1).
class DhInstance {
 public:
  DhInstance(Modulus p, std::int64_t g, std::int64_t secret, int base,
             std::vector<DhSample> samples);

  std::int64_t p() const { return p_.value(); }
  const Modulus& modulus() const { return p_; }
  std::int64_t g() const { return g_; }
  std::int64_t secret() const { return secret_; }
  int base() const { return base_; }
  // Digit count of pred; the power table has this many entries.
  std::size_t width() const { return power_table_.size(); }
  // power_table()[i] = g^(B^i) mod p, i = 0 .. width-1.
  const std::vector<std::int64_t>& power_table() const { return power_table_; }
  const std::vector<DhSample>& samples() const { return samples_; }

  // a*s mod (p-1), the exponent behind y.
  std::int64_t exponent(const DhSample& sample) const;
  TokenSequence ground_truth_digits(const DhSample& sample) const;

  friend bool operator==(const DhInstance&, const DhInstance&) = default;

 private:
  Modulus p_;
  std::int64_t g_;
  std::int64_t secret_;
  int base_;
  std::vector<std::int64_t> power_table_;
  std::vector<DhSample> samples_;
};

// count samples with distinct a drawn uniformly from [1, p-2].
DhInstance gen_dh_dataset(const Modulus& p, std::int64_t g, std::int64_t secret,
                          std::size_t count, int base, Rng& rng);

// (p/2pi) times the angle of (cos(2pi x/p), sin(2pi x/p)) taken in [0, 2pi).
// Equal to x on [0, p), periodic with period p, slope 1 off the wrap points.
template <typename Scalar>
Scalar smooth_mod(Scalar x, Scalar p) {
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Scalar angle = two_pi * x / p;
  Scalar phi = std::atan2(std::sin(angle), std::cos(angle));
  if (phi < Scalar(0)) phi += two_pi;
  Scalar out = p * phi / two_pi;
  if (out >= p) out = Scalar(0);
  return out;
}

// Distance from x to the nearest multiple of p.
double wrap_distance(double x, double p);

// Smallest wrap_distance / p over every smooth_mod argument met while
// evaluating dh_loss at the given digits, and the factor where it occurs.
struct WrapMargin {
  double relative_distance = 0.0;
  std::size_t factor = 0;
};

WrapMargin wrap_margin(std::span<const double> digits, const DhInstance& inst);

// (m(prod_j m(g_j^d_j)) - y)^2 with m = smooth_mod and real digits d_j taken
// most significant first (d_0 pairs with g_{width-1}). The product is folded
// as acc <- m(acc * m(g_j^d_j)), which equals the one-shot reduction for exact
// arithmetic and keeps every intermediate below p^2.
double dh_loss(std::span<const double> digits, const DhSample& sample,
               const DhInstance& inst);

std::vector<double> dh_loss_gradient(std::span<const double> digits,
                                     const DhSample& sample,
                                     const DhInstance& inst);

// prod_j g_j^d_j mod p - y over integer digits, signed.
std::int64_t exact_dh_residual(std::span<const int> digits,
                               const DhSample& sample, const DhInstance& inst);

// JSON Lines: meta {"p","g","base","width","secret"} then {"a","y"} lines.
void write_dh_dataset(std::ostream& out, const DhInstance& inst);
DhInstance read_dh_dataset(std::istream& in);

struct DhCheckReport {
  bool primitive_root = false;
  std::size_t samples = 0;
  std::size_t residual_failures = 0;
  // Smooth loss at the ground-truth digits, / p^2, over samples whose wrap
  // margin is at least 1e-6.
  double max_smooth_loss = 0.0;
  std::size_t smooth_checked = 0;
  std::size_t gradient_requested = 0;
  std::size_t gradient_points = 0;
  double max_gradient_error = 0.0;  // relative, against central differences

  bool passed() const;
};

// Residuals, smooth-loss floor, and finite-difference gradient checks at
// `gradient_points` random interior digit vectors.
DhCheckReport check_dh_instance(const DhInstance& inst, Rng& rng,
                                std::size_t gradient_points = 50);

}  // namespace modmul

#endif  // MODMUL_DHLOSS_HPP_

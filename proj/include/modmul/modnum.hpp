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

#ifndef MODMUL_MODNUM_HPP_
#define MODMUL_MODNUM_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

namespace modmul {

// The random stream used throughout. All sampling takes it explicitly.
using Rng = std::mt19937_64;

bool is_prime(std::uint64_t n);

// An odd prime p with 3 <= p < 2^32, checked by trial division.
class Modulus {
 public:
  explicit Modulus(std::int64_t p);

  std::int64_t value() const { return p_; }
  operator std::int64_t() const { return p_; }

  friend bool operator==(const Modulus&, const Modulus&) = default;

 private:
  std::int64_t p_;
};

struct Sample {
  std::int64_t a = 0;
  std::int64_t b = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// Noisy samples b = a*s + e (mod p). The secret is carried for evaluation
// only; the solver refuses datasets that still hold it.
class Dataset {
 public:
  Dataset(Modulus modulus, double sigma, std::vector<Sample> samples,
          std::optional<std::int64_t> secret = std::nullopt,
          std::optional<std::uint64_t> seed = std::nullopt);

  const Modulus& modulus() const { return modulus_; }
  std::int64_t p() const { return modulus_.value(); }
  double sigma() const { return sigma_; }
  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const std::optional<std::int64_t>& secret() const { return secret_; }
  const std::optional<std::uint64_t>& seed() const { return seed_; }

  Dataset without_secret() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Modulus modulus_;
  double sigma_;
  std::vector<Sample> samples_;
  std::optional<std::int64_t> secret_;
  std::optional<std::uint64_t> seed_;
};

// round(x) for x ~ N(0, sigma^2); sigma == 0 yields 0 without consuming rng.
std::int64_t sample_discrete_gaussian(double sigma, Rng& rng);

// One sample per a in 1..p-1, in that order, with fresh noise per sample.
Dataset gen_dataset(const Modulus& p, std::int64_t secret, double sigma,
                    Rng& rng, std::optional<std::uint64_t> seed = std::nullopt);

// Representative of x mod p in (-p/2, p/2].
std::int64_t centered_residue(std::int64_t x, std::int64_t p);

// Representative of x mod p in [0, p).
std::int64_t reduce(std::int64_t x, std::int64_t p);

std::int64_t mul_mod(std::int64_t x, std::int64_t y, std::int64_t p);

std::int64_t mod_pow(std::int64_t base, std::uint64_t exp, std::int64_t p);

// JSON Lines: a meta line {"p","sigma","m","secret","seed"} followed by one
// {"a","b"} object per sample.
void write_dataset(std::ostream& out, const Dataset& d);
Dataset read_dataset(std::istream& in);

}  // namespace modmul

#endif  // MODMUL_MODNUM_HPP_

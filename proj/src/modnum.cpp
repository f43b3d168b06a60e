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

#include "modmul/modnum.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "modmul/error.hpp"

namespace modmul {

using ordered_json = nlohmann::ordered_json;

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0 || n % 3 == 0) return false;
  for (std::uint64_t d = 5; d * d <= n; d += 6) {
    if (n % d == 0 || n % (d + 2) == 0) return false;
  }
  return true;
}

Modulus::Modulus(std::int64_t p) : p_(p) {
  if (p < 3) {
    throw ValidationError("modulus must be >= 3, got " + std::to_string(p));
  }
  if (p >= (std::int64_t{1} << 32)) {
    throw ValidationError("modulus must be below 2^32, got " +
                          std::to_string(p));
  }
  if (!is_prime(static_cast<std::uint64_t>(p))) {
    throw ValidationError("modulus " + std::to_string(p) + " is not prime");
  }
}

Dataset::Dataset(Modulus modulus, double sigma, std::vector<Sample> samples,
                 std::optional<std::int64_t> secret,
                 std::optional<std::uint64_t> seed)
    : modulus_(modulus),
      sigma_(sigma),
      samples_(std::move(samples)),
      secret_(secret),
      seed_(seed) {
  const std::int64_t p = modulus_.value();
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) {
    throw ValidationError("sigma must be a finite nonnegative number");
  }
  if (samples_.empty()) {
    throw ValidationError("dataset must hold at least one sample");
  }
  for (const auto& [a, b] : samples_) {
    if (a < 1 || a >= p || b < 0 || b >= p) {
      throw ValidationError("sample (" + std::to_string(a) + ", " +
                            std::to_string(b) + ") out of range for p = " +
                            std::to_string(p));
    }
  }
  if (secret_ && (*secret_ < 1 || *secret_ >= p)) {
    throw ValidationError("secret must lie in [1, p-1]");
  }
}

Dataset Dataset::without_secret() const {
  Dataset copy = *this;
  copy.secret_.reset();
  return copy;
}

std::int64_t sample_discrete_gaussian(double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be nonnegative");
  if (sigma == 0.0) return 0;
  std::normal_distribution<double> normal(0.0, sigma);
  return std::llround(normal(rng));
}

Dataset gen_dataset(const Modulus& p, std::int64_t secret, double sigma,
                    Rng& rng, std::optional<std::uint64_t> seed) {
  const std::int64_t q = p.value();
  if (secret < 1 || secret >= q) {
    throw ValidationError("secret must lie in [1, p-1], got " +
                          std::to_string(secret));
  }
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(q - 1));
  for (std::int64_t a = 1; a < q; ++a) {
    const std::int64_t e = sample_discrete_gaussian(sigma, rng);
    samples.push_back({a, reduce(mul_mod(a, secret, q) + reduce(e, q), q)});
  }
  return Dataset(p, sigma, std::move(samples), secret, seed);
}

std::int64_t reduce(std::int64_t x, std::int64_t p) {
  const std::int64_t r = x % p;
  return r < 0 ? r + p : r;
}

std::int64_t centered_residue(std::int64_t x, std::int64_t p) {
  const std::int64_t r = reduce(x, p);
  return 2 * r > p ? r - p : r;
}

std::int64_t mul_mod(std::int64_t x, std::int64_t y, std::int64_t p) {
  // Both factors are below p < 2^32, so the product fits in 64 bits.
  const auto product = static_cast<std::uint64_t>(reduce(x, p)) *
                       static_cast<std::uint64_t>(reduce(y, p));
  return static_cast<std::int64_t>(product % static_cast<std::uint64_t>(p));
}

std::int64_t mod_pow(std::int64_t base, std::uint64_t exp, std::int64_t p) {
  if (p < 1 || p >= (std::int64_t{1} << 32)) {
    throw ValidationError("mod_pow needs a modulus in [1, 2^32)");
  }
  std::int64_t result = 1 % p;
  std::int64_t square = reduce(base, p);
  while (exp > 0) {
    if (exp & 1U) result = mul_mod(result, square, p);
    square = mul_mod(square, square, p);
    exp >>= 1U;
  }
  return result;
}

void write_dataset(std::ostream& out, const Dataset& d) {
  ordered_json meta;
  meta["p"] = d.p();
  meta["sigma"] = d.sigma();
  meta["m"] = d.size();
  meta["secret"] = d.secret() ? ordered_json(*d.secret()) : ordered_json();
  meta["seed"] = d.seed() ? ordered_json(*d.seed()) : ordered_json();
  out << meta.dump() << '\n';
  for (const auto& [a, b] : d.samples()) {
    ordered_json row;
    row["a"] = a;
    row["b"] = b;
    out << row.dump() << '\n';
  }
}

namespace {

template <typename T>
T field(const nlohmann::json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) {
    throw ParseError(line, std::string("missing field \"") + key + "\"");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(line, std::string("field \"") + key + "\" has wrong type");
  }
}

nlohmann::json parse_line(const std::string& text, std::size_t line) {
  try {
    auto value = nlohmann::json::parse(text);
    if (!value.is_object()) throw ParseError(line, "expected a JSON object");
    return value;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line, e.what());
  }
}

}  // namespace

Dataset read_dataset(std::istream& in) {
  std::string text;
  if (!std::getline(in, text)) throw ParseError(1, "missing meta line");
  const auto meta = parse_line(text, 1);

  std::optional<Modulus> modulus;
  try {
    modulus.emplace(field<std::int64_t>(meta, "p", 1));
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(1, e.what());
  }
  const auto sigma = field<double>(meta, "sigma", 1);
  const auto m = field<std::int64_t>(meta, "m", 1);
  if (m < 1) throw ParseError(1, "m must be positive");
  std::optional<std::int64_t> secret;
  if (meta.contains("secret") && !meta["secret"].is_null()) {
    secret = field<std::int64_t>(meta, "secret", 1);
  }
  std::optional<std::uint64_t> seed;
  if (meta.contains("seed") && !meta["seed"].is_null()) {
    seed = field<std::uint64_t>(meta, "seed", 1);
  }

  const std::int64_t p = modulus->value();
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(m));
  std::size_t line = 1;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    const auto row = parse_line(text, line);
    const auto a = field<std::int64_t>(row, "a", line);
    const auto b = field<std::int64_t>(row, "b", line);
    if (a < 1 || a >= p) throw ParseError(line, "a out of range [1, p-1]");
    if (b < 0 || b >= p) throw ParseError(line, "b out of range [0, p-1]");
    samples.push_back({a, b});
  }
  if (static_cast<std::int64_t>(samples.size()) != m) {
    throw ParseError(line, "meta declares m = " + std::to_string(m) +
                               " but file holds " +
                               std::to_string(samples.size()) + " samples");
  }
  if (secret && (*secret < 1 || *secret >= p)) {
    throw ParseError(1, "secret out of range [1, p-1]");
  }
  try {
    return Dataset(*modulus, sigma, std::move(samples), secret, seed);
  } catch (const ValidationError& e) {
    throw ParseError(1, e.what());
  }
}

}  // namespace modmul

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

#include "modmul/dhloss.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

namespace modmul {

std::vector<std::int64_t> prime_factors(std::int64_t n) {
  if (n < 1) throw ValidationError("prime_factors needs n >= 1");
  std::vector<std::int64_t> factors;
  for (std::int64_t q = 2; q * q <= n; ++q) {
    if (n % q != 0) continue;
    factors.push_back(q);
    while (n % q == 0) n /= q;
  }
  if (n > 1) factors.push_back(n);
  return factors;
}

namespace {

// First prime q | p-1 with g^((p-1)/q) == 1, or 0 when g is primitive.
std::int64_t order_witness(std::int64_t g, const Modulus& p) {
  const std::int64_t order = p.value() - 1;
  if (reduce(g, p.value()) == 0) return 1;
  for (const auto q : prime_factors(order)) {
    if (mod_pow(g, static_cast<std::uint64_t>(order / q), p.value()) == 1) {
      return q;
    }
  }
  return 0;
}

}  // namespace

bool is_primitive_root(std::int64_t g, const Modulus& p) {
  return order_witness(g, p) == 0;
}

void require_primitive_root(std::int64_t g, const Modulus& p) {
  const std::int64_t q = order_witness(g, p);
  if (q == 1) {
    throw ValidationError(std::to_string(g) + " is divisible by " +
                          std::to_string(p.value()));
  }
  if (q != 0) throw PrimitiveRootError(g, p.value(), q);
}

DhInstance::DhInstance(Modulus p, std::int64_t g, std::int64_t secret,
                       int base, std::vector<DhSample> samples)
    : p_(p), g_(g), secret_(secret), base_(base), samples_(std::move(samples)) {
  const std::int64_t q = p_.value();
  if (g_ < 1 || g_ >= q) throw ValidationError("g must lie in [1, p-1]");
  require_primitive_root(g_, p_);
  if (secret_ < 1 || secret_ > q - 2) {
    throw ValidationError("secret must lie in [1, p-2]");
  }
  if (base_ < 2) throw ValidationError("base must be >= 2");

  const std::size_t width = width_for(q - 1, base_);
  power_table_.reserve(width);
  std::int64_t power = g_;
  for (std::size_t i = 0; i < width; ++i) {
    power_table_.push_back(power);
    power = mod_pow(power, static_cast<std::uint64_t>(base_), q);
  }

  for (const auto& sample : samples_) {
    if (sample.a < 1 || sample.a > q - 2) {
      throw ValidationError("sample a = " + std::to_string(sample.a) +
                            " outside [1, p-2]");
    }
    const auto expected =
        mod_pow(g_, static_cast<std::uint64_t>(exponent(sample)), q);
    if (sample.y != expected) {
      throw ValidationError("sample a = " + std::to_string(sample.a) +
                            " has y = " + std::to_string(sample.y) +
                            ", expected " + std::to_string(expected));
    }
  }
}

std::int64_t DhInstance::exponent(const DhSample& sample) const {
  return mul_mod(sample.a, secret_, p_.value() - 1);
}

TokenSequence DhInstance::ground_truth_digits(const DhSample& sample) const {
  return encode(exponent(sample), base_, width());
}

DhInstance gen_dh_dataset(const Modulus& p, std::int64_t g, std::int64_t secret,
                          std::size_t count, int base, Rng& rng) {
  const std::int64_t q = p.value();
  require_primitive_root(g, p);
  if (count < 1 || count > static_cast<std::size_t>(q - 2)) {
    throw ValidationError("sample count must lie in [1, p-2]");
  }
  std::vector<std::int64_t> pool(static_cast<std::size_t>(q - 2));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    pool[i] = static_cast<std::int64_t>(i) + 1;
  }
  std::vector<std::int64_t> chosen(count);
  std::sample(pool.begin(), pool.end(), chosen.begin(), count, rng);
  std::shuffle(chosen.begin(), chosen.end(), rng);

  std::vector<DhSample> samples;
  samples.reserve(count);
  for (const auto a : chosen) {
    const auto exp = static_cast<std::uint64_t>(mul_mod(a, secret, q - 1));
    samples.push_back({a, mod_pow(g, exp, q)});
  }
  return DhInstance(p, g, secret, base, std::move(samples));
}

double wrap_distance(double x, double p) {
  const double r = x - p * std::floor(x / p);
  return std::min(r, p - r);
}

namespace {

struct Forward {
  std::vector<double> power;    // g_j^d_j
  std::vector<double> factor;   // m(g_j^d_j)
  std::vector<double> partial;  // acc before factor j is folded in
  std::vector<double> branch;   // floor(x / p) of every smooth_mod argument
  double value = 0.0;           // final m(...)
  WrapMargin margin{1.0, 0};
};

void require_width(std::size_t n, const DhInstance& inst) {
  if (n != inst.width()) {
    throw ValidationError("expected " + std::to_string(inst.width()) +
                          " digits, got " + std::to_string(n));
  }
}

double log_power_for(const DhInstance& inst, std::size_t j) {
  const auto& table = inst.power_table();
  return std::log(static_cast<double>(table[table.size() - 1 - j]));
}

Forward forward(std::span<const double> digits, const DhInstance& inst) {
  require_width(digits.size(), inst);
  const double p = static_cast<double>(inst.p());
  Forward f;
  const auto n = digits.size();
  f.power.resize(n);
  f.factor.resize(n);
  f.partial.resize(n);
  const auto track = [&](double x, std::size_t j) {
    const double rel = wrap_distance(x, p) / p;
    if (rel < f.margin.relative_distance) f.margin = {rel, j};
    f.branch.push_back(std::floor(x / p));
  };
  double acc = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    f.power[j] = std::exp(digits[j] * log_power_for(inst, j));
    track(f.power[j], j);
    f.factor[j] = smooth_mod(f.power[j], p);
    f.partial[j] = acc;
    track(acc * f.factor[j], j);
    acc = smooth_mod(acc * f.factor[j], p);
  }
  f.value = acc;
  return f;
}

}  // namespace

WrapMargin wrap_margin(std::span<const double> digits, const DhInstance& inst) {
  return forward(digits, inst).margin;
}

double dh_loss(std::span<const double> digits, const DhSample& sample,
               const DhInstance& inst) {
  const double diff = forward(digits, inst).value - static_cast<double>(sample.y);
  return diff * diff;
}

std::vector<double> dh_loss_gradient(std::span<const double> digits,
                                     const DhSample& sample,
                                     const DhInstance& inst) {
  const Forward f = forward(digits, inst);
  if (f.margin.relative_distance < 1e-6) {
    throw WrapProximityError(f.margin.factor);
  }
  const double outer = 2.0 * (f.value - static_cast<double>(sample.y));
  std::vector<double> grad(digits.size());
  // Every smooth_mod has slope 1 here, so d(acc_j)/d(acc_{j-1}) = factor_j
  // and d(acc_j)/d(factor_j) = acc_{j-1}.
  double adjoint = 1.0;
  for (std::size_t j = digits.size(); j-- > 0;) {
    grad[j] = outer * adjoint * f.partial[j] * f.power[j] *
              log_power_for(inst, j);
    adjoint *= f.factor[j];
  }
  return grad;
}

std::int64_t exact_dh_residual(std::span<const int> digits,
                               const DhSample& sample, const DhInstance& inst) {
  require_width(digits.size(), inst);
  const auto& table = inst.power_table();
  std::int64_t product = 1;
  for (std::size_t j = 0; j < digits.size(); ++j) {
    if (digits[j] < 0 || digits[j] >= inst.base()) {
      throw ValidationError("digit outside base");
    }
    const auto g_j = table[table.size() - 1 - j];
    product = mul_mod(product,
                      mod_pow(g_j, static_cast<std::uint64_t>(digits[j]),
                              inst.p()),
                      inst.p());
  }
  return product - sample.y;
}

void write_dh_dataset(std::ostream& out, const DhInstance& inst) {
  nlohmann::ordered_json meta;
  meta["p"] = inst.p();
  meta["g"] = inst.g();
  meta["base"] = inst.base();
  meta["width"] = inst.width();
  meta["secret"] = inst.secret();
  out << meta.dump() << '\n';
  for (const auto& [a, y] : inst.samples()) {
    nlohmann::ordered_json row;
    row["a"] = a;
    row["y"] = y;
    out << row.dump() << '\n';
  }
}

namespace {

nlohmann::json parse_object(const std::string& text, std::size_t line) {
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line, e.what());
  }
  if (!value.is_object()) throw ParseError(line, "expected a JSON object");
  return value;
}

std::int64_t int_field(const nlohmann::json& obj, const char* key,
                       std::size_t line) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer()) {
    throw ParseError(line, std::string("missing or non-integer field \"") +
                               key + "\"");
  }
  return obj.at(key).get<std::int64_t>();
}

}  // namespace

DhInstance read_dh_dataset(std::istream& in) {
  std::string text;
  if (!std::getline(in, text)) throw ParseError(1, "missing meta line");
  const auto meta = parse_object(text, 1);
  const auto p = int_field(meta, "p", 1);
  const auto g = int_field(meta, "g", 1);
  const auto base = int_field(meta, "base", 1);
  const auto width = int_field(meta, "width", 1);
  const auto secret = int_field(meta, "secret", 1);
  if (base < 2 || base > 1'000'000) throw ParseError(1, "base out of range");

  std::vector<DhSample> samples;
  std::size_t line = 1;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    const auto row = parse_object(text, line);
    samples.push_back({int_field(row, "a", line), int_field(row, "y", line)});
  }
  try {
    DhInstance inst(Modulus(p), g, secret, static_cast<int>(base),
                    std::move(samples));
    if (static_cast<std::int64_t>(inst.width()) != width) {
      throw ParseError(1, "width " + std::to_string(width) +
                              " does not match base and p (expected " +
                              std::to_string(inst.width()) + ")");
    }
    return inst;
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(1, e.what());
  }
}

bool DhCheckReport::passed() const {
  return primitive_root && residual_failures == 0 &&
         max_smooth_loss <= 1e-6 && gradient_points == gradient_requested &&
         max_gradient_error <= 1e-4;
}

DhCheckReport check_dh_instance(const DhInstance& inst, Rng& rng,
                                std::size_t gradient_points) {
  DhCheckReport report;
  report.primitive_root = is_primitive_root(inst.g(), inst.modulus());
  report.samples = inst.samples().size();
  report.gradient_requested = gradient_points;
  const double p = static_cast<double>(inst.p());

  for (const auto& sample : inst.samples()) {
    const auto truth = inst.ground_truth_digits(sample);
    if (exact_dh_residual(truth.digits, sample, inst) != 0) {
      ++report.residual_failures;
    }
    const std::vector<double> relaxed(truth.digits.begin(), truth.digits.end());
    if (wrap_margin(relaxed, inst).relative_distance < 1e-6) continue;
    report.max_smooth_loss =
        std::max(report.max_smooth_loss, dh_loss(relaxed, sample, inst) / (p * p));
    ++report.smooth_checked;
  }

  if (inst.samples().empty()) return report;
  std::uniform_real_distribution<double> digit(0.0,
                                               static_cast<double>(inst.base() - 1));
  std::uniform_int_distribution<std::size_t> pick(0, inst.samples().size() - 1);
  constexpr double h = 1e-6;
  std::vector<double> point(inst.width());
  std::size_t attempts = 0;
  while (report.gradient_points < gradient_points &&
         attempts < 1000 * gradient_points) {
    ++attempts;
    for (auto& d : point) d = digit(rng);
    if (wrap_margin(point, inst).relative_distance < 1e-3) continue;
    // Central differences need the whole stencil on one smooth branch.
    const auto centre = forward(point, inst).branch;
    const auto& sample = inst.samples()[pick(rng)];
    bool same_branch = true;
    double worst = 0.0;
    double scale = 0.0;
    const auto analytic = dh_loss_gradient(point, sample, inst);
    for (std::size_t j = 0; j < point.size() && same_branch; ++j) {
      auto up = point;
      auto down = point;
      up[j] += h;
      down[j] -= h;
      same_branch = forward(up, inst).branch == centre &&
                    forward(down, inst).branch == centre;
      const double numeric =
          (dh_loss(up, sample, inst) - dh_loss(down, sample, inst)) / (2 * h);
      worst = std::max(worst, std::abs(numeric - analytic[j]));
      scale = std::max(scale, std::abs(analytic[j]));
    }
    if (!same_branch) continue;
    report.max_gradient_error =
        std::max(report.max_gradient_error, worst / std::max(scale, 1e-12));
    ++report.gradient_points;
  }
  return report;
}

}  // namespace modmul

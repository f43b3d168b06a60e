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

#include "modmul/von_mises.hpp"

#include <string>

namespace modmul {

DiscreteVonMises::DiscreteVonMises(VonMisesParams params, const Modulus& p)
    : params_(params), p_(p.value()), normalizer_(0.0) {
  if (!(params.kappa >= 0.0)) throw ValidationError("kappa must be >= 0");
  const double step = 2.0 * std::numbers::pi / static_cast<double>(p_);
  double total = 0.0;
  for (std::int64_t n = support_min(); n <= support_max(); ++n) {
    total += von_mises_pdf(step * static_cast<double>(n), params_);
  }
  normalizer_ = 1.0 / total;
}

double DiscreteVonMises::pmf(std::int64_t n) const {
  if (n < support_min() || n > support_max()) {
    throw ValidationError("index " + std::to_string(n) +
                          " outside the discrete support");
  }
  const double step = 2.0 * std::numbers::pi / static_cast<double>(p_);
  return normalizer_ * von_mises_pdf(step * static_cast<double>(n), params_);
}

}  // namespace modmul

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

#include "modmul/landscape.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "modmul/circreg.hpp"
#include "modmul/error.hpp"

namespace modmul {

CurveKind parse_curve_kind(std::string_view name) {
  if (name == "loss") return CurveKind::loss;
  if (name == "grad") return CurveKind::gradient;
  if (name == "grad-recip") return CurveKind::reciprocal_gradient;
  throw ValidationError("unknown curve kind '" + std::string(name) +
                        "' (expected loss, grad or grad-recip)");
}

std::vector<CurvePoint> sample_curve(const Dataset& d, CurveKind what,
                                     double s_min, double s_max,
                                     double resolution, double grad_floor) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw ValidationError("resolution must be positive");
  }
  if (!std::isfinite(s_min) || !std::isfinite(s_max) || s_max < s_min) {
    throw ValidationError("curve range must satisfy s_min <= s_max");
  }
  const AngleDataset data = to_angles(d);
  const auto count =
      static_cast<std::size_t>(std::floor((s_max - s_min) / resolution + 1e-9)) +
      1;
  std::vector<CurvePoint> curve;
  curve.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CurvePoint point;
    point.s = s_min + static_cast<double>(i) * resolution;
    switch (what) {
      case CurveKind::loss:
        point.value = loss<double>(point.s, data);
        break;
      case CurveKind::gradient:
        point.value = gradient<double>(point.s, data);
        break;
      case CurveKind::reciprocal_gradient: {
        const double g = gradient<double>(point.s, data);
        point.clamped = std::abs(g) < grad_floor;
        point.value = point.clamped ? 0.0 : 1.0 / g;
        break;
      }
    }
    curve.push_back(point);
  }
  return curve;
}

std::string format_real(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buffer, end);
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "s,value\n";
  for (const auto& point : curve) {
    out << format_real(point.s) << ','
        << (point.clamped ? std::string("inf_clamped") : format_real(point.value))
        << '\n';
  }
}

}  // namespace modmul

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

#ifndef MODMUL_LANDSCAPE_HPP_
#define MODMUL_LANDSCAPE_HPP_

#include <iosfwd>
#include <string_view>
#include <vector>

#include "modmul/modnum.hpp"

namespace modmul {

enum class CurveKind { loss, gradient, reciprocal_gradient };

CurveKind parse_curve_kind(std::string_view name);  // loss|grad|grad-recip

struct CurvePoint {
  double s = 0.0;
  double value = 0.0;
  bool clamped = false;  // reciprocal of a gradient below the floor
};

// Evaluates the chosen quantity on the full dataset at s_min + i*resolution
// for every i with that point <= s_max.
std::vector<CurvePoint> sample_curve(const Dataset& d, CurveKind what,
                                     double s_min, double s_max,
                                     double resolution,
                                     double grad_floor = 1e-8);

// Header "s,value"; clamped points are written as "s,inf_clamped".
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

// Shortest decimal text that reads back to the same double.
std::string format_real(double value);

}  // namespace modmul

#endif  // MODMUL_LANDSCAPE_HPP_

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

#ifndef MODMUL_SEQREP_HPP_
#define MODMUL_SEQREP_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace modmul {

// Fixed-width base-B digits, most significant first.
struct TokenSequence {
  int base = 10;
  std::vector<int> digits;

  std::size_t width() const { return digits.size(); }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Smallest t with base^t > p - 1.
std::size_t width_for(std::int64_t p, int base);

TokenSequence encode(std::int64_t x, int base, std::size_t width);
std::int64_t decode(const TokenSequence& seq);

struct ArithmeticDifference {
  std::int64_t raw = 0;
  std::optional<double> normalized;  // raw / p when p is given
};

ArithmeticDifference arithmetic_difference(
    const TokenSequence& pred, const TokenSequence& truth,
    std::optional<std::int64_t> p = std::nullopt);

using PredictionPair = std::pair<TokenSequence, TokenSequence>;

double exact_match_accuracy(std::span<const PredictionPair> pairs);

// Prediction-pair file: meta {"p","base","width"} then one
// {"a","pred_digits","true_digits"} object per line.
struct PredictionRecord {
  std::int64_t a = 0;
  TokenSequence pred;
  TokenSequence truth;
};

struct PredictionFile {
  std::int64_t p = 0;
  int base = 10;
  std::size_t width = 0;
  std::vector<PredictionRecord> records;
};

PredictionFile read_prediction_file(std::istream& in);
void write_prediction_file(std::ostream& out, const PredictionFile& file);

struct MetricsSummary {
  std::size_t count = 0;
  double exact_match_accuracy = 0.0;
  double mean_arithmetic_difference = 0.0;
  double mean_normalized_difference = 0.0;
};

MetricsSummary summarize(const PredictionFile& file);

}  // namespace modmul

#endif  // MODMUL_SEQREP_HPP_

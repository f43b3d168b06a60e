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

#include "modmul/seqrep.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "json.hpp"
#include "modmul/error.hpp"

namespace modmul {

namespace {

void require_base(int base) {
  if (base < 2) throw ValidationError("base must be >= 2");
}

// base^width, or nullopt once it exceeds int64.
std::optional<std::int64_t> checked_power(int base, std::size_t width) {
  std::int64_t value = 1;
  for (std::size_t i = 0; i < width; ++i) {
    if (value > std::numeric_limits<std::int64_t>::max() / base) {
      return std::nullopt;
    }
    value *= base;
  }
  return value;
}

}  // namespace

std::size_t width_for(std::int64_t p, int base) {
  require_base(base);
  if (p < 2) throw ValidationError("p must be >= 2");
  // Digit count of p - 1.
  std::size_t t = 0;
  std::int64_t rest = p - 1;
  do {
    ++t;
    rest /= base;
  } while (rest > 0);
  return t;
}

TokenSequence encode(std::int64_t x, int base, std::size_t width) {
  require_base(base);
  if (width == 0) throw ValidationError("width must be positive");
  const auto limit = checked_power(base, width);
  if (x < 0 || (limit && x >= *limit)) {
    throw ValidationError(std::to_string(x) + " does not fit in " +
                          std::to_string(width) + " base-" +
                          std::to_string(base) + " digits");
  }
  TokenSequence seq{base, std::vector<int>(width, 0)};
  for (std::size_t j = width; j-- > 0 && x > 0;) {
    seq.digits[j] = static_cast<int>(x % base);
    x /= base;
  }
  return seq;
}

std::int64_t decode(const TokenSequence& seq) {
  require_base(seq.base);
  if (!checked_power(seq.base, seq.width())) {
    throw ValidationError("sequence too wide to decode into 64 bits");
  }
  std::int64_t value = 0;
  for (const int d : seq.digits) {
    if (d < 0 || d >= seq.base) {
      throw ValidationError("digit " + std::to_string(d) +
                            " outside base " + std::to_string(seq.base));
    }
    value = value * seq.base + d;
  }
  return value;
}

ArithmeticDifference arithmetic_difference(const TokenSequence& pred,
                                           const TokenSequence& truth,
                                           std::optional<std::int64_t> p) {
  if (pred.base != truth.base || pred.width() != truth.width()) {
    throw ValidationError("prediction and truth differ in base or width");
  }
  const std::int64_t lhs = decode(pred);
  const std::int64_t rhs = decode(truth);
  ArithmeticDifference out;
  out.raw = lhs > rhs ? lhs - rhs : rhs - lhs;
  if (p) {
    if (*p <= 0) throw ValidationError("normalizing p must be positive");
    out.normalized = static_cast<double>(out.raw) / static_cast<double>(*p);
  }
  return out;
}

double exact_match_accuracy(std::span<const PredictionPair> pairs) {
  if (pairs.empty()) throw ValidationError("no prediction pairs");
  std::size_t hits = 0;
  for (const auto& [pred, truth] : pairs) {
    if (pred.base != truth.base || pred.width() != truth.width()) {
      throw ValidationError("prediction and truth differ in base or width");
    }
    if (pred.digits == truth.digits) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
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

TokenSequence digits_field(const nlohmann::json& obj, const char* key,
                           const PredictionFile& meta, std::size_t line) {
  TokenSequence seq{meta.base, field<std::vector<int>>(obj, key, line)};
  if (seq.width() != meta.width) {
    throw ParseError(line, std::string("\"") + key + "\" has width " +
                               std::to_string(seq.width()) + ", expected " +
                               std::to_string(meta.width));
  }
  for (const int d : seq.digits) {
    if (d < 0 || d >= meta.base) {
      throw ParseError(line, std::string("\"") + key +
                                 "\" holds a digit outside the base");
    }
  }
  return seq;
}

}  // namespace

PredictionFile read_prediction_file(std::istream& in) {
  std::string text;
  if (!std::getline(in, text)) throw ParseError(1, "missing meta line");
  const auto meta = parse_object(text, 1);
  PredictionFile file;
  file.p = field<std::int64_t>(meta, "p", 1);
  file.base = field<int>(meta, "base", 1);
  const auto width = field<std::int64_t>(meta, "width", 1);
  if (file.p < 2) throw ParseError(1, "p must be >= 2");
  if (file.base < 2) throw ParseError(1, "base must be >= 2");
  if (width < 1 || !checked_power(file.base, static_cast<std::size_t>(width))) {
    throw ParseError(1, "width out of range");
  }
  file.width = static_cast<std::size_t>(width);

  std::size_t line = 1;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    const auto row = parse_object(text, line);
    PredictionRecord record;
    record.a = field<std::int64_t>(row, "a", line);
    record.pred = digits_field(row, "pred_digits", file, line);
    record.truth = digits_field(row, "true_digits", file, line);
    file.records.push_back(std::move(record));
  }
  return file;
}

void write_prediction_file(std::ostream& out, const PredictionFile& file) {
  nlohmann::ordered_json meta;
  meta["p"] = file.p;
  meta["base"] = file.base;
  meta["width"] = file.width;
  out << meta.dump() << '\n';
  for (const auto& record : file.records) {
    nlohmann::ordered_json row;
    row["a"] = record.a;
    row["pred_digits"] = record.pred.digits;
    row["true_digits"] = record.truth.digits;
    out << row.dump() << '\n';
  }
}

MetricsSummary summarize(const PredictionFile& file) {
  if (file.records.empty()) throw ValidationError("no prediction records");
  std::vector<PredictionPair> pairs;
  pairs.reserve(file.records.size());
  double raw_total = 0.0;
  double normalized_total = 0.0;
  for (const auto& record : file.records) {
    const auto diff = arithmetic_difference(record.pred, record.truth, file.p);
    raw_total += static_cast<double>(diff.raw);
    normalized_total += *diff.normalized;
    pairs.emplace_back(record.pred, record.truth);
  }
  const auto n = static_cast<double>(file.records.size());
  MetricsSummary summary;
  summary.count = file.records.size();
  summary.exact_match_accuracy = exact_match_accuracy(pairs);
  summary.mean_arithmetic_difference = raw_total / n;
  summary.mean_normalized_difference = normalized_total / n;
  return summary;
}

}  // namespace modmul

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

#ifndef MODMUL_ERROR_HPP_
#define MODMUL_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modmul {

// Bad input: out-of-range arguments, invalid configs, malformed files.
// The CLI maps this family to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed line in a JSON Lines input. Line numbers are 1-based.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& message)
      : ValidationError("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace modmul

#endif  // MODMUL_ERROR_HPP_

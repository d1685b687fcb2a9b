// Copyright 2026 The SeqRank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEQRANK_ERROR_HPP_
#define SEQRANK_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace seqrank {

// Base of every error the library throws. The CLI maps each category to a
// distinct process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape disagreement between vectors/matrices.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid user-supplied configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data, unknown ids, bad checkpoints (exit 3).
class DataError : public Error {
 public:
  using Error::Error;
};

// Parse failure with the offending line number.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A parameter became NaN/Inf during training (exit 4).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Negative sampling impossible: the user owns every item.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace seqrank

#endif  // SEQRANK_ERROR_HPP_

// Copyright 2026 The entnas Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace entnas {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A rejection sampler ran out of attempts (degenerate search space).
class RejectionLimitError : public Error {
 public:
  using Error::Error;
};

class SpaceTooLargeError : public Error {
 public:
  using Error::Error;
};

class DecompositionError : public Error {
 public:
  using Error::Error;
};

// Table metadata does not match the active entropy configuration.
class StaleTableError : public Error {
 public:
  using Error::Error;
};

class MissingKeyError : public Error {
 public:
  using Error::Error;
};

class InfeasibleBudgetError : public Error {
 public:
  using Error::Error;
};

class OutOfGridError : public Error {
 public:
  using Error::Error;
};

class MissingProfileError : public Error {
 public:
  using Error::Error;
};

class SeqLenError : public Error {
 public:
  using Error::Error;
};

// Malformed or unsupported document contents.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace entnas

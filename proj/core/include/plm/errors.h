// Copyright 2026 The PLM Authors.
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

#ifndef PLM_ERRORS_H_
#define PLM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace plm {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or unparseable input files.
class InputError : public Error {
 public:
  using Error::Error;
};

// Data that parses but violates a structural invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad option values or inconsistent settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Spans that do not fit the window they are laid out against.
class LayoutError : public Error {
 public:
  using Error::Error;
};

// A layout that would exceed the encoder's slot budget.
class OverflowError : public LayoutError {
 public:
  using LayoutError::LayoutError;
};

// Missing entries in an origin map or label table.
class LookupError : public Error {
 public:
  using Error::Error;
};

// NaN or Inf produced during a forward pass.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Training or evaluation data that cannot be used as given.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace plm

#endif  // PLM_ERRORS_H_

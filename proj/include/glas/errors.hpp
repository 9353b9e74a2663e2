/* Copyright 2026 The glas-eval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef GLAS_ERRORS_HPP_
#define GLAS_ERRORS_HPP_

#include <exception>
#include <stdexcept>
#include <string>

namespace glas {

// Bad input: wrong shape, bad values, unreadable or malformed files. The CLI
// maps every ValidationError to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "validation"; }
};

// Input was well formed but a metric or generator could not produce a value.
// The CLI maps these to exit code 3.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "computation"; }
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "shape"; }
};

class ValueError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "value"; }
};

class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "format"; }
};

class NotFoundError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "not_found"; }
};

class IoError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "io"; }
};

class InvalidScoreError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "invalid_score"; }
};

class UndefinedInputError : public ComputationError {
 public:
  using ComputationError::ComputationError;
  const char* kind() const noexcept override { return "undefined_input"; }
};

class PlacementError : public ComputationError {
 public:
  using ComputationError::ComputationError;
  const char* kind() const noexcept override { return "placement"; }
};

// Rethrows the in-flight exception `error` with `context` prepended to its
// message, keeping the concrete error type so exit-code mapping survives.
[[noreturn]] inline void rethrow_with_context(std::exception_ptr error, const std::string& context) {
  try {
    std::rethrow_exception(error);
  } catch (const ShapeError& e) {
    throw ShapeError(context + e.what());
  } catch (const ValueError& e) {
    throw ValueError(context + e.what());
  } catch (const FormatError& e) {
    throw FormatError(context + e.what());
  } catch (const NotFoundError& e) {
    throw NotFoundError(context + e.what());
  } catch (const IoError& e) {
    throw IoError(context + e.what());
  } catch (const InvalidScoreError& e) {
    throw InvalidScoreError(context + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(context + e.what());
  } catch (const UndefinedInputError& e) {
    throw UndefinedInputError(context + e.what());
  } catch (const PlacementError& e) {
    throw PlacementError(context + e.what());
  } catch (const ComputationError& e) {
    throw ComputationError(context + e.what());
  } catch (const std::exception& e) {
    throw ComputationError(context + e.what());
  }
}

}  // namespace glas

#endif  // GLAS_ERRORS_HPP_

/* Copyright 2026 The advseg Authors. All Rights Reserved.

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

#ifndef ADVSEG_ERROR_H_
#define ADVSEG_ERROR_H_

#include <stdexcept>
#include <string>

namespace advseg {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes disagree with an operation's contract.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A configuration value violates its invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied argument is out of range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Backward was asked for something the tape cannot provide.
class TapeError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Dataset, image or weight-file problems. Maps to CLI exit code 4.
class DataError : public Error {
 public:
  using Error::Error;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class VersionMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

class ConfigMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class UnpairedFileError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace advseg

#endif  // ADVSEG_ERROR_H_

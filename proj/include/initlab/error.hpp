// Copyright 2026 The initlab Authors
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

#ifndef INITLAB_ERROR_HPP
#define INITLAB_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace initlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on a scalar argument was violated (empty interval,
/// negative sigma, fractions that do not sum to at most one, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class UnsupportedLayer : public Error {
 public:
  using Error::Error;
};

/// A backward pass was handed a cache that was not produced by a forward
/// pass of the same network.
class StaleCache : public Error {
 public:
  using Error::Error;
};

class Diverged : public Error {
 public:
  Diverged(std::size_t epoch, const std::string& what)
      : Error(what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// Dataset, config or file-format problems. The message names the offending
/// file, class or key.
class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace initlab

#endif  // INITLAB_ERROR_HPP

// antispoof/common.h

// Copyright 2026  The antispoof authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ANTISPOOF_COMMON_H_
#define ANTISPOOF_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace antispoof {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seeded random source. Draws are built from raw mt19937_64 bits so a given
/// seed produces the same sequence with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  /// Standard normal (Box-Muller, one value per call).
  double Normal();
  /// Uniform integer in [0, n).
  std::size_t Index(std::size_t n);
  std::uint64_t Bits() { return engine_(); }

  template <typename Container>
  void Shuffle(Container &c) {
    for (std::size_t i = c.size(); i > 1; --i) {
      std::size_t j = Index(i);
      std::swap(c[i - 1], c[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Streams one line to stderr when it goes out of scope.
class LogLine {
 public:
  LogLine() = default;
  LogLine(const LogLine &) = delete;
  LogLine &operator=(const LogLine &) = delete;
  ~LogLine();

  template <typename T>
  LogLine &operator<<(const T &v) {
    buf_ << v;
    return *this;
  }

 private:
  std::ostringstream buf_;
};

/// Global switch for LogLine output (tests silence it).
void SetLoggingEnabled(bool enabled);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work items are
/// independent; callers store results by index so output order never
/// depends on scheduling. The first exception thrown is rethrown.
void ParallelFor(std::size_t n, int jobs,
                 const std::function<void(std::size_t)> &fn);

}  // namespace antispoof

#endif  // ANTISPOOF_COMMON_H_

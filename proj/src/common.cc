// antispoof/common.cc

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

#include "antispoof/common.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

namespace antispoof {

namespace {
std::atomic<bool> g_logging_enabled{true};
std::mutex g_log_mutex;
}  // namespace

double Rng::Normal() {
  // u1 in (0, 1] keeps the log finite.
  double u1 = 1.0 - Uniform();
  double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::Index(std::size_t n) {
  if (n <= 1) return 0;
  // Rejection sampling avoids modulo bias.
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return static_cast<std::size_t>(r % n);
}

LogLine::~LogLine() {
  if (!g_logging_enabled.load()) return;
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::cerr << "LOG: " << buf_.str() << '\n';
}

void SetLoggingEnabled(bool enabled) { g_logging_enabled.store(enabled); }

void ParallelFor(std::size_t n, int jobs,
                 const std::function<void(std::size_t)> &fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t num_threads = std::min<std::size_t>(jobs, n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(num_threads);
  for (std::size_t t = 0; t < num_threads; ++t) {
    threads.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto &th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace antispoof

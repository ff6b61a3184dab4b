// Copyright 2026 The Wikimine Authors.
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

#ifndef WIKIMINE_UTIL_H_
#define WIKIMINE_UTIL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace wikimine {

// Malformed or unusable input data. The command line tool exits with 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration, missing inputs or stale upstream artifacts. The
// command line tool exits with 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);

// Parses a full field as a double. Returns false on trailing garbage.
bool ParseDouble(std::string_view text, double *value);
bool ParseInt(std::string_view text, long long *value);

std::vector<std::string_view> Split(std::string_view text, char delim);

// Splits on runs of spaces and tabs, dropping empty fields.
std::vector<std::string_view> SplitWhitespace(std::string_view text);

std::string Join(const std::vector<std::string> &parts, std::string_view sep);

// Strips a trailing '\r' left by CRLF files.
inline std::string_view StripCr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

// Opens a file for reading or writing, throwing DataError on failure.
std::ifstream OpenForRead(const std::filesystem::path &path);
std::ofstream OpenForWrite(const std::filesystem::path &path);

// Hex-encoded SHA-256.
std::string Sha256Hex(std::string_view data);
std::string Sha256File(const std::filesystem::path &path);

// Resolves a --threads value: 0 means hardware concurrency.
int ResolveThreads(int threads);

// Calls fn(i) for every i in [0, n) using up to `threads` workers. Work items
// are claimed dynamically, so fn must only write to per-index state; callers
// merge results in index order to stay independent of scheduling.
template <typename Fn>
void ParallelFor(std::size_t n, int threads, Fn &&fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          if (failed.load()) return;
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            fn(i);
          } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
            return;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace wikimine

#endif  // WIKIMINE_UTIL_H_

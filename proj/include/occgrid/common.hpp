// Copyright 2026 The occgrid Authors
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

#ifndef OCCGRID__COMMON_HPP_
#define OCCGRID__COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace occgrid
{

/// Failure categories. The CLI maps each to a distinct exit status.
enum class ErrorCategory : int {
  kConfig = 1,      // invalid parameters or mismatched inputs
  kShape,           // tensor / grid shape mismatch
  kIo,              // missing input, unwritable destination
  kMagic,           // file does not start with the expected magic
  kVersion,         // unknown format version
  kLength,          // truncated file
  kChecksum,        // payload corruption
  kFormat,          // any other malformed content
  kDegenerate,      // degenerate geometry (e.g. collinear hull input)
  kTraining,        // NaN loss, empty split
  kUndefined,       // value undefined for the input (e.g. loss over zero pixels)
};

const char * category_name(ErrorCategory c);

class Error : public std::runtime_error
{
public:
  Error(ErrorCategory category, const std::string & what)
  : std::runtime_error(what), category_(category)
  {
  }
  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

struct Point2
{
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2 &, const Point2 &) = default;
};

struct Point3
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Point3 &, const Point3 &) = default;
};

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }

/// Seeded random stream. The engine output is fixed by the standard; the
/// distributions are implemented here so results do not depend on the
/// standard library vendor.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream derived from a base seed and a stream id.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  int poisson(double lambda);
  bool bernoulli(double p) { return uniform() < p; }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace occgrid

#endif  // OCCGRID__COMMON_HPP_

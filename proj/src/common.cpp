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

#include "occgrid/common.hpp"

namespace occgrid
{

const char * category_name(ErrorCategory c)
{
  switch (c) {
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kShape: return "shape";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kMagic: return "magic";
    case ErrorCategory::kVersion: return "version";
    case ErrorCategory::kLength: return "length";
    case ErrorCategory::kChecksum: return "checksum";
    case ErrorCategory::kFormat: return "format";
    case ErrorCategory::kDegenerate: return "degenerate";
    case ErrorCategory::kTraining: return "training";
    case ErrorCategory::kUndefined: return "undefined";
  }
  return "unknown";
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream)
{
  return Rng(mix_seed(seed, stream));
}

std::uint64_t Rng::index(std::uint64_t n)
{
  if (n == 0) {
    throw Error(ErrorCategory::kConfig, "Rng::index: empty range");
  }
  // rejection sampling removes modulo bias
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

double Rng::normal()
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  spare_ = mag * std::sin(2.0 * kPi * u2);
  has_spare_ = true;
  return mag * std::cos(2.0 * kPi * u2);
}

int Rng::poisson(double lambda)
{
  if (lambda <= 0.0) {
    return 0;
  }
  // Knuth; rates used here are small
  const double limit = std::exp(-lambda);
  int k = 0;
  double p = uniform();
  while (p > limit) {
    ++k;
    p *= uniform();
  }
  return k;
}

}  // namespace occgrid

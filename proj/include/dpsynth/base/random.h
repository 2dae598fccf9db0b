// Copyright 2026 The DPSynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPSYNTH_BASE_RANDOM_H_
#define DPSYNTH_BASE_RANDOM_H_

#include <cstdint>
#include <random>
#include <vector>

namespace dpsynth {

// All randomness in the library flows through this engine so that a fixed
// seed reproduces every fit, sample and report bit for bit.
using Rng = std::mt19937_64;

// Derives an independent stream seed from a parent seed and a stream tag
// (splitmix64 finalizer over the pair).
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

inline Rng MakeRng(uint64_t seed, uint64_t stream = 0) {
  return Rng(DeriveSeed(seed, stream));
}

double UniformDouble(Rng& rng);
double StandardNormal(Rng& rng);
int UniformInt(Rng& rng, int lo, int hi_inclusive);

// Draws an index with probability proportional to `weights`.
int SampleDiscrete(Rng& rng, const std::vector<double>& weights);

// Fisher-Yates shuffle driven by `rng`; identical across standard libraries.
template <typename T>
void Shuffle(std::vector<T>& values, Rng& rng) {
  for (size_t i = values.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng() % i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace dpsynth

#endif  // DPSYNTH_BASE_RANDOM_H_

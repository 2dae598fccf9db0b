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

#ifndef DPSYNTH_SYNTH_NEURAL_UTIL_H_
#define DPSYNTH_SYNTH_NEURAL_UTIL_H_

#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dpsynth/base/random.h"
#include "dpsynth/nn/network.h"
#include "dpsynth/transforms/data_transformer.h"
#include "json.hpp"

namespace dpsynth {

// Output heads matching an encoding: softmax blocks for one-hot spans and
// unit scalars for offsets.
std::vector<nn::HeadSpec> HeadsForLayout(const EncodingLayout& layout);

Eigen::MatrixXd GaussianNoise(int rows, int cols, Rng& rng);

std::vector<nn::LayerSpec> HiddenLayers(const std::vector<int>& widths,
                                        nn::Activation activation,
                                        bool residual);

// Allocates and initializes a fresh parameter vector for `net`.
nn::ParamVector InitializeParams(const nn::Mlp& net,
                                 const nn::ParamLayout& layout, Rng& rng);

// Row-aligned chunks [begin, end) of at most `chunk` rows covering [0, n).
std::vector<std::pair<int, int>> Chunks(int n, int chunk);

nlohmann::json IntVectorToJson(const std::vector<int>& v);

}  // namespace dpsynth

#endif  // DPSYNTH_SYNTH_NEURAL_UTIL_H_

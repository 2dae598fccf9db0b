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

#include "dpsynth/synth/neural_util.h"

#include <algorithm>

namespace dpsynth {

std::vector<nn::HeadSpec> HeadsForLayout(const EncodingLayout& layout) {
  std::vector<nn::HeadSpec> heads;
  heads.reserve(layout.spans.size());
  for (const EncodedSpan& span : layout.spans) {
    heads.push_back({span.kind == SpanKind::kOneHot
                         ? nn::HeadSpec::Kind::kSoftmaxBlock
                         : nn::HeadSpec::Kind::kUnitScalar,
                     span.start, span.width});
  }
  return heads;
}

Eigen::MatrixXd GaussianNoise(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out(r, c) = StandardNormal(rng);
  }
  return out;
}

std::vector<nn::LayerSpec> HiddenLayers(const std::vector<int>& widths,
                                        nn::Activation activation,
                                        bool residual) {
  std::vector<nn::LayerSpec> layers;
  for (int w : widths) layers.push_back({w, activation, residual});
  return layers;
}

nn::ParamVector InitializeParams(const nn::Mlp& net,
                                 const nn::ParamLayout& layout, Rng& rng) {
  nn::ParamVector params{layout, Eigen::VectorXd::Zero(layout.size())};
  net.Initialize(params.values, params.layout, rng);
  return params;
}

std::vector<std::pair<int, int>> Chunks(int n, int chunk) {
  std::vector<std::pair<int, int>> out;
  for (int begin = 0; begin < n; begin += chunk) {
    out.emplace_back(begin, std::min(n, begin + chunk));
  }
  return out;
}

nlohmann::json IntVectorToJson(const std::vector<int>& v) { return v; }

}  // namespace dpsynth

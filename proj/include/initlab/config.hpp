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

#ifndef INITLAB_CONFIG_HPP
#define INITLAB_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "initlab/experiment.hpp"

namespace initlab {

/// Everything `initlab compare` needs, read from one INI-style file:
///
///   [model]       name, layers
///   [dataset]     kind = synth | folder, classes, per_class, image_size,
///                 seed, root, split = train,val,test
///   [experiment]  schemes, seeds, output, jobs, constant_value, random_range
///   [train]       epochs, batch_size, batches_per_epoch, learning_rate,
///                 optimizer = adam | sgd, beta1, beta2, epsilon, momentum
///
/// Unknown sections or keys are rejected. A relative dataset root is taken
/// relative to the config file's directory.
struct ExperimentConfig {
  ModelConfig model;
  DatasetSpec dataset = SynthDatasetSpec{};
  std::vector<InitScheme> schemes;
  std::vector<std::uint64_t> seeds;
  TrainConfig train;
  std::filesystem::path output_dir = "results";
  std::size_t jobs = 1;
};

/// Throws ConfigError naming the offending key or line.
ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Value of INITLAB_SEED, if set. Throws ConfigError if it is not an integer.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace initlab

#endif  // INITLAB_CONFIG_HPP

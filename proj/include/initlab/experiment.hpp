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

#ifndef INITLAB_EXPERIMENT_HPP
#define INITLAB_EXPERIMENT_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "initlab/dataset.hpp"
#include "initlab/initializers.hpp"
#include "initlab/nn.hpp"

namespace initlab {

// ---------------------------------------------------------------------------
// Datasets

struct SplitFractions {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct DatasetSplits {
  Dataset train;
  Dataset val;
  Dataset test;
};

/// {train, val, test} row counts. val and test are floor(n * fraction);
/// whatever is left goes to train. Throws InvalidArgument if a fraction is
/// negative or they sum to more than 1.
std::array<std::size_t, 3> split_counts(std::size_t n, const SplitFractions& f);

/// Seeded shuffle, then partition by split_counts. Rows keep their original
/// relative order inside each split. Every split must end up non-empty.
DatasetSplits split_dataset(const Dataset& data, const SplitFractions& f,
                            std::uint64_t seed);

/// Decodes one image file (binary PGM/PPM with maxval <= 255, or an ITNS
/// dump of shape (H, W) or (C, H, W)) to (C, image_size, image_size).
/// Netpbm values are scaled to [0, 1]; ITNS values are used as stored.
/// Non-square images are centre-cropped, then resampled nearest-neighbour.
Tensor load_image(const std::filesystem::path& path, std::size_t image_size);

/// root/<class_name>/<files>. Classes are the subdirectories in
/// lexicographic order; files within a class are read in lexicographic order.
DatasetSplits load_folder_dataset(const std::filesystem::path& root,
                                  std::size_t image_size,
                                  const SplitFractions& fractions,
                                  std::uint64_t seed);

/// Class-conditional oriented sinusoid textures, one channel, values in
/// [0, 1]. Class k has orientation k*pi/classes; per-image phase jitter and
/// pixel noise keep the raw-pixel problem well short of trivial.
Dataset synth_dataset(std::size_t classes, std::size_t per_class,
                      std::size_t image_size, std::uint64_t seed);

// Stream ids for dataset construction.
inline constexpr std::uint64_t kSynthStream = 0x53594e5448000000ull;
inline constexpr std::uint64_t kSplitStream = 0x53504c4954000000ull;

// ---------------------------------------------------------------------------
// Metrics

struct RunMetrics {
  double precision = 0.0;  // macro average
  double recall = 0.0;     // macro average
  double f1 = 0.0;         // harmonic mean of macro precision and recall
  double validation_accuracy = 0.0;       // final epoch
  double best_validation_accuracy = 0.0;  // best epoch
  /// confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Classes with no predicted positives contribute precision 0.
/// best_validation_accuracy is set equal to validation_accuracy.
RunMetrics compute_metrics(std::span<const int> predictions,
                           std::span<const int> labels, std::size_t n_classes);

// ---------------------------------------------------------------------------
// Comparison protocol

/// Network description without input extents, e.g.
/// "conv(8,3,1,1) relu maxpool(2,2) flatten dense(4)".
///   conv(out_channels, kernel[, stride[, padding]])
///   dense(out)  maxpool(kernel[, stride])  relu  tanh  flatten
struct ModelConfig {
  std::string name = "model";
  std::string layers;
};

/// Parses ModelConfig::layers and infers input extents from `input_shape`.
/// Throws ConfigError on syntax errors, ShapeMismatch on bad wiring.
Network build_network(const ModelConfig& model, const Shape& input_shape);

struct SynthDatasetSpec {
  std::size_t classes = 4;
  std::size_t per_class = 150;
  std::size_t image_size = 16;
  std::uint64_t seed = 3;
  SplitFractions fractions;
};

struct FolderDatasetSpec {
  std::filesystem::path root;
  std::size_t image_size = 32;
  std::uint64_t seed = 3;
  SplitFractions fractions;
};

using DatasetSpec = std::variant<SynthDatasetSpec, FolderDatasetSpec>;

DatasetSplits load_dataset(const DatasetSpec& spec);

struct RunRecord {
  std::string scheme;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::size_t diverged_epoch = 0;
  RunMetrics metrics;
  TrainingHistory history;
};

struct SchemeResult {
  std::string scheme;
  std::vector<RunRecord> runs;  // one per seed, in seed-list order
  /// Mean final-epoch validation accuracy over runs that did not diverge;
  /// NaN when every run diverged.
  double average_accuracy = 0.0;
  std::size_t diverged_runs = 0;
};

struct ComparisonResult {
  std::string model;
  std::vector<SchemeResult> schemes;  // in scheme-list order

  bool any_diverged() const;

  /// model,method,P,R,F1,VA,AA. P/R/F1/VA come from the first non-diverged
  /// run of each scheme; AA is the mean over seeds.
  std::string to_csv() const;
  std::string to_json() const;
  /// Aligned ASCII version of the CSV for terminals.
  std::string to_table() const;
};

/// For each (scheme, seed): build the network, apply the scheme with that
/// seed, train with train_config.seed = seed, evaluate on the validation
/// split. Every run of a given seed sees the same data and batch order.
/// Runs execute on up to `jobs` threads; results do not depend on `jobs`.
ComparisonResult run_comparison(const ModelConfig& model,
                                const DatasetSplits& data,
                                const std::vector<InitScheme>& schemes,
                                const std::vector<std::uint64_t>& seeds,
                                const TrainConfig& train_config,
                                std::size_t jobs = 1);

ComparisonResult run_comparison(const ModelConfig& model,
                                const DatasetSpec& dataset,
                                const std::vector<InitScheme>& schemes,
                                const std::vector<std::uint64_t>& seeds,
                                const TrainConfig& train_config,
                                std::size_t jobs = 1);

}  // namespace initlab

#endif  // INITLAB_EXPERIMENT_HPP

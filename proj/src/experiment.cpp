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

#include "initlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>

#include "json.hpp"

#include "initlab/error.hpp"
#include "initlab/rng.hpp"
#include "initlab/tensor_io.hpp"
#include "initlab/text.hpp"

namespace initlab {

namespace fs = std::filesystem;

namespace {

// --- image decoding ---------------------------------------------------------

Tensor decode_netpbm(const fs::path& path, std::istream& in, char kind) {
  const std::size_t channels = kind == '5' ? 1 : 3;
  auto next_token = [&]() -> std::size_t {
    std::string token;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string comment;
        std::getline(in, comment);
        if (!token.empty()) break;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!token.empty()) break;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw IoError(path.string() + ": malformed netpbm header");
      }
      token += c;
    }
    if (token.empty() || token.size() > 9) {
      throw IoError(path.string() + ": malformed netpbm header");
    }
    return static_cast<std::size_t>(std::stoul(token));
  };
  const std::size_t width = next_token();
  const std::size_t height = next_token();
  const std::size_t maxval = next_token();
  if (width == 0 || height == 0 || maxval == 0 || maxval > 255) {
    throw IoError(path.string() + ": unsupported netpbm (need 8-bit, non-empty)");
  }
  std::vector<unsigned char> raw(width * height * channels);
  if (!in.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(raw.size()))) {
    throw IoError(path.string() + ": truncated netpbm payload");
  }
  Tensor out(Shape{channels, height, width});
  auto D = out.data();
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t p = 0; p < width * height; ++p) {
    for (std::size_t c = 0; c < channels; ++c) {
      D[c * width * height + p] = std::min(1.0, raw[p * channels + c] * scale);
    }
  }
  return out;
}

Tensor crop_and_resize(const Tensor& img, std::size_t size) {
  const std::size_t c = img.shape()[0], h = img.shape()[1], w = img.shape()[2];
  const std::size_t side = std::min(h, w);
  const std::size_t y0 = (h - side) / 2, x0 = (w - side) / 2;
  Tensor out(Shape{c, size, size});
  auto S = img.data();
  auto D = out.data();
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < size; ++y) {
      const std::size_t sy = y0 + (y * side) / size;
      for (std::size_t x = 0; x < size; ++x) {
        const std::size_t sx = x0 + (x * side) / size;
        D[(ch * size + y) * size + x] = S[(ch * h + sy) * w + sx];
      }
    }
  }
  return out;
}

bool is_hidden(const fs::path& p) {
  const auto name = p.filename().string();
  return !name.empty() && name[0] == '.';
}

std::vector<fs::path> sorted_entries(const fs::path& dir, bool directories) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (is_hidden(entry.path())) continue;
    if (directories ? entry.is_directory() : entry.is_regular_file()) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dataset stack(std::vector<Tensor>&& images, std::vector<int>&& labels,
              std::vector<std::string> class_names) {
  Dataset data;
  const Shape& sample = images.front().shape();
  std::vector<std::size_t> dims{images.size()};
  dims.insert(dims.end(), sample.dims().begin(), sample.dims().end());
  std::vector<double> flat;
  flat.reserve(images.size() * sample.element_count());
  for (const auto& img : images) {
    flat.insert(flat.end(), img.data().begin(), img.data().end());
  }
  data.images = Tensor(Shape(std::move(dims)), std::move(flat));
  data.labels = std::move(labels);
  data.class_names = std::move(class_names);
  return data;
}

// --- model description ------------------------------------------------------

struct LayerToken {
  std::string name;
  std::vector<std::size_t> args;
};

std::vector<LayerToken> tokenize_layers(const std::string& text) {
  std::vector<LayerToken> tokens;
  std::size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw ConfigError("model layers: " + why + " at offset " + std::to_string(i) +
                      " in '" + text + "'");
  };
  while (i < text.size()) {
    const auto ch = static_cast<unsigned char>(text[i]);
    if (std::isspace(ch) || text[i] == ',' || text[i] == ';') {
      ++i;
      continue;
    }
    LayerToken tok;
    while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                               text[i] == '_' || text[i] == '-')) {
      tok.name += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
      ++i;
    }
    if (tok.name.empty()) fail("unexpected character '" + std::string(1, text[i]) + "'");
    while (i < text.size() && text[i] == ' ') ++i;
    if (i < text.size() && text[i] == '(') {
      const auto close = text.find(')', i);
      if (close == std::string::npos) fail("unclosed '('");
      for (const auto& part : split(std::string_view(text).substr(i + 1, close - i - 1), ',')) {
        if (part.empty() || !std::isdigit(static_cast<unsigned char>(part[0]))) {
          fail("bad argument '" + part + "'");
        }
        std::size_t value = 0;
        try {
          std::size_t used = 0;
          value = std::stoul(part, &used);
          if (used != part.size()) fail("non-integer argument '" + part + "'");
        } catch (const std::logic_error&) {
          fail("non-integer argument '" + part + "'");
        }
        tok.args.push_back(value);
      }
      i = close + 1;
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

// --- comparison -------------------------------------------------------------

struct Job {
  std::size_t scheme_index;
  std::size_t seed_index;
};

RunRecord run_one(const ModelConfig& model, const DatasetSplits& data,
                  const InitScheme& scheme, std::uint64_t seed,
                  TrainConfig config) {
  RunRecord record;
  record.scheme = std::string(scheme.name());
  record.seed = seed;
  Network network = apply_initializer(
      build_network(model, data.train.sample_shape()), scheme, seed);
  config.seed = seed;
  try {
    record.history = train(network, data.train, data.val, config);
  } catch (const Diverged& e) {
    record.diverged = true;
    record.diverged_epoch = e.epoch();
    return record;
  }
  record.metrics = compute_metrics(predict_classes(network, data.val),
                                   data.val.labels, data.val.class_count());
  record.metrics.validation_accuracy = record.history.final_val_acc();
  record.metrics.best_validation_accuracy = record.history.best_val_acc();
  return record;
}

const RunRecord* reported_run(const SchemeResult& s) {
  for (const auto& r : s.runs) {
    if (!r.diverged) return &r;
  }
  return nullptr;
}

nlohmann::ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

// --- splits -----------------------------------------------------------------

std::array<std::size_t, 3> split_counts(std::size_t n, const SplitFractions& f) {
  if (!(f.train >= 0.0 && f.val >= 0.0 && f.test >= 0.0)) {
    throw InvalidArgument("split fractions must be >= 0");
  }
  if (f.train + f.val + f.test > 1.0 + 1e-9) {
    throw InvalidArgument("split fractions sum to " +
                          format_number(f.train + f.val + f.test) + " > 1");
  }
  // The epsilon keeps e.g. 600 * (1/6) from flooring to 99.
  auto part = [n](double frac) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * frac + 1e-9));
  };
  const std::size_t val = part(f.val);
  const std::size_t test = part(f.test);
  return {n - val - test, val, test};
}

DatasetSplits split_dataset(const Dataset& data, const SplitFractions& f,
                            std::uint64_t seed) {
  const std::size_t n = data.size();
  const auto [n_train, n_val, n_test] = split_counts(n, f);
  RngStream rng(seed, kSplitStream);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i-- > 1;) std::swap(order[i], order[rng.next_below(i + 1)]);

  auto take = [&](std::size_t begin, std::size_t count, Split tag) {
    if (count == 0) {
      throw InvalidArgument(split_name(tag) + " split would be empty (" +
                            std::to_string(n) + " rows)");
    }
    std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                  order.begin() + static_cast<std::ptrdiff_t>(begin + count));
    std::sort(rows.begin(), rows.end());
    return data.subset(rows, tag);
  };
  DatasetSplits out;
  out.val = take(0, n_val, Split::kVal);
  out.test = take(n_val, n_test, Split::kTest);
  out.train = take(n_val + n_test, n_train, Split::kTrain);
  return out;
}

// --- loading ----------------------------------------------------------------

Tensor load_image(const fs::path& path, std::size_t image_size) {
  if (image_size == 0) throw InvalidArgument("image_size must be >= 1");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image " + path.string());
  char magic[4] = {};
  in.read(magic, 2);
  Tensor img;
  if (in && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) {
    img = decode_netpbm(path, in, magic[1]);
  } else if (in && magic[0] == 'I' && magic[1] == 'T') {
    img = load_itns(path);
    const auto& s = img.shape();
    if (s.rank() == 2) {
      img = img.reshaped(Shape{1, s[0], s[1]});
    } else if (s.rank() != 3) {
      throw IoError(path.string() + ": ITNS image must be (H, W) or (C, H, W), got " +
                    s.str());
    }
  } else {
    throw IoError("cannot decode image " + path.string() +
                  " (supported: binary PGM/PPM, ITNS)");
  }
  return crop_and_resize(img, image_size);
}

DatasetSplits load_folder_dataset(const fs::path& root, std::size_t image_size,
                                  const SplitFractions& fractions,
                                  std::uint64_t seed) {
  split_counts(1, fractions);  // validate before touching the disk
  if (!fs::is_directory(root)) {
    throw IoError("dataset root " + root.string() + " is not a directory");
  }
  const auto class_dirs = sorted_entries(root, true);
  if (class_dirs.empty()) {
    throw IoError("dataset root " + root.string() + " has no class directories");
  }
  std::vector<std::string> class_names;
  std::vector<Tensor> images;
  std::vector<int> labels;
  for (std::size_t k = 0; k < class_dirs.size(); ++k) {
    const std::string name = class_dirs[k].filename().string();
    class_names.push_back(name);
    const auto files = sorted_entries(class_dirs[k], false);
    if (files.empty()) throw IoError("class '" + name + "' has no images");
    for (const auto& file : files) {
      Tensor img = load_image(file, image_size);
      if (!images.empty() && img.shape() != images.front().shape()) {
        throw IoError(file.string() + ": shape " + img.shape().str() +
                      " differs from " + images.front().shape().str());
      }
      images.push_back(std::move(img));
      labels.push_back(static_cast<int>(k));
    }
  }
  Dataset all = stack(std::move(images), std::move(labels), std::move(class_names));
  return split_dataset(all, fractions, seed);
}

Dataset synth_dataset(std::size_t classes, std::size_t per_class,
                      std::size_t image_size, std::uint64_t seed) {
  if (classes < 2) throw InvalidArgument("synth_dataset: need >= 2 classes");
  if (per_class == 0 || image_size == 0) {
    throw InvalidArgument("synth_dataset: per_class and image_size must be >= 1");
  }
  // Tuned so a nearest-centroid classifier on raw pixels lands well between
  // chance and perfect while a small CNN separates the classes.
  constexpr double kCycles = 3.0;
  constexpr double kAmplitude = 0.3;
  constexpr double kPhaseJitter = 0.7 * std::numbers::pi;
  constexpr double kAngleJitter = 0.1;
  constexpr double kNoise = 0.15;

  RngStream rng(seed, kSynthStream);
  const std::size_t s = image_size;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<Tensor> images;
  std::vector<int> labels;
  images.reserve(classes * per_class);
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t k = 0; k < classes; ++k) {
      const double angle = std::numbers::pi * static_cast<double>(k) /
                               static_cast<double>(classes) +
                           rng.next_uniform(-kAngleJitter, kAngleJitter);
      const double phase = rng.next_uniform(-kPhaseJitter, kPhaseJitter);
      const double cx = std::cos(angle), cy = std::sin(angle);
      Tensor img(Shape{1, s, s});
      auto D = img.data();
      for (std::size_t y = 0; y < s; ++y) {
        for (std::size_t x = 0; x < s; ++x) {
          const double u = (static_cast<double>(x) * cx + static_cast<double>(y) * cy) /
                           static_cast<double>(s);
          const double v = 0.5 + kAmplitude * std::sin(two_pi * kCycles * u + phase) +
                           kNoise * rng.next_standard_normal();
          D[y * s + x] = std::clamp(v, 0.0, 1.0);
        }
      }
      images.push_back(std::move(img));
      labels.push_back(static_cast<int>(k));
    }
  }
  std::vector<std::string> names;
  for (std::size_t k = 0; k < classes; ++k) names.push_back("class" + std::to_string(k));
  return stack(std::move(images), std::move(labels), std::move(names));
}

// --- metrics ----------------------------------------------------------------

RunMetrics compute_metrics(std::span<const int> predictions,
                           std::span<const int> labels, std::size_t n_classes) {
  if (predictions.size() != labels.size()) {
    throw InvalidArgument("compute_metrics: " + std::to_string(predictions.size()) +
                          " predictions vs " + std::to_string(labels.size()) +
                          " labels");
  }
  if (n_classes == 0) throw InvalidArgument("compute_metrics: no classes");
  RunMetrics m;
  m.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
  auto check = [n_classes](int v, const char* what) {
    if (v < 0 || static_cast<std::size_t>(v) >= n_classes) {
      throw InvalidArgument(std::string("compute_metrics: ") + what + " " +
                            std::to_string(v) + " out of range");
    }
    return static_cast<std::size_t>(v);
  };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++m.confusion[check(labels[i], "label")][check(predictions[i], "prediction")];
  }
  double p_sum = 0.0, r_sum = 0.0;
  std::size_t trace = 0;
  for (std::size_t k = 0; k < n_classes; ++k) {
    std::size_t predicted = 0, support = 0;
    for (std::size_t j = 0; j < n_classes; ++j) {
      predicted += m.confusion[j][k];
      support += m.confusion[k][j];
    }
    const auto tp = m.confusion[k][k];
    trace += tp;
    if (predicted) p_sum += static_cast<double>(tp) / static_cast<double>(predicted);
    if (support) r_sum += static_cast<double>(tp) / static_cast<double>(support);
  }
  const auto k = static_cast<double>(n_classes);
  m.precision = p_sum / k;
  m.recall = r_sum / k;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.validation_accuracy =
      labels.empty() ? 0.0
                     : static_cast<double>(trace) / static_cast<double>(labels.size());
  m.best_validation_accuracy = m.validation_accuracy;
  return m;
}

// --- models -----------------------------------------------------------------

Network build_network(const ModelConfig& model, const Shape& input_shape) {
  std::vector<LayerSpec> layers;
  Shape current = input_shape;
  const auto tokens = tokenize_layers(model.layers);
  if (tokens.empty()) throw ConfigError("model '" + model.name + "' has no layers");
  for (const auto& tok : tokens) {
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (tok.args.size() < lo || tok.args.size() > hi) {
        throw ConfigError("model layers: " + tok.name + " takes " +
                          std::to_string(lo) + ".." + std::to_string(hi) +
                          " arguments, got " + std::to_string(tok.args.size()));
      }
    };
    auto arg = [&](std::size_t i, std::size_t fallback) {
      return i < tok.args.size() ? tok.args[i] : fallback;
    };
    LayerSpec layer;
    if (tok.name == "dense" || tok.name == "linear") {
      need(1, 1);
      if (current.rank() != 1) {
        throw ShapeMismatch("model layers: dense needs a flat input, got " +
                            current.str() + "; insert flatten");
      }
      layer = Dense{current[0], tok.args[0]};
    } else if (tok.name == "conv" || tok.name == "conv2d") {
      need(2, 4);
      if (current.rank() != 3) {
        throw ShapeMismatch("model layers: conv needs a (C, H, W) input, got " +
                            current.str());
      }
      layer = Conv2d{current[0], tok.args[0], tok.args[1], tok.args[1], arg(2, 1),
                     arg(3, 0)};
    } else if (tok.name == "maxpool" || tok.name == "pool") {
      need(0, 2);
      const std::size_t k = arg(0, 2);
      layer = MaxPool2d{k, arg(1, k)};
    } else if (tok.name == "relu") {
      need(0, 0);
      layer = ReLU{};
    } else if (tok.name == "tanh") {
      need(0, 0);
      layer = Tanh{};
    } else if (tok.name == "flatten") {
      need(0, 0);
      layer = Flatten{};
    } else {
      throw ConfigError("model layers: unknown layer '" + tok.name + "'");
    }
    layers.push_back(layer);
    // Building a throwaway prefix network reuses its shape checks.
    current = Network(input_shape, layers).output_shape();
  }
  return Network(input_shape, std::move(layers));
}

DatasetSplits load_dataset(const DatasetSpec& spec) {
  if (const auto* synth = std::get_if<SynthDatasetSpec>(&spec)) {
    return split_dataset(synth_dataset(synth->classes, synth->per_class,
                                       synth->image_size, synth->seed),
                         synth->fractions, synth->seed);
  }
  const auto& folder = std::get<FolderDatasetSpec>(spec);
  return load_folder_dataset(folder.root, folder.image_size, folder.fractions,
                             folder.seed);
}

// --- comparison -------------------------------------------------------------

bool ComparisonResult::any_diverged() const {
  for (const auto& s : schemes) {
    if (s.diverged_runs) return true;
  }
  return false;
}

ComparisonResult run_comparison(const ModelConfig& model,
                                const DatasetSplits& data,
                                const std::vector<InitScheme>& schemes,
                                const std::vector<std::uint64_t>& seeds,
                                const TrainConfig& train_config,
                                std::size_t jobs) {
  if (schemes.empty()) throw InvalidArgument("run_comparison: no schemes");
  if (seeds.empty()) throw InvalidArgument("run_comparison: no seeds");
  train_config.validate();
  // Fail on a bad model before spawning workers.
  build_network(model, data.train.sample_shape());

  std::vector<Job> queue;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    for (std::size_t k = 0; k < seeds.size(); ++k) queue.push_back({s, k});
  }
  std::vector<RunRecord> records(queue.size());
  std::vector<std::exception_ptr> errors(queue.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < queue.size();) {
      try {
        records[j] = run_one(model, data, schemes[queue[j].scheme_index],
                             seeds[queue[j].seed_index], train_config);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, queue.size());
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ComparisonResult result;
  result.model = model.name;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    SchemeResult sr;
    sr.scheme = std::string(schemes[s].name());
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      RunRecord& r = records[s * seeds.size() + k];
      if (r.diverged) {
        ++sr.diverged_runs;
      } else {
        sum += r.metrics.validation_accuracy;
        ++counted;
      }
      sr.runs.push_back(std::move(r));
    }
    sr.average_accuracy = counted ? sum / static_cast<double>(counted)
                                  : std::numeric_limits<double>::quiet_NaN();
    result.schemes.push_back(std::move(sr));
  }
  return result;
}

ComparisonResult run_comparison(const ModelConfig& model,
                                const DatasetSpec& dataset,
                                const std::vector<InitScheme>& schemes,
                                const std::vector<std::uint64_t>& seeds,
                                const TrainConfig& train_config,
                                std::size_t jobs) {
  return run_comparison(model, load_dataset(dataset), schemes, seeds,
                        train_config, jobs);
}

std::string ComparisonResult::to_csv() const {
  std::string out = "model,method,P,R,F1,VA,AA\n";
  for (const auto& s : schemes) {
    const RunRecord* r = reported_run(s);
    auto cell = [&](double RunMetrics::*field) {
      return r ? format_number(r->metrics.*field) : std::string("nan");
    };
    out += model + ',' + s.scheme + ',' + cell(&RunMetrics::precision) + ',' +
           cell(&RunMetrics::recall) + ',' + cell(&RunMetrics::f1) + ',' +
           cell(&RunMetrics::validation_accuracy) + ',' +
           format_number(s.average_accuracy) + '\n';
  }
  return out;
}

std::string ComparisonResult::to_table() const {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Model", "Method", "P", "R", "F1", "VA", "AA"});
  for (const auto& s : schemes) {
    const RunRecord* r = reported_run(s);
    auto cell = [&](double RunMetrics::*field) {
      return r ? format_fixed(r->metrics.*field, 4) : std::string("n/a");
    };
    rows.push_back({model, s.scheme, cell(&RunMetrics::precision),
                    cell(&RunMetrics::recall), cell(&RunMetrics::f1),
                    cell(&RunMetrics::validation_accuracy),
                    format_fixed(s.average_accuracy, 4)});
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      const auto& cell = rows[i][c];
      if (c) out += "  ";
      // Text columns left-aligned, numbers right-aligned.
      if (c < 2) {
        out += cell + std::string(width[c] - cell.size(), ' ');
      } else {
        out += std::string(width[c] - cell.size(), ' ') + cell;
      }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
    }
  }
  return out;
}

std::string ComparisonResult::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["schemes"] = nlohmann::ordered_json::array();
  for (const auto& s : schemes) {
    nlohmann::ordered_json js;
    js["scheme"] = s.scheme;
    js["average_accuracy"] = number_or_null(s.average_accuracy);
    js["diverged_runs"] = s.diverged_runs;
    js["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : s.runs) {
      nlohmann::ordered_json jr;
      jr["seed"] = r.seed;
      jr["diverged"] = r.diverged;
      if (r.diverged) jr["diverged_epoch"] = r.diverged_epoch;
      jr["precision"] = r.metrics.precision;
      jr["recall"] = r.metrics.recall;
      jr["f1"] = r.metrics.f1;
      jr["validation_accuracy"] = r.metrics.validation_accuracy;
      jr["best_validation_accuracy"] = r.metrics.best_validation_accuracy;
      jr["confusion"] = r.metrics.confusion;
      jr["epochs"] = r.history.epochs.size();
      js["runs"].push_back(jr);
    }
    j["schemes"].push_back(js);
  }
  return j.dump(2) + "\n";
}

}  // namespace initlab

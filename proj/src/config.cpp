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

#include "initlab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "initlab/error.hpp"
#include "initlab/text.hpp"

namespace initlab {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model", {"name", "layers"}},
      {"dataset",
       {"kind", "classes", "per_class", "image_size", "seed", "root", "split"}},
      {"experiment",
       {"schemes", "seeds", "output", "jobs", "constant_value", "random_range"}},
      {"train",
       {"epochs", "batch_size", "batches_per_epoch", "learning_rate",
        "optimizer", "beta1", "beta2", "epsilon", "momentum"}},
  };
  return keys;
}

std::uint64_t parse_u64(const std::string& key, std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" +
                      std::string(text) + "'");
  }
  return value;
}

double parse_double(const std::string& key, std::string_view text) {
  const std::string s(trim(text));
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(value)) {
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  }
  return value;
}

class Section {
 public:
  Section(std::string name, const pt::ptree* tree)
      : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> get(const std::string& key) const {
    if (!tree_) return std::nullopt;
    if (auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'))) {
      return std::string(trim(*v));
    }
    return std::nullopt;
  }
  std::string qualified(const std::string& key) const { return name_ + "." + key; }

  template <typename T, typename Parse>
  void read(const std::string& key, T& target, Parse parse) const {
    if (auto v = get(key)) target = parse(qualified(key), *v);
  }
  void read_size(const std::string& key, std::size_t& target) const {
    read(key, target, [](const std::string& k, const std::string& v) {
      return static_cast<std::size_t>(parse_u64(k, v));
    });
  }
  void read_u64(const std::string& key, std::uint64_t& target) const {
    read(key, target, [](const std::string& k, const std::string& v) {
      return parse_u64(k, v);
    });
  }
  void read_double(const std::string& key, double& target) const {
    read(key, target, [](const std::string& k, const std::string& v) {
      return parse_double(k, v);
    });
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
};

SplitFractions parse_split(const std::string& key, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) {
    throw ConfigError(key + ": expected three comma-separated fractions");
  }
  SplitFractions f{parse_double(key, parts[0]), parse_double(key, parts[1]),
                   parse_double(key, parts[2])};
  try {
    split_counts(1, f);
  } catch (const InvalidArgument& e) {
    throw ConfigError(key + ": " + e.what());
  }
  return f;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (body.empty()) throw ConfigError("unknown key '" + section + "' outside a section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) {
        throw ConfigError("unknown key '" + section + "." + key + "'");
      }
    }
  }
  auto section = [&](const std::string& name) {
    return Section(name, tree.get_child_optional(pt::ptree::path_type(name, '\0'))
                             .get_ptr());
  };

  ExperimentConfig cfg;

  const Section model = section("model");
  if (auto v = model.get("name")) cfg.model.name = *v;
  if (auto v = model.get("layers")) {
    cfg.model.layers = *v;
  } else {
    throw ConfigError("missing key 'model.layers'");
  }

  const Section data = section("dataset");
  const std::string kind = data.get("kind").value_or("synth");
  SplitFractions fractions;
  if (auto v = data.get("split")) fractions = parse_split(data.qualified("split"), *v);
  if (kind == "synth") {
    SynthDatasetSpec spec;
    spec.fractions = fractions;
    data.read_size("classes", spec.classes);
    data.read_size("per_class", spec.per_class);
    data.read_size("image_size", spec.image_size);
    data.read_u64("seed", spec.seed);
    if (data.get("root")) throw ConfigError("dataset.root is only valid for kind = folder");
    cfg.dataset = spec;
  } else if (kind == "folder") {
    FolderDatasetSpec spec;
    spec.fractions = fractions;
    data.read_size("image_size", spec.image_size);
    data.read_u64("seed", spec.seed);
    if (data.get("classes") || data.get("per_class")) {
      throw ConfigError("dataset.classes/per_class are only valid for kind = synth");
    }
    const auto root = data.get("root");
    if (!root) throw ConfigError("missing key 'dataset.root'");
    spec.root = std::filesystem::path(*root);
    if (spec.root.is_relative() && !base_dir.empty()) spec.root = base_dir / spec.root;
    cfg.dataset = spec;
  } else {
    throw ConfigError("dataset.kind: expected synth or folder, got '" + kind + "'");
  }

  const Section exp = section("experiment");
  double constant_value = InitScheme::kDefaultConstant;
  double random_range = InitScheme::kDefaultRange;
  exp.read_double("constant_value", constant_value);
  exp.read_double("random_range", random_range);
  const auto schemes = exp.get("schemes");
  if (!schemes) throw ConfigError("missing key 'experiment.schemes'");
  for (const auto& name : split(*schemes, ',')) {
    try {
      cfg.schemes.push_back(parse_scheme(name, constant_value, random_range));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("experiment.schemes: ") + e.what());
    }
  }
  const auto seeds = exp.get("seeds");
  if (!seeds) throw ConfigError("missing key 'experiment.seeds'");
  for (const auto& s : split(*seeds, ',')) {
    cfg.seeds.push_back(parse_u64(exp.qualified("seeds"), s));
  }
  if (auto v = exp.get("output")) cfg.output_dir = *v;
  exp.read_size("jobs", cfg.jobs);

  const Section tr = section("train");
  tr.read_size("epochs", cfg.train.epochs);
  tr.read_size("batch_size", cfg.train.batch_size);
  tr.read_size("batches_per_epoch", cfg.train.batches_per_epoch);
  tr.read_double("learning_rate", cfg.train.learning_rate);
  const std::string optimizer = tr.get("optimizer").value_or("adam");
  if (optimizer == "adam") {
    AdamConfig adam;
    tr.read_double("beta1", adam.beta1);
    tr.read_double("beta2", adam.beta2);
    tr.read_double("epsilon", adam.epsilon);
    if (tr.get("momentum")) throw ConfigError("train.momentum is only valid for sgd");
    cfg.train.optimizer = adam;
  } else if (optimizer == "sgd") {
    SgdConfig sgd;
    tr.read_double("momentum", sgd.momentum);
    if (tr.get("beta1") || tr.get("beta2") || tr.get("epsilon")) {
      throw ConfigError("train.beta1/beta2/epsilon are only valid for adam");
    }
    cfg.train.optimizer = sgd;
  } else {
    throw ConfigError("train.optimizer: expected adam or sgd, got '" + optimizer + "'");
  }
  if (!(cfg.train.learning_rate > 0.0)) {
    throw ConfigError("train.learning_rate must be > 0");
  }
  try {
    cfg.train.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path.parent_path());
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* v = std::getenv("INITLAB_SEED");
  if (!v || !*v) return std::nullopt;
  return parse_u64("INITLAB_SEED", v);
}

}  // namespace initlab

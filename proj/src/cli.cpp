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

#include "initlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "initlab/config.hpp"
#include "initlab/error.hpp"
#include "initlab/experiment.hpp"
#include "initlab/initializers.hpp"
#include "initlab/tensor_io.hpp"
#include "initlab/text.hpp"
#include "initlab/variance.hpp"

namespace initlab::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kExplodingVariance = 1e6;
constexpr double kVanishingVariance = 1e-6;

std::string scheme_list() {
  std::string s;
  for (const auto& n : scheme_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

struct SampleArgs {
  std::string scheme;
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  std::size_t count = 0;
  std::uint64_t seed = 1;
  std::string out = "samples.itns";
  double constant = InitScheme::kDefaultConstant;
  double range = InitScheme::kDefaultRange;
};

struct AnalyzeArgs {
  std::string schemes;
  std::vector<std::string> fans;
  std::size_t depth = 0;
  std::size_t width = 0;
  std::string widths;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::string out = "analysis";
  bool relu = false;
  double constant = InitScheme::kDefaultConstant;
  double range = InitScheme::kDefaultRange;
};

struct CompareArgs {
  std::string config;
  std::size_t jobs = 0;
  std::string out;
};

int cmd_sample(SampleArgs a, std::ostream& out) {
  if (auto env = seed_from_environment()) a.seed = *env;
  const InitScheme scheme = parse_scheme(a.scheme, a.constant, a.range);
  const FanPair fans(a.fan_in, a.fan_out);
  if (a.count == 0) throw InvalidArgument("sample count must be >= 1");

  RngStream rng(a.seed, 0);
  const Tensor samples = sample_distribution(scheme, fans, Shape{a.count}, rng);
  const fs::path path(a.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_itns(path, samples);

  // Two-pass moments; population min/max.
  const auto data = samples.data();
  double mean = 0.0;
  for (double v : data) mean += v;
  mean /= static_cast<double>(data.size());
  double ss = 0.0;
  for (double v : data) ss += (v - mean) * (v - mean);
  const double var = data.size() > 1 ? ss / static_cast<double>(data.size() - 1) : 0.0;
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());

  nlohmann::ordered_json summary;
  summary["scheme"] = std::string(scheme.name());
  summary["fan_in"] = fans.fan_in;
  summary["fan_out"] = fans.fan_out;
  summary["n"] = a.count;
  summary["seed"] = a.seed;
  summary["mean"] = mean;
  summary["var"] = var;
  summary["min"] = *lo;
  summary["max"] = *hi;
  summary["analytic_bound_or_sigma"] = scale_parameter(scheme, fans);
  summary["analytic_variance"] = analytic_variance(scheme, fans);
  const std::string text = summary.dump(2) + "\n";
  fs::path summary_path = path;
  summary_path.replace_extension(".json");
  write_text_file(summary_path, text);
  out << text;
  return kExitOk;
}

std::size_t parse_count(std::string_view s, const std::string& what) {
  s = trim(s);
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw InvalidArgument(what);
  }
  return v;
}

FanPair parse_fans(const std::string& text) {
  const std::string what = "--fans expects INxOUT, got '" + text + "'";
  const auto x = text.find('x');
  if (x == std::string::npos) throw InvalidArgument(what);
  return FanPair(parse_count(std::string_view(text).substr(0, x), what),
                 parse_count(std::string_view(text).substr(x + 1), what));
}

std::string probe_line(bool pass, const std::string& scheme, const char* dir,
                       const std::string& where, double pred, double meas) {
  const double r = pred != 0.0 ? meas / pred : (meas == 0.0 ? 1.0 : INFINITY);
  return std::string(pass ? "PASS" : "FAIL") + "  " + scheme + "  " + dir + "  " +
         where + "  pred=" + format_fixed(pred, 6) + "  meas=" +
         format_fixed(meas, 6) + "  ratio=" + format_fixed(r, 4) + "\n";
}

int cmd_analyze(AnalyzeArgs a, std::ostream& out) {
  if (auto env = seed_from_environment()) a.seed = *env;
  std::vector<InitScheme> schemes;
  for (const auto& name : split(a.schemes, ',')) {
    schemes.push_back(parse_scheme(name, a.constant, a.range));
  }
  std::vector<FanPair> fan_grid;
  for (const auto& entry : a.fans) {
    for (const auto& f : split(entry, ',')) fan_grid.push_back(parse_fans(f));
  }
  const bool sweep = a.depth > 0;
  if (sweep == !fan_grid.empty()) {
    throw InvalidArgument("analyze needs exactly one of --fans or --depth");
  }
  const fs::path dir(a.out);

  for (const auto& scheme : schemes) {
    const std::string name(scheme.name());
    VarianceReport report;
    if (!sweep) {
      report.scheme = name;
      report.sample_count = a.samples;
      for (std::size_t i = 0; i < fan_grid.size(); ++i) {
        auto rec = probe_report(scheme, fan_grid[i], a.samples, a.seed).layers.front();
        rec.layer = i;
        report.layers.push_back(rec);
        const std::string where =
            std::to_string(rec.fan_in) + "x" + std::to_string(rec.fan_out);
        out << probe_line(within_law(rec.measured_forward_ratio, rec.predicted_forward_ratio),
                          name, "fwd", where, rec.predicted_forward_ratio,
                          rec.measured_forward_ratio);
        out << probe_line(within_law(rec.measured_backward_ratio, rec.predicted_backward_ratio),
                          name, "bwd", where, rec.predicted_backward_ratio,
                          rec.measured_backward_ratio);
      }
      write_text_file(dir / ("variance_" + name + ".csv"), report.to_csv());
      write_text_file(dir / ("variance_" + name + ".json"), report.to_json());
    } else {
      std::vector<std::size_t> widths;
      if (!a.widths.empty()) {
        for (const auto& w : split(a.widths, ',')) {
          widths.push_back(parse_count(w, "--widths expects comma-separated integers, got '" +
                                              a.widths + "'"));
        }
      } else if (a.width > 0) {
        widths.push_back(a.width);
      } else {
        throw InvalidArgument("--depth needs --width or --widths");
      }
      RngStream rng(a.seed, 0);
      const std::size_t samples = std::min<std::size_t>(a.samples, 10000);
      report = depth_sweep(scheme, widths, a.depth, samples, rng, {a.relu});
      for (const auto& rec : report.layers) {
        const std::string where = "layer " + std::to_string(rec.layer);
        out << probe_line(within_law(rec.measured_forward_ratio, rec.predicted_forward_ratio),
                          name, "fwd", where, rec.predicted_forward_ratio,
                          rec.measured_forward_ratio);
      }
      for (const auto& rec : report.layers) {
        const std::string where = "layer " + std::to_string(rec.layer);
        out << probe_line(within_law(rec.measured_backward_ratio, rec.predicted_backward_ratio),
                          name, "bwd", where, rec.predicted_backward_ratio,
                          rec.measured_backward_ratio);
      }
      const double final_var = report.layers.back().activation_variance;
      const char* flag = final_var >= kExplodingVariance   ? "EXPLODING"
                         : final_var <= kVanishingVariance ? "VANISHING"
                                                           : "STABLE";
      out << name << "  depth " << a.depth << "  final forward variance "
          << format_number(final_var) << "  " << flag << "\n";
      write_text_file(dir / ("depth_" + name + ".csv"), report.to_csv());
      write_text_file(dir / ("depth_" + name + ".json"), report.to_json());
    }
  }
  return kExitOk;
}

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_config(a.config);
  if (auto env = seed_from_environment()) cfg.seeds = {*env};
  if (a.jobs > 0) cfg.jobs = a.jobs;
  if (!a.out.empty()) cfg.output_dir = a.out;
  if (const auto* folder = std::get_if<FolderDatasetSpec>(&cfg.dataset)) {
    if (!fs::is_directory(folder->root)) {
      throw ConfigError("dataset root " + folder->root.string() + " not found");
    }
  }

  const DatasetSplits data = load_dataset(cfg.dataset);
  const ComparisonResult result = run_comparison(cfg.model, data, cfg.schemes,
                                                 cfg.seeds, cfg.train, cfg.jobs);

  const fs::path dir = cfg.output_dir;
  write_text_file(dir / "results.csv", result.to_csv());
  write_text_file(dir / "results.json", result.to_json());
  for (const auto& s : result.schemes) {
    for (const auto& r : s.runs) {
      write_text_file(dir / "histories" /
                          (result.model + "_" + s.scheme + "_seed" +
                           std::to_string(r.seed) + ".jsonl"),
                      r.history.to_jsonl());
    }
  }
  out << result.to_table();
  if (result.any_diverged()) {
    for (const auto& s : result.schemes) {
      for (const auto& r : s.runs) {
        if (r.diverged) {
          err << "run " << s.scheme << " seed " << r.seed << " diverged at epoch "
              << r.diverged_epoch << "\n";
        }
      }
    }
    return kExitRunFailure;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"initlab: weight initialization sampling, variance analysis and "
               "initializer comparison"};
  app.name("initlab");
  app.require_subcommand(1);
  app.footer("Schemes: " + scheme_list() +
             "\nExit codes: 0 ok, 2 usage or config error, 3 a run diverged.\n"
             "INITLAB_SEED overrides the seed (compare: replaces the seed list).");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw weights from one scheme");
  sample_cmd->add_option("scheme", sample.scheme, "Scheme: " + scheme_list())->required();
  sample_cmd->add_option("fan_in", sample.fan_in, "Input connections")->required();
  sample_cmd->add_option("fan_out", sample.fan_out, "Output connections")->required();
  sample_cmd->add_option("n", sample.count, "Number of samples")->required();
  sample_cmd->add_option("--seed", sample.seed, "RNG seed")->capture_default_str();
  sample_cmd->add_option("--out", sample.out, "ITNS output path; summary goes next to it as .json")
      ->capture_default_str();
  sample_cmd->add_option("--constant", sample.constant, "Value for the constant scheme")
      ->capture_default_str();
  sample_cmd->add_option("--range", sample.range, "Half-width for the random scheme")
      ->capture_default_str();

  AnalyzeArgs analyze;
  auto* analyze_cmd =
      app.add_subcommand("analyze", "Measure forward/backward variance ratios");
  analyze_cmd->add_option("schemes", analyze.schemes, "Comma-separated schemes: " + scheme_list())
      ->required();
  analyze_cmd->add_option("--fans", analyze.fans, "Fan pairs as INxOUT (repeatable, comma-separated)");
  analyze_cmd->add_option("--depth", analyze.depth, "Depth of a linear stack to sweep");
  analyze_cmd->add_option("--width", analyze.width, "Width of every layer in the sweep");
  analyze_cmd->add_option("--widths", analyze.widths, "depth+1 comma-separated widths");
  analyze_cmd->add_option("--samples", analyze.samples, "Monte-Carlo samples (sweeps use at most 10000)")
      ->capture_default_str();
  analyze_cmd->add_option("--seed", analyze.seed, "RNG seed")->capture_default_str();
  analyze_cmd->add_option("--out", analyze.out, "Output directory")->capture_default_str();
  analyze_cmd->add_flag("--relu", analyze.relu, "Insert ReLU between sweep layers");
  analyze_cmd->add_option("--constant", analyze.constant, "Value for the constant scheme");
  analyze_cmd->add_option("--range", analyze.range, "Half-width for the random scheme");

  CompareArgs compare;
  auto* compare_cmd =
      app.add_subcommand("compare", "Train one model under several schemes and seeds");
  compare_cmd->add_option("config", compare.config, "Experiment config file")->required();
  compare_cmd->add_option("--jobs", compare.jobs, "Maximum concurrent runs (default: config)");
  compare_cmd->add_option("--out", compare.out, "Output directory (default: config)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sample_cmd) return cmd_sample(sample, out);
    if (*analyze_cmd) return cmd_analyze(analyze, out);
    if (*compare_cmd) return cmd_compare(compare, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ShapeMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return kExitUsage;
}

}  // namespace initlab::cli

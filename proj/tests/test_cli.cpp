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

#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

#include "initlab/cli.hpp"
#include "initlab/initializers.hpp"
#include "initlab/tensor_io.hpp"
#include "initlab/text.hpp"

using namespace initlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = initlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines_starting(const std::string& text, const std::string& prefix) {
  std::size_t n = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

const fs::path kConfigs = fs::path(INITLAB_SOURCE_DIR) / "configs";

}  // namespace

TEST_CASE("help lists every scheme") {
  const Run r = invoke({"--help"});
  CHECK(r.code == initlab::cli::kExitOk);
  for (const auto& name : scheme_names()) CHECK(r.out.find(name) != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == initlab::cli::kExitUsage);
  CHECK(invoke({"frobnicate"}).code == initlab::cli::kExitUsage);
  const Run bogus = invoke({"sample", "bogus", "1", "1", "1"});
  CHECK(bogus.code == initlab::cli::kExitUsage);
  CHECK(bogus.err.find("proposed-normal") != std::string::npos);
  CHECK(invoke({"sample", "he", "0", "1", "1"}).code == initlab::cli::kExitUsage);
  CHECK(invoke({"analyze", "he", "--fans", "10by10"}).code == initlab::cli::kExitUsage);
  CHECK(invoke({"analyze", "he"}).code == initlab::cli::kExitUsage);
  CHECK(invoke({"analyze", "he", "--depth", "2", "--widths", "4,-3,2"}).code ==
        initlab::cli::kExitUsage);
}

TEST_CASE("sample writes the draws and a summary") {
  const fs::path dir = oracle::temp_dir("cli_sample");
  const Run r = invoke({"sample", "proposed", "128", "64", "1000000", "--seed", "1", "--out",
                     (dir / "w.itns").string()});
  REQUIRE(r.code == initlab::cli::kExitOk);
  const auto summary = nlohmann::json::parse(read_text_file(dir / "w.json"));
  CHECK(nlohmann::json::parse(r.out) == summary);
  const double bound = std::sqrt(2.0 / 128.0) + std::sqrt(2.0 / 192.0);
  CHECK(std::abs(summary["var"].get<double>() / (bound * bound / 3.0) - 1.0) <= 0.02);
  CHECK(summary["analytic_bound_or_sigma"].get<double>() == doctest::Approx(bound));
  CHECK(summary["n"].get<int>() == 1000000);
  const Tensor t = load_itns(dir / "w.itns");
  CHECK(t.shape() == Shape{1000000});
  CHECK(summary["max"].get<double>() <= bound);

  const Run zeros = invoke({"sample", "zeros", "10", "10", "100", "--out", (dir / "z.itns").string()});
  REQUIRE(zeros.code == initlab::cli::kExitOk);
  CHECK(nlohmann::json::parse(zeros.out)["var"].get<double>() == 0.0);
}

TEST_CASE("analyze fan grid") {
  const fs::path dir = oracle::temp_dir("cli_analyze");
  const Run r = invoke({"analyze", "xavier,he,proposed", "--fans", "100x100", "--samples",
                     "100000", "--out", dir.string()});
  REQUIRE(r.code == initlab::cli::kExitOk);
  CHECK(count_lines_starting(r.out, "PASS") + count_lines_starting(r.out, "FAIL") == 6);
  CHECK(count_lines_starting(r.out, "PASS") == 6);
  for (const char* s : {"xavier", "he", "proposed"}) {
    CHECK(fs::exists(dir / ("variance_" + std::string(s) + ".csv")));
    CHECK(fs::exists(dir / ("variance_" + std::string(s) + ".json")));
  }

  const Run p = invoke({"analyze", "proposed", "--fans", "2x2", "--samples", "20000", "--out",
                     dir.string()});
  REQUIRE(p.code == initlab::cli::kExitOk);
  CHECK(p.out.find("pred=1.942809") != std::string::npos);
}

TEST_CASE("analyze depth sweep flags explosion") {
  const fs::path dir = oracle::temp_dir("cli_depth");
  const Run r = invoke({"analyze", "std-normal", "--depth", "5", "--width", "100", "--out",
                     dir.string()});
  REQUIRE(r.code == initlab::cli::kExitOk);
  CHECK(r.out.find("EXPLODING") != std::string::npos);
  CHECK(fs::exists(dir / "depth_std-normal.csv"));

  const Run x = invoke({"analyze", "xavier", "--depth", "4", "--width", "50", "--out",
                     dir.string()});
  CHECK(x.out.find("STABLE") != std::string::npos);
}

TEST_CASE("compare runs the quick config") {
  const fs::path dir = oracle::temp_dir("cli_compare");
  const Run r = invoke({"compare", (kConfigs / "quick.ini").string(), "--out", dir.string()});
  REQUIRE(r.code == initlab::cli::kExitOk);
  const auto results = nlohmann::json::parse(read_text_file(dir / "results.json"));
  double zeros = -1.0, proposed = -1.0;
  for (const auto& s : results["schemes"]) {
    const double va = s["runs"][0]["validation_accuracy"].get<double>();
    if (s["scheme"] == "zeros") zeros = va;
    if (s["scheme"] == "proposed") proposed = va;
  }
  CHECK(proposed > zeros);
  CHECK(fs::exists(dir / "histories" / "cnn-small_proposed_seed1.jsonl"));

  const std::string first = read_text_file(dir / "results.csv");
  const fs::path again = oracle::temp_dir("cli_compare_again");
  REQUIRE(invoke({"compare", (kConfigs / "quick.ini").string(), "--out", again.string()}).code ==
          cli::kExitOk);
  CHECK(read_text_file(again / "results.csv") == first);
  CHECK(read_text_file(again / "results.json") == read_text_file(dir / "results.json"));
}

TEST_CASE("compare config errors exit with 2") {
  const fs::path dir = oracle::temp_dir("cli_compare_errors");
  write_text_file(dir / "unknown.ini",
                  "[model]\nlayers = flatten dense(4)\n[experiment]\nschemes = he\n"
                  "seeds = 1\ncolour = blue\n");
  const Run unknown = invoke({"compare", (dir / "unknown.ini").string()});
  CHECK(unknown.code == initlab::cli::kExitUsage);
  CHECK(unknown.err.find("experiment.colour") != std::string::npos);

  write_text_file(dir / "missing.ini",
                  "[model]\nlayers = flatten dense(4)\n[dataset]\nkind = folder\n"
                  "root = nowhere\n[experiment]\nschemes = he\nseeds = 1\n");
  CHECK(invoke({"compare", (dir / "missing.ini").string()}).code == initlab::cli::kExitUsage);
  CHECK(invoke({"compare", (dir / "absent.ini").string()}).code == initlab::cli::kExitUsage);
}

// Copyright 2026 The fctn-rtc Authors
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

#include "fctn/factor_io.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "fctn/error.hpp"
#include "fctn/tensor_io.hpp"

namespace fctn {

namespace fs = std::filesystem;
using nlohmann::json;

void save_factors(const fs::path& dir, const FctnFactors& f) {
  f.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  json files = json::array();
  for (Index k = 0; k < f.order(); ++k) {
    const std::string name = "factor_" + std::to_string(k) + ".fct1";
    save_tensor(dir / name, f.factors[k]);
    files.push_back(name);
  }
  const json manifest = {{"order", f.order()},
                         {"mode_sizes", f.mode_sizes},
                         {"rank_matrix", f.rank.matrix(f.mode_sizes)},
                         {"factor_files", files}};
  std::ofstream os(dir / "manifest.json");
  if (!os) throw IoError("cannot write " + (dir / "manifest.json").string());
  os << manifest.dump(2) << '\n';
}

FctnFactors load_factors(const fs::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw IoError("cannot read " + (dir / "manifest.json").string());
  json m;
  try {
    m = json::parse(is);
    const auto order = m.at("order").get<Index>();
    const auto sizes = m.at("mode_sizes").get<Shape>();
    const auto rmat = m.at("rank_matrix").get<std::vector<std::vector<Index>>>();
    const auto files = m.at("factor_files").get<std::vector<std::string>>();
    if (sizes.size() != order || rmat.size() != order || files.size() != order)
      throw IoError("factor manifest: inconsistent order");
    std::vector<Tensor> g;
    for (const auto& name : files) g.push_back(load_tensor(dir / name));
    return FctnFactors(std::move(g), FctnRank::from_matrix(rmat), sizes);
  } catch (const json::exception& e) {
    throw IoError(std::string("factor manifest: ") + e.what());
  }
}

}  // namespace fctn

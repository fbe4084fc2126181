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

#pragma once

#include <filesystem>

#include "fctn/network.hpp"

namespace fctn {

// A factor set on disk is a directory holding one FCT1 file per factor and
// manifest.json:
//   {"order": N, "mode_sizes": [...], "rank_matrix": [[...]...],
//    "factor_files": ["factor_0.fct1", ...]}
// rank_matrix carries the mode sizes on its diagonal.
void save_factors(const std::filesystem::path& dir, const FctnFactors& f);
FctnFactors load_factors(const std::filesystem::path& dir);

}  // namespace fctn

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

#include <cstdint>
#include <random>

#include "fctn/mask.hpp"
#include "fctn/network.hpp"
#include "fctn/tensor.hpp"

namespace fctn {

/// Independent random streams derived from one experiment seed.
enum class Stream : std::uint64_t { data = 1, mask = 2, noise = 3, init = 4 };

/// mt19937_64 seeded through std::seed_seq{seed_lo, seed_hi, stream}. Both
/// the engine and seed_seq are fully specified by the C++ standard, and the
/// conversions below are done by hand, so sequences are identical on every
/// platform.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream);

  std::uint64_t next() { return eng_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller, one value per call).
  double normal();
  /// Uniform integer in [0, n), unbiased.
  Index below(Index n);

 private:
  std::mt19937_64 eng_;
};

struct Synthetic {
  Tensor x0;
  FctnFactors factors;
};

/// Factors with i.i.d. U(0,1) entries at `rank`; x0 is their composition.
Synthetic gen_synthetic(const Shape& shape, const FctnRank& rank, std::uint64_t seed);

struct Corruption {
  Tensor corrupted;
  Tensor e_true;  // corrupted - x
};

/// Salt-and-pepper noise: round(s * size) distinct entries, the first half of
/// them (in draw order) set to 0 and the rest to max(x).
Corruption apply_sap(const Tensor& x, double s, std::uint64_t seed);

/// Exactly round(rho_obs * prod(shape)) observed entries, drawn uniformly
/// without replacement.
ObservationMask sample_mask(const Shape& shape, double rho_obs, std::uint64_t seed);

/// ||x - x0||_F / ||x0||_F.
double rel_error(const Tensor& x, const Tensor& x0);

/// Axes spanning each 2-D frame; the metrics average over every other index.
struct FrameAxes {
  Index rows = 0;
  Index cols = 1;
};

/// Mean PSNR over frames, peak 1, each frame capped at 100 dB.
double mpsnr(const Tensor& x, const Tensor& x0, FrameAxes axes = {});
/// Mean SSIM over frames: Gaussian window 11x11 (sigma 1.5, shrunk to the
/// frame when smaller), K1 = 0.01, K2 = 0.03, dynamic range 1, valid region.
double mssim(const Tensor& x, const Tensor& x0, FrameAxes axes = {});

/// Frames of x selected by `axes`, each as a rows x cols matrix.
std::vector<Matrix> frames(const Tensor& x, FrameAxes axes);

}  // namespace fctn

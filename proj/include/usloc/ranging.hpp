// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The usloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

#include "usloc/waveform.hpp"

namespace usloc {

/// One-way range to a beacon read off the correlation peak.
struct RangeEstimate {
  std::size_t beacon_index = 0;
  double distance = 0.0;         // m, peak_sample / fs * c
  Eigen::Index peak_sample = 0;  // lag of the maximum correlation magnitude
  double peak_value = 0.0;
};

struct DespreadResult {
  SampledSignal signal;
  bool truncated = false;  // a trailing partial symbol was dropped
};

// Multiplies each chip interval by the matching code chip. The input is taken
// as aligned to the transmitter's symbol clock at sample 0.
DespreadResult despread(const SampledSignal& received, const Eigen::VectorXi& code, const WaveformConfig& config);

/// corr[L] = sum_k received[k + L] * reference[k] for L in [0, n - m].
Eigen::VectorXd cross_correlate(const SampledSignal& received, const SampledSignal& reference);

/// Smallest 2^a 3^b 5^c that is >= n.
Eigen::Index next_fast_size(Eigen::Index n);

// Frequency-domain correlator with the reference spectrum computed once.
// Accepts any received signal up to `fft_size` samples.
class MatchedFilter {
 public:
  MatchedFilter(const SampledSignal& reference, Eigen::Index fft_size);

  Eigen::Index fft_size() const { return fft_size_; }
  Eigen::Index reference_length() const { return reference_length_; }
  double sample_rate() const { return sample_rate_; }

  // Lags [0, min(n - m, max_lag)]; max_lag < 0 means all lags.
  Eigen::VectorXd correlate(const SampledSignal& received, Eigen::Index max_lag = -1) const;

 private:
  Eigen::Index fft_size_;
  Eigen::Index reference_length_;
  double sample_rate_;
  std::vector<std::complex<double>> reference_spectrum_;  // conjugated half spectrum
};

/// Global-maximum peak pick on |corr|; throws NoPeak when corr is all zero.
RangeEstimate pick_peak(const Eigen::VectorXd& corr, std::size_t beacon_index, double sample_rate,
                        double speed_of_sound);

// Correlates against the full coded, hopped reference of the beacon. Folding
// the code into the reference despreads the received signal at every candidate lag.
RangeEstimate estimate_range(const SampledSignal& received, std::size_t beacon_index, const WaveformConfig& config,
                             const HopPlan& plan, const Eigen::VectorXi& code, double speed_of_sound = 343.0);

// Coherent bit decisions for one beacon whose burst starts at `arrival_sample`:
// despread, mix with the hop carrier, integrate over each symbol, take the sign.
std::vector<int> recover_bits(const SampledSignal& received, Eigen::Index arrival_sample,
                              const WaveformConfig& config, const HopPlan& plan, const Eigen::VectorXi& code);

}  // namespace usloc

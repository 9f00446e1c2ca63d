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

#include <cstdint>
#include <vector>

namespace usloc {

/// Sylvester Walsh-Hadamard matrix; row k is the spreading code of transmitter k.
struct WalshMatrix {
  Eigen::MatrixXi entries;

  int order() const { return static_cast<int>(entries.rows()); }
  Eigen::VectorXi row(int k) const { return entries.row(k).transpose(); }
};

/// Frequency-hopping channel plan shared by transmitters and receiver.
struct HopPlan {
  std::vector<double> center_frequencies;  // Hz
  double channel_bandwidth = 5e3;          // Hz
  std::vector<int> hop_sequence;           // one channel index per symbol
  double carrier_phase = 0.0;              // radians

  void validate() const;
  double max_frequency() const;
  double frequency_of_symbol(std::size_t symbol) const;
};

struct WaveformConfig {
  double sample_rate = 340e3;      // Hz
  double symbol_duration = 2e-3;   // s, also the hop dwell
  std::vector<int> data_bits;      // entries in {+1, -1}
  int code_row_index = 0;

  // Throws InvalidArgument when the symbol does not fall on whole samples or is not
  // a whole number of chips of the given code length.
  void validate(int code_length) const;
  int samples_per_symbol() const;
  int samples_per_chip(int code_length) const;
};

struct SampledSignal {
  Eigen::VectorXd samples;
  double sample_rate = 0.0;

  Eigen::Index size() const { return samples.size(); }
  double energy() const { return samples.squaredNorm(); }
  void validate() const;
};

/// Channel centers 22.5 ... 47.5 kHz, 5 kHz apart.
std::vector<double> default_channel_centers();

Eigen::MatrixXi walsh_hadamard_entries(int order);
WalshMatrix walsh_hadamard(int order);

Eigen::VectorXi encode_symbol(int data_bit, const Eigen::VectorXi& code_row);

/// Seeded pseudo-random hop sequence over `num_channels`, one entry per symbol.
std::vector<int> make_hop_sequence(int num_channels, std::size_t num_symbols, std::uint64_t seed, int reuse_gap = 0);

/// Seeded pseudo-random burst of +/-1 data bits.
std::vector<int> make_data_bits(std::size_t count, std::uint64_t seed);

/// Default plan: six channels, 5 kHz wide, seeded hop sequence of `num_symbols`.
HopPlan make_hop_plan(std::size_t num_symbols, std::uint64_t seed, double phase = 0.0);

// Coded, BPSK-modulated, frequency-hopped burst. Each symbol spans
// symbol_duration; its chips are constant-sign multiples of
// sin(2 pi f_m t + phase) with f_m the symbol's hop channel and t measured
// from the start of the burst.
SampledSignal generate_tx_signal(const WaveformConfig& config, const HopPlan& plan, const Eigen::VectorXi& code);

// Same burst without the spreading code (all chips +1).
SampledSignal generate_bpsk_signal(const WaveformConfig& config, const HopPlan& plan);

}  // namespace usloc

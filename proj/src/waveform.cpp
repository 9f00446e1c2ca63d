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

#include "usloc/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "usloc/errors.hpp"

namespace usloc {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Rounds x to an integer and reports whether it was already one (to 1e-9).
bool whole(double x, long& out) {
  out = std::lround(x);
  return std::abs(x - static_cast<double>(out)) < 1e-9 * std::max(1.0, std::abs(x));
}

}  // namespace

void HopPlan::validate() const {
  if (center_frequencies.empty()) throw InvalidArgument("hop plan has no channels");
  if (!(channel_bandwidth > 0.0)) throw InvalidArgument("channel bandwidth must be positive");
  for (double f : center_frequencies) {
    if (f - channel_bandwidth / 2 < 20e3 - 1e-9 || f + channel_bandwidth / 2 > 50e3 + 1e-9)
      throw InvalidArgument("channel at " + std::to_string(f) + " Hz leaves the 20-50 kHz band");
  }
  std::vector<double> sorted = center_frequencies;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] - sorted[i - 1] < channel_bandwidth - 1e-9)
      throw InvalidArgument("hop channels overlap for the given bandwidth");
  for (int idx : hop_sequence)
    if (idx < 0 || static_cast<std::size_t>(idx) >= center_frequencies.size())
      throw InvalidArgument("hop sequence entry " + std::to_string(idx) + " out of range");
}

double HopPlan::max_frequency() const {
  return *std::max_element(center_frequencies.begin(), center_frequencies.end());
}

double HopPlan::frequency_of_symbol(std::size_t symbol) const {
  return center_frequencies[static_cast<std::size_t>(hop_sequence.at(symbol))];
}

int WaveformConfig::samples_per_symbol() const {
  long n = 0;
  if (!whole(symbol_duration * sample_rate, n) || n <= 0)
    throw InvalidArgument("symbol duration is not a whole number of samples");
  return static_cast<int>(n);
}

int WaveformConfig::samples_per_chip(int code_length) const {
  const int sps = samples_per_symbol();
  if (code_length <= 0 || sps % code_length != 0)
    throw InvalidArgument("samples per symbol (" + std::to_string(sps) + ") not divisible by code length " +
                          std::to_string(code_length));
  return sps / code_length;
}

void WaveformConfig::validate(int code_length) const {
  if (!(sample_rate > 0.0)) throw InvalidArgument("sample rate must be positive");
  if (!(symbol_duration > 0.0)) throw InvalidArgument("symbol duration must be positive");
  samples_per_chip(code_length);
  for (int b : data_bits)
    if (b != 1 && b != -1) throw InvalidArgument("data bits must be +1 or -1");
}

void SampledSignal::validate() const {
  if (!(sample_rate > 0.0)) throw InvalidArgument("sample rate must be positive");
  if (!samples.allFinite()) throw InvalidArgument("signal has non-finite samples");
}

std::vector<double> default_channel_centers() { return {22.5e3, 27.5e3, 32.5e3, 37.5e3, 42.5e3, 47.5e3}; }

Eigen::MatrixXi walsh_hadamard_entries(int order) {
  if (!is_power_of_two(order))
    throw InvalidArgument("Walsh-Hadamard order must be a power of two, got " + std::to_string(order));
  Eigen::MatrixXi h = Eigen::MatrixXi::Ones(1, 1);
  while (h.rows() < order) {
    const Eigen::Index n = h.rows();
    Eigen::MatrixXi next(2 * n, 2 * n);
    next << h, h, h, -h;
    h = std::move(next);
  }
  return h;
}

WalshMatrix walsh_hadamard(int order) { return WalshMatrix{walsh_hadamard_entries(order)}; }

Eigen::VectorXi encode_symbol(int data_bit, const Eigen::VectorXi& code_row) { return data_bit * code_row; }

std::vector<int> make_hop_sequence(int num_channels, std::size_t num_symbols, std::uint64_t seed, int reuse_gap) {
  if (num_channels <= 0) throw InvalidArgument("need at least one hop channel");
  if (reuse_gap < 0 || reuse_gap >= num_channels)
    throw InvalidArgument("hop reuse gap must lie in [0, channels - 1]");
  std::mt19937_64 rng(seed);
  std::vector<int> seq(num_symbols);
  std::vector<int> allowed;
  for (std::size_t k = 0; k < num_symbols; ++k) {
    allowed.clear();
    for (int ch = 0; ch < num_channels; ++ch) {
      bool recent = false;
      for (std::size_t j = 1; j <= static_cast<std::size_t>(reuse_gap) && j <= k; ++j) recent |= seq[k - j] == ch;
      if (!recent) allowed.push_back(ch);
    }
    seq[k] = allowed[std::uniform_int_distribution<std::size_t>(0, allowed.size() - 1)(rng)];
  }
  return seq;
}

std::vector<int> make_data_bits(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<int> bits(count);
  for (auto& b : bits) b = coin(rng) ? 1 : -1;
  return bits;
}

HopPlan make_hop_plan(std::size_t num_symbols, std::uint64_t seed, double phase) {
  HopPlan plan;
  plan.center_frequencies = default_channel_centers();
  plan.channel_bandwidth = 5e3;
  plan.hop_sequence = make_hop_sequence(static_cast<int>(plan.center_frequencies.size()), num_symbols, seed);
  plan.carrier_phase = phase;
  return plan;
}

SampledSignal generate_tx_signal(const WaveformConfig& config, const HopPlan& plan, const Eigen::VectorXi& code) {
  if (code.size() == 0) throw InvalidArgument("empty spreading code");
  config.validate(static_cast<int>(code.size()));
  plan.validate();
  if (plan.hop_sequence.size() < config.data_bits.size())
    throw InvalidArgument("hop sequence shorter than the data burst");
  if (config.sample_rate < 2.0 * plan.max_frequency())
    throw InvalidArgument("sample rate below Nyquist for the highest hop channel");

  const int sps = config.samples_per_symbol();
  const int spc = config.samples_per_chip(static_cast<int>(code.size()));
  const auto n_bits = config.data_bits.size();

  SampledSignal out;
  out.sample_rate = config.sample_rate;
  out.samples.resize(static_cast<Eigen::Index>(n_bits) * sps);

  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t s = 0; s < n_bits; ++s) {
    const double f = plan.frequency_of_symbol(s);
    const Eigen::VectorXi chips = encode_symbol(config.data_bits[s], code);
    const Eigen::Index base = static_cast<Eigen::Index>(s) * sps;
    for (int n = 0; n < sps; ++n) {
      const double t = static_cast<double>(base + n) / config.sample_rate;
      out.samples[base + n] = chips[n / spc] * std::sin(two_pi * f * t + plan.carrier_phase);
    }
  }
  return out;
}

SampledSignal generate_bpsk_signal(const WaveformConfig& config, const HopPlan& plan) {
  return generate_tx_signal(config, plan, Eigen::VectorXi::Ones(1));
}

}  // namespace usloc

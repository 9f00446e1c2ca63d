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

#include "usloc/ranging.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "usloc/errors.hpp"

namespace usloc {

DespreadResult despread(const SampledSignal& received, const Eigen::VectorXi& code, const WaveformConfig& config) {
  if (code.size() == 0) throw InvalidArgument("empty spreading code");
  const int sps = config.samples_per_symbol();
  const int spc = config.samples_per_chip(static_cast<int>(code.size()));
  const Eigen::Index whole = (received.size() / sps) * sps;

  DespreadResult out;
  out.truncated = whole != received.size();
  out.signal.sample_rate = received.sample_rate;
  out.signal.samples.resize(whole);
  for (Eigen::Index n = 0; n < whole; ++n) out.signal.samples[n] = received.samples[n] * code[(n % sps) / spc];
  return out;
}

Eigen::Index next_fast_size(Eigen::Index n) {
  for (Eigen::Index m = std::max<Eigen::Index>(n, 1);; ++m) {
    Eigen::Index r = m;
    for (Eigen::Index p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

MatchedFilter::MatchedFilter(const SampledSignal& reference, Eigen::Index fft_size)
    : fft_size_(fft_size), reference_length_(reference.size()), sample_rate_(reference.sample_rate) {
  if (reference.size() == 0) throw InvalidArgument("empty reference");
  if (fft_size < reference.size()) throw InvalidArgument("FFT size shorter than the reference");
  if (fft_size % 2 != 0) throw InvalidArgument("FFT size must be even");

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> padded(static_cast<std::size_t>(fft_size), 0.0);
  std::copy(reference.samples.begin(), reference.samples.end(), padded.begin());
  fft.fwd(reference_spectrum_, padded);
  for (auto& c : reference_spectrum_) c = std::conj(c);
}

Eigen::VectorXd MatchedFilter::correlate(const SampledSignal& received, Eigen::Index max_lag) const {
  if (received.size() == 0) throw InvalidArgument("empty received signal");
  if (received.size() < reference_length_) throw InvalidArgument("received signal shorter than the reference");
  if (received.size() > fft_size_) throw InvalidArgument("received signal longer than the FFT size");

  // Circular correlation of length N >= n has no wrap-around for lags 0..n-m.
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> padded(static_cast<std::size_t>(fft_size_), 0.0);
  std::copy(received.samples.begin(), received.samples.end(), padded.begin());
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= reference_spectrum_[k];
  std::vector<double> corr;
  fft.inv(corr, spectrum, static_cast<std::size_t>(fft_size_));

  Eigen::Index lags = received.size() - reference_length_ + 1;
  if (max_lag >= 0) lags = std::min(lags, max_lag + 1);
  return Eigen::Map<const Eigen::VectorXd>(corr.data(), lags);
}

Eigen::VectorXd cross_correlate(const SampledSignal& received, const SampledSignal& reference) {
  if (received.size() == 0 || reference.size() == 0) throw InvalidArgument("cross_correlate needs nonempty inputs");
  if (reference.size() > received.size()) throw InvalidArgument("reference longer than received signal");
  Eigen::Index n = next_fast_size(received.size());
  if (n % 2 != 0) n = next_fast_size(n + 1);
  return MatchedFilter(reference, n).correlate(received);
}

RangeEstimate pick_peak(const Eigen::VectorXd& corr, std::size_t beacon_index, double sample_rate,
                        double speed_of_sound) {
  if (corr.size() == 0) throw NoPeak("no correlation lags");
  Eigen::Index lag = 0;
  const double peak = corr.cwiseAbs().maxCoeff(&lag);
  if (!(peak > 0.0)) throw NoPeak("correlation is identically zero for beacon " + std::to_string(beacon_index));
  RangeEstimate est;
  est.beacon_index = beacon_index;
  est.peak_sample = lag;
  est.peak_value = peak;
  est.distance = static_cast<double>(lag) / sample_rate * speed_of_sound;
  return est;
}

RangeEstimate estimate_range(const SampledSignal& received, std::size_t beacon_index, const WaveformConfig& config,
                             const HopPlan& plan, const Eigen::VectorXi& code, double speed_of_sound) {
  const SampledSignal reference = generate_tx_signal(config, plan, code);
  return pick_peak(cross_correlate(received, reference), beacon_index, config.sample_rate, speed_of_sound);
}

std::vector<int> recover_bits(const SampledSignal& received, Eigen::Index arrival_sample,
                              const WaveformConfig& config, const HopPlan& plan, const Eigen::VectorXi& code) {
  const int sps = config.samples_per_symbol();
  const Eigen::Index n_symbols = (received.size() - arrival_sample) / sps;
  if (arrival_sample < 0 || n_symbols <= 0) throw InvalidArgument("no whole symbol after the arrival sample");

  const SampledSignal aligned{received.samples.segment(arrival_sample, n_symbols * sps), received.sample_rate};
  const Eigen::VectorXd chips_removed = despread(aligned, code, config).signal.samples;

  const double two_pi = 2.0 * std::numbers::pi;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(n_symbols), plan.hop_sequence.size());
  std::vector<int> bits(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double f = plan.frequency_of_symbol(s);
    double acc = 0.0;
    for (int n = 0; n < sps; ++n) {
      const Eigen::Index k = static_cast<Eigen::Index>(s) * sps + n;
      acc += chips_removed[k] * std::sin(two_pi * f * static_cast<double>(k) / config.sample_rate + plan.carrier_phase);
    }
    bits[s] = acc >= 0.0 ? 1 : -1;
  }
  return bits;
}

}  // namespace usloc

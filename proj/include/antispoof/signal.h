// antispoof/signal.h

// Copyright 2026  The antispoof authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ANTISPOOF_SIGNAL_H_
#define ANTISPOOF_SIGNAL_H_

#include <cmath>
#include <numbers>
#include <string>

#include "antispoof/common.h"

namespace antispoof {

inline constexpr int kSampleRate = 16000;
inline constexpr int kFrameLength = 256;
inline constexpr int kFrameShift = 128;
inline constexpr int kNumBins = kFrameLength / 2 + 1;
/// Default pre-detector run length: 100 ms of exact zeros.
inline constexpr std::size_t kDefaultZeroRun = 1600;

/// Mono PCM audio scaled to [-1, 1].
struct Waveform {
  VectorXd samples;
  int sample_rate = kSampleRate;
};

/// Throws Error unless the rate is 16 kHz and every sample is finite and in
/// [-1, 1].
void CheckWaveform(const Waveform &w);

class WavError : public Error {
 public:
  enum class Kind {
    kUnreadable,
    kMalformed,
    kUnsupportedEncoding,
    kUnsupportedChannels,
    kUnsupportedSampleRate,
  };
  WavError(Kind kind, const std::string &what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Reads a RIFF/WAVE file holding 16-bit mono PCM at 16 kHz. Samples are
/// divided by 32768.
Waveform load_waveform(const std::string &path);

/// Writes 16-bit mono PCM; samples are scaled by 32768, rounded and clipped.
void write_waveform(const std::string &path, const Waveform &w);

/// True iff the waveform holds at least `min_run` consecutive samples that
/// are exactly zero.
bool predetect_zero_run(const Waveform &w, std::size_t min_run = kDefaultZeroRun);

/// Symmetric Hamming window, 0.54 - 0.46 cos(2 pi n / (N - 1)).
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> hamming_window(int n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(n);
  if (n == 1) {
    w(0) = Scalar(1);
    return w;
  }
  for (int i = 0; i < n; ++i)
    w(i) = Scalar(0.54) -
           Scalar(0.46) * std::cos(Scalar(2) * std::numbers::pi_v<Scalar> *
                                   Scalar(i) / Scalar(n - 1));
  return w;
}

/// Hamming-windowed frames of 256 samples with a 128-sample hop. Trailing
/// samples that do not fill a frame are dropped.
struct FrameSet {
  RowMatrixXd frames;  // F x 256
  int hop = kFrameShift;

  Eigen::Index num_frames() const { return frames.rows(); }
};

FrameSet frame_and_window(const Waveform &w);

/// Number of frames frame_and_window yields for a signal of this length.
inline Eigen::Index num_frames_for(Eigen::Index num_samples) {
  return num_samples < kFrameLength
             ? 0
             : (num_samples - kFrameLength) / kFrameShift + 1;
}

/// Short-time power spectrum and frequency-unwrapped phase, bins 0..128.
struct SpectrumFrames {
  RowMatrixXd power;            // F x 129
  RowMatrixXd phase_unwrapped;  // F x 129, radians
};

SpectrumFrames spectrum(const FrameSet &fs);

/// Maps x into (-pi, pi].
inline double wrap_to_pi(double x) {
  double r = std::remainder(x, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

/// Unwraps a phase sequence along its index: each step is replaced by its
/// wrapped difference, so consecutive outputs differ by at most pi. The
/// first element is kept as given.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> unwrap_phase(
    const Eigen::MatrixBase<Derived> &wrapped) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(wrapped.size());
  if (wrapped.size() == 0) return out;
  out(0) = wrapped(0);
  for (Eigen::Index k = 1; k < wrapped.size(); ++k)
    out(k) = out(k - 1) + wrap_to_pi(wrapped(k) - wrapped(k - 1));
  return out;
}

}  // namespace antispoof

#endif  // ANTISPOOF_SIGNAL_H_

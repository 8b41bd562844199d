// tests/signal-test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "antispoof/signal.h"
#include "oracles.h"
#include "test-util.h"

using namespace antispoof;
using namespace antispoof::oracles;
using antispoof::testing::TempDir;
using antispoof::testing::WriteRawWav;

namespace {

// Plain O(N^2) DFT of one frame, bins 0..N/2.
std::vector<std::complex<double>> DirectDft(const Eigen::Ref<const VectorXd> &x) {
  const int n = static_cast<int>(x.size());
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (int t = 0; t < n; ++t)
      acc += x(t) * std::polar(1.0, -2.0 * std::numbers::pi * k * t / n);
    out[k] = acc;
  }
  return out;
}

Waveform Noise(Rng &rng, Eigen::Index n) {
  Waveform w;
  w.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = 0.0;
    while (v == 0.0) v = rng.Uniform(-0.5, 0.5);
    w.samples(i) = v;
  }
  return w;
}

}  // namespace

TEST_CASE("load_waveform scales 16-bit samples") {
  TempDir dir("signal");
  WriteRawWav(dir.file("zero.wav"), {0});
  Waveform w = load_waveform(dir.file("zero.wav"));
  CHECK(w.sample_rate == 16000);
  REQUIRE(w.samples.size() == 1);
  CHECK(w.samples(0) == 0.0);

  WriteRawWav(dir.file("min.wav"), {-32768, 32767});
  w = load_waveform(dir.file("min.wav"));
  CHECK(w.samples(0) == -1.0);
  CHECK(w.samples(1) == 32767.0 / 32768.0);
}

TEST_CASE("load_waveform reads a 440 Hz sine sample by sample") {
  TempDir dir("signal");
  std::vector<std::int16_t> pcm(4096);
  for (int i = 0; i < 4096; ++i)
    pcm[i] = static_cast<std::int16_t>(
        std::lround(16384.0 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 16000.0)));
  WriteRawWav(dir.file("sine.wav"), pcm);
  Waveform w = load_waveform(dir.file("sine.wav"));
  REQUIRE(w.samples.size() == 4096);
  for (int i = 0; i < 4096; ++i) REQUIRE(w.samples(i) == pcm[i] / 32768.0);
  CHECK(w.samples.maxCoeff() == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("load_waveform reports each failure kind") {
  TempDir dir("signal");
  auto kind_of = [](const std::string &path) {
    try {
      load_waveform(path);
    } catch (const WavError &e) {
      return e.kind();
    }
    FAIL("no error for " << path);
    return WavError::Kind::kUnreadable;
  };
  CHECK(kind_of(dir.file("missing.wav")) == WavError::Kind::kUnreadable);

  std::ofstream(dir.file("text.wav")) << "hello, this is not audio at all";
  CHECK(kind_of(dir.file("text.wav")) == WavError::Kind::kMalformed);

  WriteRawWav(dir.file("float.wav"), {0, 0}, 1, 16000, 16, 3);
  CHECK(kind_of(dir.file("float.wav")) == WavError::Kind::kUnsupportedEncoding);
  WriteRawWav(dir.file("8bit.wav"), {0, 0}, 1, 16000, 8, 1);
  CHECK(kind_of(dir.file("8bit.wav")) == WavError::Kind::kUnsupportedEncoding);
  WriteRawWav(dir.file("stereo.wav"), {0, 0}, 2, 16000);
  CHECK(kind_of(dir.file("stereo.wav")) == WavError::Kind::kUnsupportedChannels);
  WriteRawWav(dir.file("cd.wav"), {0, 0}, 1, 44100);
  CHECK(kind_of(dir.file("cd.wav")) == WavError::Kind::kUnsupportedSampleRate);

  std::string bytes = testing::ReadFile(dir.file("cd.wav"));
  std::ofstream(dir.file("short.wav"), std::ios::binary) << bytes.substr(0, 20);
  CHECK(kind_of(dir.file("short.wav")) == WavError::Kind::kMalformed);
}

TEST_CASE("write_waveform round-trips through load_waveform") {
  TempDir dir("signal");
  Rng rng(3);
  Waveform w = Noise(rng, 1000);
  for (Eigen::Index i = 0; i < w.samples.size(); ++i)
    w.samples(i) = std::round(w.samples(i) * 32768.0) / 32768.0;
  write_waveform(dir.file("rt.wav"), w);
  Waveform back = load_waveform(dir.file("rt.wav"));
  CHECK(back.samples == w.samples);
}

TEST_CASE("CheckWaveform rejects bad rates and samples") {
  Waveform w;
  w.samples = VectorXd::Zero(10);
  CHECK_NOTHROW(CheckWaveform(w));
  w.sample_rate = 8000;
  CHECK_THROWS_AS(CheckWaveform(w), Error);
  w.sample_rate = 16000;
  w.samples(3) = 1.5;
  CHECK_THROWS_AS(CheckWaveform(w), Error);
  w.samples(3) = std::nan("");
  CHECK_THROWS_AS(CheckWaveform(w), Error);
}

TEST_CASE("predetect_zero_run examples") {
  Rng rng(5);
  Waveform zeros{VectorXd::Zero(3200), 16000};
  CHECK(predetect_zero_run(zeros, 1600));
  CHECK(predetect_zero_run(zeros));

  Waveform noise = Noise(rng, 16000);
  CHECK_FALSE(predetect_zero_run(noise, 1600));

  Waveform gap = noise;
  gap.samples.segment(5000, 1599).setZero();
  CHECK(LongestZeroRunBruteForce(gap.samples) == 1599);
  CHECK_FALSE(predetect_zero_run(gap, 1600));
  gap.samples(6599) = 0.0;
  CHECK(predetect_zero_run(gap, 1600));
}

TEST_CASE("predetect_zero_run agrees with a brute-force scan") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    Waveform w = Noise(rng, 300);
    double p = rng.Uniform(0.0, 1.0);
    for (Eigen::Index i = 0; i < w.samples.size(); ++i)
      if (rng.Uniform() < p) w.samples(i) = 0.0;
    std::size_t longest = LongestZeroRunBruteForce(w.samples);
    for (std::size_t min_run : {std::size_t(1), std::size_t(2), std::size_t(5),
                                std::size_t(17), std::size_t(100)})
      REQUIRE(predetect_zero_run(w, min_run) == (longest >= min_run));
    bool any_zero = (w.samples.array() == 0.0).any();
    REQUIRE(predetect_zero_run(w, 1) == any_zero);
  }
}

TEST_CASE("frame_and_window of constant ones is the Hamming window") {
  Waveform w{VectorXd::Ones(256), 16000};
  FrameSet fs = frame_and_window(w);
  REQUIRE(fs.num_frames() == 1);
  CHECK(fs.hop == 128);
  CHECK(fs.frames(0, 0) == doctest::Approx(0.08).epsilon(1e-12));
  for (int n = 0; n < 256; ++n) {
    CHECK(fs.frames(0, n) == doctest::Approx(fs.frames(0, 255 - n)).epsilon(1e-14));
    double expect = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / 255.0);
    CHECK(std::abs(fs.frames(0, n) - expect) < 1e-15);
  }
}

TEST_CASE("frame count and contents") {
  Rng rng(7);
  CHECK(frame_and_window(Waveform{VectorXd::Ones(384), 16000}).num_frames() == 2);
  for (Eigen::Index len : {256, 257, 383, 384, 385, 1000, 16000}) {
    Waveform w = Noise(rng, len);
    FrameSet fs = frame_and_window(w);
    REQUIRE(fs.num_frames() == (len - 256) / 128 + 1);
    REQUIRE(fs.num_frames() == num_frames_for(len));
    VectorXd win = hamming_window(256);
    for (Eigen::Index f = 0; f < fs.num_frames(); ++f)
      for (int n = 0; n < 256; ++n)
        REQUIRE(fs.frames(f, n) == w.samples(f * 128 + n) * win(n));
  }
  CHECK_THROWS_AS(frame_and_window(Waveform{VectorXd::Ones(255), 16000}), Error);
}

TEST_CASE("spectrum of a zero frame and of an impulse") {
  FrameSet fs;
  fs.frames = RowMatrixXd::Zero(2, 256);
  fs.frames(1, 0) = 0.54 - 0.46;  // unit impulse times the window
  SpectrumFrames sp = spectrum(fs);
  REQUIRE(sp.power.cols() == 129);
  for (int k = 0; k < 129; ++k) {
    CHECK(sp.power(0, k) == 0.0);
    CHECK(sp.phase_unwrapped(0, k) == 0.0);
    CHECK(sp.power(1, k) == doctest::Approx(0.0064).epsilon(1e-12));
  }
}

TEST_CASE("spectrum matches a direct DFT") {
  Rng rng(8);
  Waveform w = Noise(rng, 256 + 128 * 9);
  FrameSet fs = frame_and_window(w);
  SpectrumFrames sp = spectrum(fs);
  for (Eigen::Index f = 0; f < fs.num_frames(); ++f) {
    VectorXd frame = fs.frames.row(f).transpose();
    auto dft = DirectDft(frame);
    double energy = frame.squaredNorm(), spec_energy = 0.0;
    for (int k = 0; k <= 128; ++k) {
      double p = std::norm(dft[k]);
      REQUIRE(std::abs(sp.power(f, k) - p) <= 1e-9 * std::max(1.0, p));
      REQUIRE(sp.power(f, k) >= 0.0);
      double wrapped = wrap_to_pi(sp.phase_unwrapped(f, k));
      double expect = std::arg(dft[k]);
      REQUIRE(std::abs(wrap_to_pi(wrapped - expect)) < 1e-9);
      spec_energy += (k == 0 || k == 128 ? 1.0 : 2.0) * sp.power(f, k);
      if (k > 0) {
        double step = sp.phase_unwrapped(f, k) - sp.phase_unwrapped(f, k - 1);
        REQUIRE(step <= std::numbers::pi);
        REQUIRE(step > -std::numbers::pi);
      }
    }
    REQUIRE(std::abs(energy - spec_energy / 256.0) <= 1e-9 * energy);
  }
  SpectrumFrames again = spectrum(fs);
  CHECK(again.power == sp.power);
  CHECK(again.phase_unwrapped == sp.phase_unwrapped);
}

TEST_CASE("unwrap_phase and wrap_to_pi") {
  CHECK(wrap_to_pi(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_to_pi(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_to_pi(3.0 * std::numbers::pi / 2.0) == doctest::Approx(-std::numbers::pi / 2.0));
  VectorXd ramp(50);
  for (int i = 0; i < 50; ++i) ramp(i) = 0.4 * i;
  VectorXd wrapped = ramp.unaryExpr([](double x) { return wrap_to_pi(x); });
  VectorXd un = unwrap_phase(wrapped);
  for (int i = 0; i < 50; ++i) CHECK(un(i) == doctest::Approx(ramp(i)).epsilon(1e-12));
}

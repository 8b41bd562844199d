// antispoof/signal.cc

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

#include "antispoof/signal.h"

#include <algorithm>
#include <array>
#include <complex>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace antispoof {

namespace {

std::uint32_t ReadU32(const unsigned char *p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
         (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

std::uint16_t ReadU16(const unsigned char *p) {
  return std::uint16_t(p[0] | (p[1] << 8));
}

void PutU32(std::string *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(char((v >> (8 * i)) & 0xff));
}

void PutU16(std::string *out, std::uint16_t v) {
  out->push_back(char(v & 0xff));
  out->push_back(char(v >> 8));
}

}  // namespace

void CheckWaveform(const Waveform &w) {
  if (w.sample_rate != kSampleRate)
    throw Error("waveform sample rate " + std::to_string(w.sample_rate) +
                " Hz, expected 16000");
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) {
    double s = w.samples(i);
    if (!std::isfinite(s) || s < -1.0 || s > 1.0)
      throw Error("waveform sample " + std::to_string(i) +
                  " is outside [-1, 1] or non-finite");
  }
}

Waveform load_waveform(const std::string &path) {
  using Kind = WavError::Kind;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw WavError(Kind::kUnreadable, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  if (is.bad()) throw WavError(Kind::kUnreadable, "read failed on " + path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw WavError(Kind::kMalformed, path + ": not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *hdr = bytes.data() + pos;
    std::uint32_t size = ReadU32(hdr + 4);
    std::size_t body = pos + 8;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size())
        throw WavError(Kind::kMalformed, path + ": truncated fmt chunk");
      std::uint16_t format = ReadU16(bytes.data() + body);
      channels = ReadU16(bytes.data() + body + 2);
      rate = ReadU32(bytes.data() + body + 4);
      bits = ReadU16(bytes.data() + body + 14);
      if (format != 1 || bits != 16)
        throw WavError(Kind::kUnsupportedEncoding,
                       path + ": only 16-bit integer PCM is supported (format " +
                           std::to_string(format) + ", " + std::to_string(bits) +
                           " bits)");
      if (channels != 1)
        throw WavError(Kind::kUnsupportedChannels,
                       path + ": expected mono, got " +
                           std::to_string(channels) + " channels");
      if (rate != static_cast<std::uint32_t>(kSampleRate))
        throw WavError(Kind::kUnsupportedSampleRate,
                       path + ": expected 16000 Hz, got " +
                           std::to_string(rate) + " Hz");
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      if (!have_fmt)
        throw WavError(Kind::kMalformed, path + ": data chunk before fmt");
      std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
      std::size_t n = avail / 2;
      Waveform w;
      w.sample_rate = kSampleRate;
      w.samples.resize(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        auto v = static_cast<std::int16_t>(ReadU16(bytes.data() + body + 2 * i));
        w.samples(static_cast<Eigen::Index>(i)) = v / 32768.0;
      }
      return w;
    }
    pos = body + size + (size & 1);
  }
  throw WavError(Kind::kMalformed, path + ": no data chunk");
}

void write_waveform(const std::string &path, const Waveform &w) {
  std::string pcm;
  pcm.reserve(static_cast<std::size_t>(w.samples.size()) * 2);
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) {
    double v = std::round(w.samples(i) * 32768.0);
    v = std::clamp(v, -32768.0, 32767.0);
    PutU16(&pcm, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  std::string out = "RIFF";
  PutU32(&out, static_cast<std::uint32_t>(36 + pcm.size()));
  out += "WAVEfmt ";
  PutU32(&out, 16);
  PutU16(&out, 1);
  PutU16(&out, 1);
  PutU32(&out, static_cast<std::uint32_t>(w.sample_rate));
  PutU32(&out, static_cast<std::uint32_t>(w.sample_rate * 2));
  PutU16(&out, 2);
  PutU16(&out, 16);
  out += "data";
  PutU32(&out, static_cast<std::uint32_t>(pcm.size()));
  out += pcm;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw Error("write failed on " + path);
}

bool predetect_zero_run(const Waveform &w, std::size_t min_run) {
  if (min_run == 0) min_run = 1;
  std::size_t run = 0;
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) {
    if (w.samples(i) == 0.0) {
      if (++run >= min_run) return true;
    } else {
      run = 0;
    }
  }
  return false;
}

FrameSet frame_and_window(const Waveform &w) {
  Eigen::Index n = w.samples.size();
  if (n < kFrameLength)
    throw Error("signal of " + std::to_string(n) +
                " samples is shorter than one 256-sample window");
  static const Eigen::RowVectorXd window =
      hamming_window<double>(kFrameLength).transpose();
  Eigen::Index num_frames = num_frames_for(n);
  FrameSet fs;
  fs.frames.resize(num_frames, kFrameLength);
  for (Eigen::Index f = 0; f < num_frames; ++f)
    fs.frames.row(f) =
        w.samples.segment(f * kFrameShift, kFrameLength).transpose().cwiseProduct(
            window);
  return fs;
}

SpectrumFrames spectrum(const FrameSet &fs) {
  Eigen::FFT<double> fft;
  Eigen::Index num_frames = fs.frames.rows();
  SpectrumFrames out;
  out.power.resize(num_frames, kNumBins);
  out.phase_unwrapped.resize(num_frames, kNumBins);
  std::vector<double> in(kFrameLength);
  std::vector<std::complex<double>> bins;
  Eigen::VectorXd wrapped(kNumBins);
  for (Eigen::Index f = 0; f < num_frames; ++f) {
    for (int i = 0; i < kFrameLength; ++i) in[i] = fs.frames(f, i);
    fft.fwd(bins, in);
    for (int k = 0; k < kNumBins; ++k) {
      const std::complex<double> &x = bins[k];
      out.power(f, k) = std::norm(x);
      // arg(0) is defined as 0.
      wrapped(k) = (x.real() == 0.0 && x.imag() == 0.0) ? 0.0 : std::arg(x);
    }
    out.phase_unwrapped.row(f) = unwrap_phase(wrapped).transpose();
  }
  return out;
}

}  // namespace antispoof

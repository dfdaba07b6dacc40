// Copyright (c) 2026 The SCTTS Authors
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

#include "dsp.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

namespace sctts {

namespace {

constexpr double kPitchMinHz = 50.0;
constexpr double kPitchMaxHz = 500.0;
constexpr double kPitchWindowSec = 0.025;
constexpr double kVoicingRms = 1e-4;
constexpr double kVoicingPeak = 0.5;
// Octave-error guard: a half-period peak this close to the global maximum
// wins, so a strong subharmonic cannot halve the pitch.
constexpr double kPeakTieRatio = 0.9;
constexpr int kMelLiftIters = 40;

// FFTW's planner is not reentrant; plans are created once per size under a
// lock and the (thread-safe) new-array execute API does the per-call work.
struct FftPlans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

FftPlans& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, FftPlans> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* re = fftw_alloc_real(n);
  fftw_complex* co = fftw_alloc_complex(n / 2 + 1);
  FftPlans p;
  p.r2c = fftw_plan_dft_r2c_1d(n, re, co, FFTW_ESTIMATE);
  p.c2r = fftw_plan_dft_c2r_1d(n, co, re, FFTW_ESTIMATE);
  // The dummy planning buffers stay alive with the cached plans.
  return cache.emplace(n, p).first->second;
}

struct FftwReal {
  explicit FftwReal(int n) : ptr(fftw_alloc_real(n)) {}
  ~FftwReal() { fftw_free(ptr); }
  double* ptr;
};
struct FftwComplex {
  explicit FftwComplex(int n) : ptr(fftw_alloc_complex(n)) {}
  ~FftwComplex() { fftw_free(ptr); }
  fftw_complex* ptr;
};

std::vector<double> hann_window(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

// Amplitude-reference gain: with this scale a unit sine's spectral peak is
// about 1, which keeps loud content inside the [floor_db, 0 dB] band the
// normalization maps to [0, 1].
double spectral_scale(const std::vector<double>& win) {
  double sum = 0.0;
  for (double v : win) sum += v;
  return 2.0 / sum;
}

int frame_count(size_t num_samples, int hop) {
  return 1 + static_cast<int>(num_samples / static_cast<size_t>(hop));
}

// Complex STFT of the center-padded signal; flat T x nbins, row-major.
std::vector<std::complex<double>> stft_complex(const std::vector<double>& wave,
                                               const FeatureConfig& cfg) {
  const int n = cfg.fft_size;
  const int nbins = n / 2 + 1;
  const int pad = n / 2;
  const int t_frames = frame_count(wave.size(), cfg.hop);
  const int off = (n - cfg.window) / 2;
  const std::vector<double> win = hann_window(cfg.window);
  const double scale = spectral_scale(win);

  std::vector<double> padded(wave.size() + 2 * static_cast<size_t>(pad), 0.0);
  std::copy(wave.begin(), wave.end(), padded.begin() + pad);

  FftPlans& plans = plans_for(n);
  FftwReal re(n);
  FftwComplex co(nbins);

  std::vector<std::complex<double>> spec(static_cast<size_t>(t_frames) * nbins);
  for (int t = 0; t < t_frames; ++t) {
    std::fill(re.ptr, re.ptr + n, 0.0);
    const size_t base = static_cast<size_t>(t) * cfg.hop + off;
    for (int i = 0; i < cfg.window; ++i) {
      const size_t src = base + i;
      if (src < padded.size()) re.ptr[off + i] = padded[src] * win[i];
    }
    fftw_execute_dft_r2c(plans.r2c, re.ptr, co.ptr);
    for (int k = 0; k < nbins; ++k)
      spec[static_cast<size_t>(t) * nbins + k] = {scale * co.ptr[k][0],
                                                  scale * co.ptr[k][1]};
  }
  return spec;
}

// Weighted overlap-add inverse of stft_complex, trimmed to out_len samples.
std::vector<double> istft(const std::vector<std::complex<double>>& spec, int t_frames,
                          const FeatureConfig& cfg, size_t out_len) {
  const int n = cfg.fft_size;
  const int nbins = n / 2 + 1;
  const int pad = n / 2;
  const int off = (n - cfg.window) / 2;
  const std::vector<double> win = hann_window(cfg.window);
  const double unscale = 1.0 / spectral_scale(win);

  std::vector<double> acc(out_len + 2 * static_cast<size_t>(pad) + n, 0.0);
  std::vector<double> wsum(acc.size(), 0.0);

  FftPlans& plans = plans_for(n);
  FftwReal re(n);
  FftwComplex co(nbins);

  for (int t = 0; t < t_frames; ++t) {
    for (int k = 0; k < nbins; ++k) {
      const auto& v = spec[static_cast<size_t>(t) * nbins + k];
      co.ptr[k][0] = unscale * v.real();
      co.ptr[k][1] = unscale * v.imag();
    }
    fftw_execute_dft_c2r(plans.c2r, co.ptr, re.ptr);
    const size_t base = static_cast<size_t>(t) * cfg.hop + off;
    for (int i = 0; i < cfg.window; ++i) {
      acc[base + i] += re.ptr[off + i] / n * win[i];
      wsum[base + i] += win[i] * win[i];
    }
  }

  std::vector<double> out(out_len, 0.0);
  for (size_t i = 0; i < out_len; ++i) {
    const size_t j = i + pad;
    if (wsum[j] > 1e-9) out[i] = acc[j] / wsum[j];
  }
  return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

void write_u32le(std::ostream& out, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

uint32_t read_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

void FeatureConfig::validate() const {
  if (sample_rate <= 0) fail(ErrorCode::kInvalidArgument, "sample_rate must be positive");
  if (hop <= 0 || window <= 0 || fft_size <= 0)
    fail(ErrorCode::kInvalidArgument, "fft sizes must be positive");
  if (!(hop <= window && window <= fft_size))
    fail(ErrorCode::kInvalidArgument, "need hop <= window <= fft_size");
  if (mel_bins < 1) fail(ErrorCode::kInvalidArgument, "mel_bins must be >= 1");
  if (coarse_factor < 1) fail(ErrorCode::kInvalidArgument, "coarse_factor must be >= 1");
  if (fmin < 0 || fmax <= fmin) fail(ErrorCode::kInvalidArgument, "need 0 <= fmin < fmax");
  if (fmax > sample_rate / 2.0)
    fail(ErrorCode::kInvalidArgument, "fmax exceeds the Nyquist frequency");
  if (floor_db >= 0) fail(ErrorCode::kInvalidArgument, "floor_db must be negative");
  if (griffin_lim_iters < 0) fail(ErrorCode::kInvalidArgument, "griffin_lim_iters must be >= 0");
}

Tensor stft_magnitude(const std::vector<double>& wave, const FeatureConfig& cfg) {
  cfg.validate();
  if (wave.empty()) fail(ErrorCode::kInvalidArgument, "empty waveform");
  const int nbins = cfg.fft_size / 2 + 1;
  const int t_frames = frame_count(wave.size(), cfg.hop);
  const auto spec = stft_complex(wave, cfg);
  Tensor mag(t_frames, nbins);
  for (size_t i = 0; i < spec.size(); ++i) mag.data[i] = std::abs(spec[i]);
  return mag;
}

Tensor mel_filterbank(const FeatureConfig& cfg) {
  cfg.validate();
  const int nbins = cfg.fft_size / 2 + 1;
  const double m_lo = hz_to_mel(cfg.fmin), m_hi = hz_to_mel(cfg.fmax);
  std::vector<double> centers(cfg.mel_bins + 2);
  for (int j = 0; j < cfg.mel_bins + 2; ++j)
    centers[j] = mel_to_hz(m_lo + (m_hi - m_lo) * j / (cfg.mel_bins + 1));

  Tensor fb(cfg.mel_bins, nbins);
  for (int j = 0; j < cfg.mel_bins; ++j) {
    const double lo = centers[j], mid = centers[j + 1], hi = centers[j + 2];
    for (int k = 0; k < nbins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.fft_size;
      double up = (f - lo) / std::max(mid - lo, 1e-9);
      double down = (hi - f) / std::max(hi - mid, 1e-9);
      fb.at(j, k) = std::max(0.0, std::min(up, down));
    }
  }
  return fb;
}

Tensor normalize_mel(const Tensor& amplitude_mel, double floor_db) {
  const double floor_amp = std::pow(10.0, floor_db / 20.0);
  Tensor out(amplitude_mel.rows, amplitude_mel.cols);
  for (size_t i = 0; i < amplitude_mel.data.size(); ++i) {
    const double x = amplitude_mel.data[i];
    if (x < 0) fail(ErrorCode::kInvalidArgument, "negative mel amplitude");
    const double db = 20.0 * std::log10(std::max(x, floor_amp));
    out.data[i] = std::clamp((db - floor_db) / -floor_db, 0.0, 1.0);
  }
  return out;
}

Tensor denormalize_mel(const Tensor& normalized_mel, double floor_db) {
  Tensor out(normalized_mel.rows, normalized_mel.cols);
  for (size_t i = 0; i < normalized_mel.data.size(); ++i) {
    const double v = std::clamp(normalized_mel.data[i], 0.0, 1.0);
    out.data[i] = std::pow(10.0, (v * -floor_db + floor_db) / 20.0);
  }
  return out;
}

MelSpectrogram mel_spectrogram(const std::vector<double>& wave, const FeatureConfig& cfg) {
  Tensor mag = stft_magnitude(wave, cfg);
  Tensor fb = mel_filterbank(cfg);
  Tensor amp(mag.rows, fb.rows);
  mat(amp).noalias() = mat(mag) * mat(fb).transpose();
  // The projection of nonnegative magnitudes is nonnegative; rounding can
  // still leave tiny negatives, which the floor clip would hide anyway.
  for (double& v : amp.data) v = std::max(v, 0.0);
  return MelSpectrogram{normalize_mel(amp, cfg.floor_db), cfg};
}

CoarseMel coarsen(const MelSpectrogram& mel) {
  const int factor = mel.config.coarse_factor;
  const int t_full = mel.values.rows;
  const int t_coarse = (t_full + factor - 1) / factor;
  Tensor out(t_coarse, mel.values.cols);
  for (int t = 0; t < t_coarse; ++t) {
    const int src = (t + 1) * factor - 1;
    if (src < t_full) mat(out).row(t) = mat(mel.values).row(src);
    // else: the group ends inside zero padding, the row stays zero
  }
  return CoarseMel{std::move(out), factor};
}

std::vector<bool> voiced_mask(const MelSpectrogram& mel, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    fail(ErrorCode::kInvalidArgument, "silence threshold must lie in (0, 1)");
  std::vector<bool> mask(mel.values.rows);
  for (int t = 0; t < mel.values.rows; ++t)
    mask[t] = mat(mel.values).row(t).mean() >= threshold;
  return mask;
}

F0Track estimate_f0(const std::vector<double>& wave, const FeatureConfig& cfg) {
  cfg.validate();
  if (wave.empty()) fail(ErrorCode::kInvalidArgument, "empty waveform");
  const int sr = cfg.sample_rate;
  const int wlen = std::max(2, static_cast<int>(std::lround(kPitchWindowSec * sr)));
  const int t_frames = frame_count(wave.size(), cfg.hop);
  const int n = static_cast<int>(wave.size());

  F0Track track;
  track.frame_hop = cfg.hop;
  track.values_hz.assign(t_frames, 0.0);

  const int lag_min = std::max(2, static_cast<int>(sr / kPitchMaxHz));
  // Lags are capped so every correlation uses at least 5 ms of overlap;
  // with the 25 ms window that is exactly enough to reach the 50 Hz edge.
  const int min_overlap = static_cast<int>(std::lround(0.005 * sr));
  std::vector<double> x, r;
  for (int t = 0; t < t_frames; ++t) {
    const int center = t * cfg.hop;
    const int a = std::max(0, center - wlen / 2);
    const int b = std::min(n, center + wlen / 2);
    const int len = b - a;
    if (len < 2 * lag_min) continue;

    x.assign(wave.begin() + a, wave.begin() + b);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / len;
    for (double& v : x) v -= mean;
    double energy = 0.0;
    for (double v : x) energy += v * v;
    if (std::sqrt(energy / len) < kVoicingRms) continue;

    const int lag_max =
        std::min(len - min_overlap, static_cast<int>(std::ceil(sr / kPitchMinHz)));
    if (lag_max <= lag_min) continue;

    // cumulative energy for the normalized correlation denominators
    std::vector<double> csq(len + 1, 0.0);
    for (int i = 0; i < len; ++i) csq[i + 1] = csq[i] + x[i] * x[i];

    // one lag beyond each band edge so edge peaks can still be validated
    const int lag_lo = lag_min - 1;
    const int lag_hi = std::min(lag_max + 1, len - 2);
    r.assign(lag_hi + 1, 0.0);
    for (int lag = lag_lo; lag <= lag_hi; ++lag) {
      double num = 0.0;
      const int m = len - lag;
      for (int i = 0; i < m; ++i) num += x[i] * x[i + lag];
      const double e0 = csq[m] - csq[0];
      const double e1 = csq[len] - csq[lag];
      r[lag] = num / std::sqrt(std::max(e0 * e1, 1e-30));
    }

    int top = lag_min;
    for (int lag = lag_min; lag <= lag_max; ++lag)
      if (r[lag] > r[top]) top = lag;
    // A band-edge slope is not a pitch peak.
    if (top + 1 > lag_hi || r[top] < r[top - 1] || r[top] < r[top + 1]) continue;
    if (r[top] < kVoicingPeak) continue;

    // Subharmonic guard: the global maximum may sit on an integer multiple
    // of the true period. The smallest submultiple whose own peak comes
    // close to the maximum is the fundamental.
    int chosen = top;
    for (int m = top / lag_min; m >= 2; --m) {
      const int approx = static_cast<int>(std::lround(static_cast<double>(top) / m));
      if (approx < lag_min || approx > lag_max) continue;
      const int lo = std::max(lag_min, approx - 2), hi = std::min(lag_max, approx + 2);
      int cand = lo;
      for (int lag = lo; lag <= hi; ++lag)
        if (r[lag] > r[cand]) cand = lag;
      if (r[cand] >= kPeakTieRatio * r[top]) {
        chosen = cand;
        break;
      }
    }

    double lag_refined = chosen;
    if (chosen > lag_lo && chosen < lag_hi) {
      const double denom = r[chosen - 1] - 2.0 * r[chosen] + r[chosen + 1];
      if (std::fabs(denom) > 1e-12) {
        const double delta = 0.5 * (r[chosen - 1] - r[chosen + 1]) / denom;
        lag_refined += std::clamp(delta, -0.5, 0.5);
      }
    }
    track.values_hz[t] = std::clamp(sr / lag_refined, kPitchMinHz, kPitchMaxHz);
  }
  return track;
}

std::vector<double> griffin_lim(const MelSpectrogram& mel, const FeatureConfig& cfg) {
  cfg.validate();
  const int t_frames = mel.values.rows;
  const int nbins = cfg.fft_size / 2 + 1;
  if (mel.values.cols != cfg.mel_bins)
    fail(ErrorCode::kInvalidArgument, "mel bin count does not match config");

  Tensor amp = denormalize_mel(mel.values, cfg.floor_db);
  Tensor fb = mel_filterbank(cfg);

  // Nonnegative least-squares lift of mel amplitudes back to linear
  // magnitudes, by multiplicative updates. A plain pseudo-inverse spreads
  // a tone across every bin its filters touch; the nonnegative solution
  // stays concentrated.
  Tensor target(t_frames, nbins);
  {
    EigenRowMatrix numer = mat(amp) * mat(fb);  // T x nbins, nonnegative
    EigenRowMatrix s = numer;
    for (int it = 0; it < kMelLiftIters; ++it) {
      EigenRowMatrix u = s * mat(fb).transpose();  // back to mel domain
      EigenRowMatrix d = u * mat(fb);
      s.array() *= numer.array() / (d.array() + 1e-12);
    }
    mat(target) = s;
  }

  const size_t out_len = static_cast<size_t>(std::max(0, t_frames - 1)) * cfg.hop;
  if (out_len == 0) return {};

  // zero-phase start: real positive spectra
  std::vector<std::complex<double>> spec(target.data.begin(), target.data.end());
  std::vector<double> wave = istft(spec, t_frames, cfg, out_len);
  for (int it = 0; it < cfg.griffin_lim_iters; ++it) {
    spec = stft_complex(wave, cfg);
    for (size_t i = 0; i < spec.size(); ++i) {
      const double m = std::abs(spec[i]);
      spec[i] = (m > 1e-12) ? spec[i] * (target.data[i] / m)
                            : std::complex<double>(target.data[i], 0.0);
    }
    wave = istft(spec, t_frames, cfg, out_len);
  }
  return wave;
}

void write_mel(const std::string& path, const Tensor& mel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write mel file: " + path);
  out.write("MEL0", 4);
  write_u32le(out, static_cast<uint32_t>(mel.rows));
  write_u32le(out, static_cast<uint32_t>(mel.cols));
  for (double v : mel.data) {
    const float f = static_cast<float>(v);
    static_assert(sizeof(float) == 4);
    char b[4];
    std::memcpy(b, &f, 4);
    out.write(b, 4);
  }
  if (!out) fail(ErrorCode::kIo, "short write: " + path);
}

Tensor read_mel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open mel file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MEL0", 4) != 0)
    fail(ErrorCode::kParse, "bad mel file magic: " + path);
  const uint32_t rows = read_u32le(in);
  const uint32_t cols = read_u32le(in);
  if (!in || rows == 0 || cols == 0 || rows > (1u << 24) || cols > (1u << 16))
    fail(ErrorCode::kParse, "bad mel file header: " + path);
  Tensor t(static_cast<int>(rows), static_cast<int>(cols));
  for (double& v : t.data) {
    char b[4];
    in.read(b, 4);
    float f;
    std::memcpy(&f, b, 4);
    v = f;
  }
  if (!in) fail(ErrorCode::kParse, "truncated mel file: " + path);
  return t;
}

}  // namespace sctts

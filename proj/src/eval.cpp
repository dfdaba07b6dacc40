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

#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "rate.hpp"
#include "wav.hpp"

namespace sctts {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

}  // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(ErrorCode::kInvalidArgument, "length mismatch");
  const size_t n = x.size();
  if (n < 2) return kNaN;
  const double mx = mean_of(x), my = mean_of(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(ErrorCode::kInvalidArgument, "length mismatch");
  const size_t n = x.size();
  if (n < 2) return kNaN;
  const double mx = mean_of(x), my = mean_of(y);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return kNaN;
  return sxy / sxx;
}

double mean_voiced_f0(const std::vector<double>& wave, const FeatureConfig& cfg) {
  const F0Track track = estimate_f0(wave, cfg);
  double sum = 0.0;
  int n = 0;
  for (double f : track.values_hz) {
    if (f > 0.0) {
      sum += f;
      ++n;
    }
  }
  return n > 0 ? sum / n : kNaN;
}

ScatterResult corpus_f0_sr_scatter(const Dataset& ds, const FeatureConfig& cfg,
                                   double lambda) {
  ScatterResult out;
  std::vector<double> xs, ys;
  for (const Utterance& utt : ds.utterances) {
    const WavData wav = read_wav(utt.audio_path);
    if (wav.sample_rate != cfg.sample_rate)
      fail(ErrorCode::kDomain, "sample rate mismatch for " + utt.id);
    const MelSpectrogram mel = mel_spectrogram(wav.samples, cfg);
    const std::vector<bool> vm = voiced_mask(mel, cfg.silence_threshold);
    const int voiced = static_cast<int>(std::count(vm.begin(), vm.end(), true));
    const double f0 = mean_voiced_f0(wav.samples, cfg);
    const int phonemes = static_cast<int>(tokenize_text(utt.text).size());
    if (voiced == 0 || std::isnan(f0)) {
      out.skipped.push_back(utt.id);
      continue;
    }
    ScatterRow row;
    row.utt_id = utt.id;
    row.sr = compute_sr(phonemes, voiced, lambda).r;
    row.mean_f0 = f0;
    out.rows.push_back(row);
    xs.push_back(row.sr);
    ys.push_back(row.mean_f0);
  }
  out.pearson_r = pearson(xs, ys);
  return out;
}

SynthFn checkpoint_synth_fn(const Checkpoint& ckpt, const SynthesisRequest& base) {
  return [&ckpt, base](const std::string& text, double r) {
    SynthesisRequest req = base;
    req.text = text;
    req.sr = r;
    req.length_scale = 0.0;
    const SynthesisResult res = synthesize(req, ckpt);
    return SynthOutput{res.mel.values, res.wave};
  };
}

std::vector<F0SRRow> f0_sr_curve(SynthFn synth, const std::vector<std::string>& texts,
                                 const std::vector<double>& sr_grid,
                                 const FeatureConfig& cfg) {
  if (!synth) fail(ErrorCode::kInvalidArgument, "no synthesis backend");
  if (texts.empty() || sr_grid.empty())
    fail(ErrorCode::kInvalidArgument, "need at least one text and one rate");

  std::vector<F0SRRow> out;
  for (double sr : sr_grid) {
    if (sr <= 0) fail(ErrorCode::kInvalidArgument, "rates must be positive");
    std::vector<double> f0s;
    for (const std::string& text : texts) {
      const SynthOutput s = synth(text, sr);
      const double f0 = mean_voiced_f0(s.wave, cfg);
      if (!std::isnan(f0)) f0s.push_back(f0);
    }
    if (f0s.empty())
      fail(ErrorCode::kDomain,
           "no voiced output at rate " + std::to_string(sr));
    F0SRRow row;
    row.sr = sr;
    row.n = static_cast<int>(f0s.size());
    row.mean_f0 = mean_of(f0s);
    if (row.n > 1) {
      double ss = 0.0;
      for (double f : f0s) ss += (f - row.mean_f0) * (f - row.mean_f0);
      row.ci95 = 1.96 * std::sqrt(ss / (row.n - 1)) / std::sqrt(row.n);
    }
    out.push_back(row);
  }
  return out;
}

LengthControlReport length_control_report(SynthFn synth,
                                          const std::vector<std::string>& texts,
                                          const std::vector<double>& length_scales,
                                          const RateStats& stats, double lambda,
                                          const FeatureConfig& cfg) {
  if (!synth) fail(ErrorCode::kInvalidArgument, "no synthesis backend");
  if (texts.empty() || length_scales.empty())
    fail(ErrorCode::kInvalidArgument, "need at least one text and one scale");

  std::vector<double> scales = length_scales;
  std::sort(scales.begin(), scales.end());

  LengthControlReport report;
  for (size_t ti = 0; ti < texts.size(); ++ti) {
    const std::string& text = texts[ti];
    const std::string text_id = "t" + std::to_string(ti);
    const int phonemes = static_cast<int>(tokenize_text(text).size());
    std::vector<int> voiced_lengths;
    for (double scale : scales) {
      const double requested = length_scale_to_sr(stats, scale);
      const SynthOutput s = synth(text, requested);
      MelSpectrogram mel;
      mel.values = s.mel;
      mel.config = cfg;
      const std::vector<bool> vm = voiced_mask(mel, cfg.silence_threshold);
      const int voiced = static_cast<int>(std::count(vm.begin(), vm.end(), true));
      voiced_lengths.push_back(voiced);
      LengthControlRow row;
      row.text_id = text_id;
      row.requested_r = requested;
      row.achieved_r = voiced > 0 ? compute_sr(phonemes, voiced, lambda).r : kNaN;
      row.rel_error = voiced > 0
                          ? std::abs(row.achieved_r - requested) / requested
                          : kNaN;
      report.rows.push_back(row);
    }
    bool monotone = voiced_lengths.back() > voiced_lengths.front();
    for (size_t i = 1; i < voiced_lengths.size(); ++i)
      if (voiced_lengths[i] < voiced_lengths[i - 1]) monotone = false;
    report.monotone.emplace_back(text_id, monotone);
  }
  return report;
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out.precision(10);
  return out;
}

}  // namespace

void write_scatter_csv(const ScatterResult& result, const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "utt_id,sr,mean_f0\n";
  for (const ScatterRow& r : result.rows)
    out << r.utt_id << ',' << r.sr << ',' << r.mean_f0 << '\n';
  if (!out) fail(ErrorCode::kIo, "short write: " + path);
}

void write_f0_sr_csv(const std::vector<F0SRRow>& rows, const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "sr,mean_f0,ci95,n\n";
  for (const F0SRRow& r : rows)
    out << r.sr << ',' << r.mean_f0 << ',' << r.ci95 << ',' << r.n << '\n';
  if (!out) fail(ErrorCode::kIo, "short write: " + path);
}

void write_length_control_csv(const LengthControlReport& report,
                              const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "text_id,requested_r,achieved_r,rel_error\n";
  for (const LengthControlRow& r : report.rows)
    out << r.text_id << ',' << r.requested_r << ',' << r.achieved_r << ','
        << r.rel_error << '\n';
  if (!out) fail(ErrorCode::kIo, "short write: " + path);
}

}  // namespace sctts

#pragma once

// Labeled fixed-length multichannel time series: in-memory model, CSV
// interchange format, linear resampling, bounded-noise augmentation, and
// deterministic k-fold split plans.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vibclass/rng.hpp"

namespace vibclass {

struct Sample {
  // Channel-major values: values[c * series_length + t].
  std::vector<double> values;
  int num_channels = 0;
  int series_length = 0;
  int label = 0;

  double& at(int c, int t) { return values[static_cast<std::size_t>(c) * series_length + t]; }
  double at(int c, int t) const { return values[static_cast<std::size_t>(c) * series_length + t]; }
};

struct Dataset {
  std::vector<Sample> samples;
  std::vector<std::string> class_names;
  std::vector<std::string> channel_names;
  double sampling_rate_hz = 10000.0;  // metadata only

  int size() const { return static_cast<int>(samples.size()); }
  int num_classes() const { return static_cast<int>(class_names.size()); }
  int num_channels() const { return samples.empty() ? 0 : samples.front().num_channels; }
  int series_length() const { return samples.empty() ? 0 : samples.front().series_length; }

  std::vector<int> labels() const {
    std::vector<int> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].label;
    return out;
  }

  std::vector<int> class_histogram() const {
    std::vector<int> h(class_names.size(), 0);
    for (const auto& s : samples) h[s.label]++;
    return h;
  }

  Dataset subset(const std::vector<int>& indices) const {
    Dataset out;
    out.class_names = class_names;
    out.channel_names = channel_names;
    out.sampling_rate_hz = sampling_rate_hz;
    out.samples.reserve(indices.size());
    for (int i : indices) {
      if (i < 0 || i >= size()) throw std::out_of_range("Dataset::subset: index out of range");
      out.samples.push_back(samples[i]);
    }
    return out;
  }

  void validate() const {
    const int nc = num_channels();
    const int sl = series_length();
    if (!samples.empty() && static_cast<int>(channel_names.size()) != nc)
      throw std::invalid_argument("Dataset: channel_names size does not match sample channels");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Sample& s = samples[i];
      if (s.num_channels != nc || s.series_length != sl)
        throw std::invalid_argument("Dataset: inconsistent sample shape at index " + std::to_string(i));
      if (s.values.size() != static_cast<std::size_t>(nc) * sl)
        throw std::invalid_argument("Dataset: value buffer size mismatch at index " + std::to_string(i));
      if (s.label < 0 || s.label >= num_classes())
        throw std::invalid_argument("Dataset: label out of range at index " + std::to_string(i));
      for (double v : s.values)
        if (!std::isfinite(v))
          throw std::invalid_argument("Dataset: non-finite value in sample " + std::to_string(i));
    }
  }
};

inline std::vector<std::string> default_channel_names(int num_channels) {
  if (num_channels == 3) return {"x", "y", "z"};
  std::vector<std::string> names(num_channels);
  for (int c = 0; c < num_channels; ++c) names[c] = "ch" + std::to_string(c);
  return names;
}

inline std::vector<std::string> generic_class_names(int num_classes) {
  std::vector<std::string> names(num_classes);
  for (int k = 0; k < num_classes; ++k) names[k] = "class_" + std::to_string(k);
  return names;
}

namespace detail {

inline std::string format_double(double v) {
  // 17 significant digits round-trip any finite double.
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_csv_line(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

// CSV layout: header `label,<c0>_0,...,<c0>_{L-1},<c1>_0,...`, one row per
// sample, values with 17 significant digits.
inline void save_csv(const Dataset& dataset, const std::string& path) {
  if (dataset.samples.empty()) throw std::invalid_argument("save_csv: dataset is empty");
  dataset.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("I/O error: cannot open '" + path + "' for writing");

  const int C = dataset.num_channels();
  const int L = dataset.series_length();
  std::string header = "label";
  for (int c = 0; c < C; ++c)
    for (int t = 0; t < L; ++t) header += "," + dataset.channel_names[c] + "_" + std::to_string(t);
  out << header << "\n";

  std::string line;
  for (const Sample& s : dataset.samples) {
    line.clear();
    line += std::to_string(s.label);
    for (double v : s.values) {
      line += ',';
      line += detail::format_double(v);
    }
    out << line << "\n";
  }
  if (!out) throw std::runtime_error("I/O error: write failed for '" + path + "'");
}

inline Dataset load_csv(const std::string& path, int series_length, int num_channels) {
  if (series_length < 1 || num_channels < 1)
    throw std::invalid_argument("load_csv: series_length and num_channels must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("I/O error: cannot open '" + path + "'");

  const int expected_cols = 1 + num_channels * series_length;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("format error: '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string_view> fields;
  detail::split_csv_line(line, fields);
  if (static_cast<int>(fields.size()) != expected_cols)
    throw std::runtime_error("dimension error: header has " + std::to_string(fields.size()) +
                             " columns, expected " + std::to_string(expected_cols));
  if (fields[0] != "label")
    throw std::runtime_error("format error: column 1 is '" + std::string(fields[0]) + "', expected 'label'");

  std::vector<std::string> channel_names(num_channels);
  for (int c = 0; c < num_channels; ++c) {
    for (int t = 0; t < series_length; ++t) {
      const std::string_view tok = fields[1 + c * series_length + t];
      const std::size_t us = tok.rfind('_');
      const std::string col_desc = "column " + std::to_string(2 + c * series_length + t) +
                                   " ('" + std::string(tok) + "')";
      if (us == std::string_view::npos || us == 0)
        throw std::runtime_error("format error: " + col_desc + " is not of the form <channel>_<t>");
      int idx = -1;
      const auto [p, ec] = std::from_chars(tok.data() + us + 1, tok.data() + tok.size(), idx);
      if (ec != std::errc() || p != tok.data() + tok.size() || idx != t)
        throw std::runtime_error("format error: " + col_desc + " should have time index " + std::to_string(t));
      const std::string name(tok.substr(0, us));
      if (t == 0)
        channel_names[c] = name;
      else if (name != channel_names[c])
        throw std::runtime_error("format error: " + col_desc + " does not match channel '" +
                                 channel_names[c] + "'");
    }
  }

  Dataset ds;
  ds.channel_names = channel_names;
  int max_label = -1;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    detail::split_csv_line(line, fields);
    if (static_cast<int>(fields.size()) != expected_cols)
      throw std::runtime_error("dimension error: row " + std::to_string(row) + " has " +
                               std::to_string(fields.size()) + " columns, expected " +
                               std::to_string(expected_cols));
    Sample s;
    s.num_channels = num_channels;
    s.series_length = series_length;
    s.values.resize(static_cast<std::size_t>(num_channels) * series_length);
    {
      const std::string_view tok = fields[0];
      const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), s.label);
      if (ec != std::errc() || p != tok.data() + tok.size() || s.label < 0)
        throw std::runtime_error("parse error at row " + std::to_string(row) +
                                 " column 1: bad label '" + std::string(tok) + "'");
    }
    for (int j = 1; j < expected_cols; ++j) {
      const std::string_view tok = fields[j];
      double v = 0.0;
      const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size())
        throw std::runtime_error("parse error at row " + std::to_string(row) + " column " +
                                 std::to_string(j + 1) + ": '" + std::string(tok) + "'");
      s.values[j - 1] = v;
    }
    max_label = std::max(max_label, s.label);
    ds.samples.push_back(std::move(s));
  }
  ds.class_names = generic_class_names(max_label + 1);
  ds.validate();
  return ds;
}

// Per channel, output j interpolates the input at position j*(L-1)/(T-1);
// endpoints are copied exactly.
inline Sample resample_linear(const Sample& sample, int target_length) {
  if (sample.series_length < 2) throw std::invalid_argument("resample_linear: series_length must be >= 2");
  if (target_length < 2) throw std::invalid_argument("resample_linear: target_length must be >= 2");
  Sample out;
  out.num_channels = sample.num_channels;
  out.series_length = target_length;
  out.label = sample.label;
  out.values.resize(static_cast<std::size_t>(sample.num_channels) * target_length);
  const int L = sample.series_length;
  const int T = target_length;
  for (int c = 0; c < sample.num_channels; ++c) {
    for (int j = 0; j < T; ++j) {
      if (j == 0) {
        out.at(c, j) = sample.at(c, 0);
        continue;
      }
      if (j == T - 1) {
        out.at(c, j) = sample.at(c, L - 1);
        continue;
      }
      const double pos = static_cast<double>(j) * (L - 1) / (T - 1);
      const int lo = static_cast<int>(pos);
      const double frac = pos - lo;
      out.at(c, j) = sample.at(c, lo) + frac * (sample.at(c, lo + 1) - sample.at(c, lo));
    }
  }
  return out;
}

inline Dataset resample_linear(const Dataset& dataset, int target_length) {
  Dataset out;
  out.class_names = dataset.class_names;
  out.channel_names = dataset.channel_names;
  out.sampling_rate_hz = dataset.sampling_rate_hz;
  out.samples.reserve(dataset.samples.size());
  for (const Sample& s : dataset.samples) out.samples.push_back(resample_linear(s, target_length));
  return out;
}

// Adds iid uniform noise from [-amplitude, +amplitude] to every value.
inline Dataset augment_bounded_noise(const Dataset& dataset, double amplitude, std::uint64_t seed) {
  if (amplitude < 0.0) throw std::invalid_argument("augment_bounded_noise: amplitude must be >= 0");
  Dataset out = dataset;
  Rng rng(Rng::mix(seed, 0xB0DEDULL));
  for (Sample& s : out.samples)
    for (double& v : s.values) v += amplitude * (2.0 * rng.uniform01() - 1.0);
  return out;
}

struct Fold {
  std::vector<int> train_indices;
  std::vector<int> val_indices;
  std::vector<int> test_indices;
};

struct SplitPlan {
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  double val_fraction = 0.1;
  double test_fraction = 0.2;
  bool stratified = true;
};

namespace detail {

// Blocks b_k = round(k * n * f) tile a prefix of the group; block sizes differ
// by at most one between folds.
inline int block_boundary(int k, int n, double fraction) {
  return static_cast<int>(std::llround(static_cast<double>(k) * n * fraction));
}

inline void split_group(const std::vector<int>& group, int num_folds, double val_fraction,
                        double test_fraction, std::vector<Fold>& folds) {
  const int n = static_cast<int>(group.size());
  for (int k = 0; k < num_folds; ++k) {
    const int lo = block_boundary(k, n, test_fraction);
    const int hi = block_boundary(k + 1, n, test_fraction);
    auto& fold = folds[k];
    for (int i = lo; i < hi; ++i) fold.test_indices.push_back(group[i]);
    std::vector<int> remaining;
    remaining.reserve(n - (hi - lo));
    for (int i = 0; i < n; ++i)
      if (i < lo || i >= hi) remaining.push_back(group[i]);
    int val_n = static_cast<int>(std::llround(val_fraction * n));
    val_n = std::min(val_n, static_cast<int>(remaining.size()));
    for (int i = 0; i < static_cast<int>(remaining.size()); ++i) {
      if (i < val_n)
        fold.val_indices.push_back(remaining[i]);
      else
        fold.train_indices.push_back(remaining[i]);
    }
  }
}

}  // namespace detail

// One seed-shuffled global permutation; fold k's test set is the k-th
// contiguous block (per class when stratified), the remainder splits into
// val (front) and train.
inline SplitPlan make_split_plan(const Dataset& dataset, int num_folds,
                                 double train_fraction, double val_fraction, double test_fraction,
                                 std::uint64_t seed, bool stratified) {
  if (dataset.samples.empty()) throw std::invalid_argument("make_split_plan: dataset is empty");
  if (num_folds < 1) throw std::invalid_argument("make_split_plan: num_folds must be positive");
  const double total = train_fraction + val_fraction + test_fraction;
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("make_split_plan: fractions must sum to 1");
  if (train_fraction < 0 || val_fraction < 0 || test_fraction <= 0)
    throw std::invalid_argument("make_split_plan: fractions must be nonnegative with test > 0");
  if (static_cast<double>(num_folds) * test_fraction > 1.0 + 1e-9)
    throw std::invalid_argument("make_split_plan: num_folds * test_fraction exceeds 1");

  const int n = dataset.size();
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  Rng rng(Rng::mix(seed, 0x5B117ULL));
  rng.shuffle(perm);

  SplitPlan plan;
  plan.folds.assign(num_folds, Fold{});
  plan.seed = seed;
  plan.train_fraction = train_fraction;
  plan.val_fraction = val_fraction;
  plan.test_fraction = test_fraction;
  plan.stratified = stratified;

  if (stratified) {
    // Per-class subsequences of the one global permutation.
    const int K = dataset.num_classes();
    std::vector<std::vector<int>> by_class(K);
    for (int i : perm) by_class[dataset.samples[i].label].push_back(i);
    for (const auto& group : by_class)
      detail::split_group(group, num_folds, val_fraction, test_fraction, plan.folds);
  } else {
    detail::split_group(perm, num_folds, val_fraction, test_fraction, plan.folds);
  }

  for (auto& fold : plan.folds) {
    std::sort(fold.train_indices.begin(), fold.train_indices.end());
    std::sort(fold.val_indices.begin(), fold.val_indices.end());
    std::sort(fold.test_indices.begin(), fold.test_indices.end());
  }
  return plan;
}

inline SplitPlan make_split_plan(const Dataset& dataset, int num_folds, std::uint64_t seed,
                                 bool stratified = true) {
  return make_split_plan(dataset, num_folds, 0.7, 0.1, 0.2, seed, stratified);
}

}  // namespace vibclass

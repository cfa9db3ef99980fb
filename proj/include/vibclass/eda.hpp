#pragma once

// Exploratory statistics: per-sample channel mean/variance/range and
// class-conditional mean/variance curves. Population (1/N) variance
// throughout.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vibclass/dataset.hpp"

namespace vibclass {

struct ChannelStats {
  // Row i holds the statistics of sample i, one column per channel.
  int num_samples = 0;
  int num_channels = 0;
  std::vector<double> per_sample_mean;
  std::vector<double> per_sample_variance;
  std::vector<double> per_sample_range;

  double mean(int i, int c) const { return per_sample_mean[static_cast<std::size_t>(i) * num_channels + c]; }
  double variance(int i, int c) const { return per_sample_variance[static_cast<std::size_t>(i) * num_channels + c]; }
  double range(int i, int c) const { return per_sample_range[static_cast<std::size_t>(i) * num_channels + c]; }
};

struct ClassStats {
  // (num_classes x num_channels x series_length) curves.
  int num_classes = 0;
  int num_channels = 0;
  int series_length = 0;
  std::vector<double> class_mean_curves;
  std::vector<double> class_var_curves;

  std::size_t offset(int k, int c, int t) const {
    return (static_cast<std::size_t>(k) * num_channels + c) * series_length + t;
  }
  double mean(int k, int c, int t) const { return class_mean_curves[offset(k, c, t)]; }
  double variance(int k, int c, int t) const { return class_var_curves[offset(k, c, t)]; }
};

inline ChannelStats channel_stats(const Dataset& dataset) {
  if (dataset.samples.empty()) throw std::invalid_argument("channel_stats: dataset is empty");
  ChannelStats stats;
  stats.num_samples = dataset.size();
  stats.num_channels = dataset.num_channels();
  const std::size_t cells = static_cast<std::size_t>(stats.num_samples) * stats.num_channels;
  stats.per_sample_mean.resize(cells);
  stats.per_sample_variance.resize(cells);
  stats.per_sample_range.resize(cells);

  const int L = dataset.series_length();
  for (int i = 0; i < stats.num_samples; ++i) {
    const Sample& s = dataset.samples[i];
    for (int c = 0; c < stats.num_channels; ++c) {
      double sum = 0.0, lo = s.at(c, 0), hi = s.at(c, 0);
      for (int t = 0; t < L; ++t) {
        const double v = s.at(c, t);
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double mean = sum / L;
      double sq = 0.0;
      for (int t = 0; t < L; ++t) {
        const double d = s.at(c, t) - mean;
        sq += d * d;
      }
      const std::size_t o = static_cast<std::size_t>(i) * stats.num_channels + c;
      stats.per_sample_mean[o] = mean;
      stats.per_sample_variance[o] = sq / L;
      stats.per_sample_range[o] = hi - lo;
    }
  }
  return stats;
}

inline ClassStats class_stats(const Dataset& dataset) {
  if (dataset.samples.empty()) throw std::invalid_argument("class_stats: dataset is empty");
  const auto histogram = dataset.class_histogram();
  for (std::size_t k = 0; k < histogram.size(); ++k)
    if (histogram[k] < 2)
      throw std::invalid_argument("class_stats: class " + std::to_string(k) + " has fewer than 2 samples");

  ClassStats stats;
  stats.num_classes = dataset.num_classes();
  stats.num_channels = dataset.num_channels();
  stats.series_length = dataset.series_length();
  const std::size_t cells =
      static_cast<std::size_t>(stats.num_classes) * stats.num_channels * stats.series_length;
  stats.class_mean_curves.assign(cells, 0.0);
  stats.class_var_curves.assign(cells, 0.0);

  for (const Sample& s : dataset.samples)
    for (int c = 0; c < stats.num_channels; ++c)
      for (int t = 0; t < stats.series_length; ++t)
        stats.class_mean_curves[stats.offset(s.label, c, t)] += s.at(c, t);
  for (int k = 0; k < stats.num_classes; ++k)
    for (int c = 0; c < stats.num_channels; ++c)
      for (int t = 0; t < stats.series_length; ++t)
        stats.class_mean_curves[stats.offset(k, c, t)] /= histogram[k];

  for (const Sample& s : dataset.samples)
    for (int c = 0; c < stats.num_channels; ++c)
      for (int t = 0; t < stats.series_length; ++t) {
        const double d = s.at(c, t) - stats.class_mean_curves[stats.offset(s.label, c, t)];
        stats.class_var_curves[stats.offset(s.label, c, t)] += d * d;
      }
  for (int k = 0; k < stats.num_classes; ++k)
    for (int c = 0; c < stats.num_channels; ++c)
      for (int t = 0; t < stats.series_length; ++t)
        stats.class_var_curves[stats.offset(k, c, t)] /= histogram[k];

  return stats;
}

// Long-format CSV: entity,channel,index,statistic,value. For per-sample
// statistics `entity` is the sample index and `index` is 0; for class curves
// `entity` is the class id and `index` is the time index.
inline void export_stats(const ChannelStats& stats, const std::vector<std::string>& channel_names,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("I/O error: cannot open '" + path + "' for writing");
  out << "entity,channel,index,statistic,value\n";
  static const char* kNames[3] = {"mean", "variance", "range"};
  for (int i = 0; i < stats.num_samples; ++i)
    for (int c = 0; c < stats.num_channels; ++c) {
      const double vals[3] = {stats.mean(i, c), stats.variance(i, c), stats.range(i, c)};
      for (int s = 0; s < 3; ++s)
        out << i << ',' << channel_names[c] << ",0," << kNames[s] << ','
            << detail::format_double(vals[s]) << "\n";
    }
  if (!out) throw std::runtime_error("I/O error: write failed for '" + path + "'");
}

inline void export_stats(const ClassStats& stats, const std::vector<std::string>& channel_names,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("I/O error: cannot open '" + path + "' for writing");
  out << "entity,channel,index,statistic,value\n";
  for (int k = 0; k < stats.num_classes; ++k)
    for (int c = 0; c < stats.num_channels; ++c)
      for (int t = 0; t < stats.series_length; ++t) {
        out << k << ',' << channel_names[c] << ',' << t << ",class_mean,"
            << detail::format_double(stats.mean(k, c, t)) << "\n";
        out << k << ',' << channel_names[c] << ',' << t << ",class_variance,"
            << detail::format_double(stats.variance(k, c, t)) << "\n";
      }
  if (!out) throw std::runtime_error("I/O error: write failed for '" + path + "'");
}

}  // namespace vibclass

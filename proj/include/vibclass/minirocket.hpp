#pragma once

// MiniRocket feature transform: the fixed set of 84 length-9 kernels with
// weights in {-1, 2}, an exponential dilation schedule capped at 32 dilations
// per kernel, biases drawn from quantiles of the convolution output of one
// random training example, and PPV pooling. Multivariate series are handled
// by summing convolution outputs over a per-(kernel, dilation) channel
// subset.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vibclass/dataset.hpp"
#include "vibclass/rng.hpp"

namespace vibclass {

constexpr int kKernelLength = 9;
constexpr int kNumKernels = 84;  // C(9,3)

struct KernelSet {
  // kernels[k][j] in {-1, 2}; exactly three entries are 2. Row order is the
  // lexicographic order of the 2-position subsets.
  std::vector<std::array<double, kKernelLength>> kernels;
};

inline KernelSet enumerate_kernels() {
  KernelSet set;
  set.kernels.reserve(kNumKernels);
  for (int a = 0; a < kKernelLength; ++a)
    for (int b = a + 1; b < kKernelLength; ++b)
      for (int c = b + 1; c < kKernelLength; ++c) {
        std::array<double, kKernelLength> w;
        w.fill(-1.0);
        w[a] = w[b] = w[c] = 2.0;
        set.kernels.push_back(w);
      }
  return set;
}

struct TransformConfig {
  int num_features = 9996;  // rounded down to a multiple of 84 at fit time
  int max_dilations_per_kernel = 32;
  std::uint64_t seed = 0;
};

struct FittedTransform {
  int input_length = 0;
  int num_channels = 0;
  int num_features = 0;
  std::uint64_t seed = 0;
  std::vector<int> dilations;            // distinct, ascending
  std::vector<int> biases_per_dilation;  // per kernel, sums to features/kernel
  // Per (kernel, dilation) pair, kernel-major then dilation.
  std::vector<std::vector<int>> channel_subsets;
  std::vector<bool> paddings;  // same-padding on/off, alternating
  std::vector<double> biases;  // one per output feature, column order

  int num_pairs() const { return kNumKernels * static_cast<int>(dilations.size()); }
  int features_per_kernel() const {
    int total = 0;
    for (int m : biases_per_dilation) total += m;
    return total;
  }
};

struct FeatureMatrix {
  int num_samples = 0;
  int num_features = 0;
  std::vector<double> data;  // row-major (num_samples x num_features)

  double at(int i, int j) const { return data[static_cast<std::size_t>(i) * num_features + j]; }
  double& at(int i, int j) { return data[static_cast<std::size_t>(i) * num_features + j]; }
};

namespace detail {

// d_i = floor(2^(i*alpha)) for i in [0, max_dilations), alpha scaled so the
// last slot reaches the largest dilation whose receptive field fits.
inline std::vector<int> dilation_schedule(int input_length, int max_dilations_per_kernel) {
  const int max_d = (input_length - 1) / (kKernelLength - 1);
  if (max_d < 1)
    throw std::invalid_argument("minirocket: series_length must be at least " +
                                std::to_string(kKernelLength));
  std::vector<int> out;
  if (max_dilations_per_kernel == 1 || max_d == 1) {
    out.push_back(1);
    return out;
  }
  const double alpha = std::log2(static_cast<double>(max_d)) / (max_dilations_per_kernel - 1);
  for (int i = 0; i < max_dilations_per_kernel; ++i) {
    const int d = static_cast<int>(std::floor(std::pow(2.0, alpha * i)));
    if (out.empty() || d != out.back()) out.push_back(d);
  }
  return out;
}

// Dilated valid/same cross-correlation of `series` with one kernel; same
// padding inserts 4*d virtual zeros on each side.
inline void convolve(const std::vector<double>& series, const std::array<double, kKernelLength>& w,
                     int dilation, bool padding, std::vector<double>& out) {
  const int L = static_cast<int>(series.size());
  const int span = (kKernelLength - 1) * dilation;
  const int pad = padding ? span / 2 : 0;
  const int out_len = L + 2 * pad - span;
  out.resize(out_len);
  for (int i = 0; i < out_len; ++i) {
    double acc = 0.0;
    const int base = i - pad;
    for (int j = 0; j < kKernelLength; ++j) {
      const int pos = base + j * dilation;
      if (pos >= 0 && pos < L) acc += w[j] * series[pos];
    }
    out[i] = acc;
  }
}

// Linear-interpolation quantile of a sorted vector.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  const int n = static_cast<int>(sorted.size());
  if (n == 1) return sorted[0];
  const double pos = q * (n - 1);
  const int lo = static_cast<int>(pos);
  const int hi = std::min(lo + 1, n - 1);
  const double frac = pos - lo;
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline void sum_channels(const Sample& s, const std::vector<int>& subset, std::vector<double>& out) {
  const int L = s.series_length;
  out.assign(L, 0.0);
  for (int c : subset)
    for (int t = 0; t < L; ++t) out[t] += s.at(c, t);
}

}  // namespace detail

// Deterministic in (dataset, config): one RNG stream drives, per
// (kernel, dilation) pair in kernel-major order, the training-example draw
// and the channel-subset draw. Biases are the (m+1)/(M+1) quantiles of that
// example's convolution output.
inline FittedTransform fit(const Dataset& dataset, const TransformConfig& config) {
  if (dataset.samples.empty()) throw std::invalid_argument("minirocket fit: dataset is empty");
  if (config.num_features < kNumKernels)
    throw std::invalid_argument("minirocket fit: num_features must be at least 84");
  const int L = dataset.series_length();
  const int C = dataset.num_channels();

  FittedTransform fitted;
  fitted.input_length = L;
  fitted.num_channels = C;
  fitted.seed = config.seed;
  fitted.dilations = detail::dilation_schedule(L, config.max_dilations_per_kernel);

  const int nd = static_cast<int>(fitted.dilations.size());
  const int per_kernel = config.num_features / kNumKernels;
  fitted.num_features = per_kernel * kNumKernels;
  fitted.biases_per_dilation.assign(nd, per_kernel / nd);
  for (int i = 0; i < per_kernel % nd; ++i) fitted.biases_per_dilation[i]++;

  const KernelSet kernels = enumerate_kernels();
  Rng rng(Rng::mix(config.seed, 0x30CCE7ULL));
  fitted.channel_subsets.resize(fitted.num_pairs());
  fitted.paddings.resize(fitted.num_pairs());
  fitted.biases.reserve(fitted.num_features);

  std::vector<double> series, conv;
  std::vector<int> channels(C);
  for (int k = 0; k < kNumKernels; ++k) {
    for (int di = 0; di < nd; ++di) {
      const int pair = k * nd + di;
      const int example = static_cast<int>(rng.uniform_int(dataset.size()));
      const int subset_size = 1 + static_cast<int>(rng.uniform_int(C));
      for (int c = 0; c < C; ++c) channels[c] = c;
      for (int c = 0; c < subset_size; ++c) {
        const int j = c + static_cast<int>(rng.uniform_int(C - c));
        std::swap(channels[c], channels[j]);
      }
      std::vector<int> subset(channels.begin(), channels.begin() + subset_size);
      std::sort(subset.begin(), subset.end());
      fitted.channel_subsets[pair] = subset;
      fitted.paddings[pair] = (pair % 2 == 0);

      detail::sum_channels(dataset.samples[example], subset, series);
      detail::convolve(series, kernels.kernels[k], fitted.dilations[di], fitted.paddings[pair], conv);
      std::sort(conv.begin(), conv.end());
      const int M = fitted.biases_per_dilation[di];
      for (int m = 0; m < M; ++m)
        fitted.biases.push_back(detail::quantile_sorted(conv, static_cast<double>(m + 1) / (M + 1)));
    }
  }
  return fitted;
}

// Feature (i, j) is the fraction of convolution outputs strictly greater
// than the bias of column j; ties count as negative.
inline FeatureMatrix transform(const FittedTransform& fitted, const Dataset& dataset) {
  if (dataset.samples.empty()) throw std::invalid_argument("minirocket transform: dataset is empty");
  if (dataset.series_length() != fitted.input_length || dataset.num_channels() != fitted.num_channels)
    throw std::invalid_argument("minirocket transform: dataset shape does not match fitted transform");

  const KernelSet kernels = enumerate_kernels();
  const int nd = static_cast<int>(fitted.dilations.size());
  FeatureMatrix fm;
  fm.num_samples = dataset.size();
  fm.num_features = fitted.num_features;
  fm.data.resize(static_cast<std::size_t>(fm.num_samples) * fm.num_features);

  std::vector<double> series, conv;
  for (int i = 0; i < fm.num_samples; ++i) {
    const Sample& s = dataset.samples[i];
    int col = 0;
    const double* bias = fitted.biases.data();
    for (int k = 0; k < kNumKernels; ++k) {
      for (int di = 0; di < nd; ++di) {
        const int pair = k * nd + di;
        detail::sum_channels(s, fitted.channel_subsets[pair], series);
        detail::convolve(series, kernels.kernels[k], fitted.dilations[di], fitted.paddings[pair], conv);
        const int M = fitted.biases_per_dilation[di];
        const double inv_len = 1.0 / static_cast<double>(conv.size());
        for (int m = 0; m < M; ++m) {
          const double b = bias[m];
          int count = 0;
          for (double v : conv)
            if (v > b) ++count;
          fm.at(i, col++) = count * inv_len;
        }
        bias += M;
      }
    }
  }
  return fm;
}

inline nlohmann::json to_json(const FittedTransform& fitted) {
  nlohmann::json pairs = nlohmann::json::array();
  for (int p = 0; p < fitted.num_pairs(); ++p)
    pairs.push_back({{"channels", fitted.channel_subsets[p]}, {"padding", static_cast<bool>(fitted.paddings[p])}});
  return nlohmann::json{{"format", "vibclass.minirocket"},
                        {"version", 1},
                        {"input_length", fitted.input_length},
                        {"num_channels", fitted.num_channels},
                        {"num_features", fitted.num_features},
                        {"seed", fitted.seed},
                        {"dilations", fitted.dilations},
                        {"biases_per_dilation", fitted.biases_per_dilation},
                        {"pairs", pairs},
                        {"biases", fitted.biases}};
}

inline FittedTransform fitted_transform_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "vibclass.minirocket" || j.value("version", 0) != 1)
    throw std::runtime_error("minirocket: unrecognized transform artifact");
  FittedTransform fitted;
  fitted.input_length = j.at("input_length").get<int>();
  fitted.num_channels = j.at("num_channels").get<int>();
  fitted.num_features = j.at("num_features").get<int>();
  fitted.seed = j.at("seed").get<std::uint64_t>();
  fitted.dilations = j.at("dilations").get<std::vector<int>>();
  fitted.biases_per_dilation = j.at("biases_per_dilation").get<std::vector<int>>();
  for (const auto& p : j.at("pairs")) {
    fitted.channel_subsets.push_back(p.at("channels").get<std::vector<int>>());
    fitted.paddings.push_back(p.at("padding").get<bool>());
  }
  fitted.biases = j.at("biases").get<std::vector<double>>();
  if (fitted.num_pairs() != static_cast<int>(fitted.channel_subsets.size()))
    throw std::runtime_error("minirocket: inconsistent transform artifact");
  return fitted;
}

inline void save_transform(const FittedTransform& fitted, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("I/O error: cannot open '" + path + "' for writing");
  out << to_json(fitted).dump(2) << "\n";
}

inline FittedTransform load_transform(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("I/O error: cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return fitted_transform_from_json(j);
}

}  // namespace vibclass

#pragma once

// Synthetic planetary-gearbox-style vibration data. Classes differ by their
// per-channel noise level and by a harmonic signature at a class-specific
// fundamental; phases are random per sample so segmentation offset carries no
// information.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vibclass/dataset.hpp"
#include "vibclass/rng.hpp"

namespace vibclass {

struct GenConfig {
  int num_classes = 5;
  int samples_per_class = 100;
  int series_length = 200;
  int num_channels = 3;
  std::vector<double> base_freqs_hz = {120.0, 160.0, 200.0, 240.0, 280.0};
  // Row = class, column = channel. Orderings across classes must be strict
  // per channel so variance-ordering checks are well-defined.
  std::vector<std::vector<double>> class_channel_stddev = {
      {3.00, 1.30, 4.40},
      {2.40, 1.70, 1.40},
      {1.90, 2.20, 3.40},
      {1.50, 2.80, 1.90},
      {1.20, 3.60, 2.60},
  };
  std::vector<double> harmonic_amps = {0.6, 0.3};
  double sampling_rate_hz = 10000.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (num_classes < 1 || samples_per_class < 1 || series_length < 1 || num_channels < 1)
      throw std::invalid_argument("GenConfig: sizes must be positive");
    if (sampling_rate_hz <= 0) throw std::invalid_argument("GenConfig: sampling_rate_hz must be positive");
    if (static_cast<int>(base_freqs_hz.size()) != num_classes)
      throw std::invalid_argument("GenConfig: base_freqs_hz must have one entry per class");
    for (double f : base_freqs_hz)
      if (f <= 0) throw std::invalid_argument("GenConfig: base frequencies must be positive");
    if (static_cast<int>(class_channel_stddev.size()) != num_classes)
      throw std::invalid_argument("GenConfig: class_channel_stddev must have num_classes rows");
    for (const auto& row : class_channel_stddev) {
      if (static_cast<int>(row.size()) != num_channels)
        throw std::invalid_argument("GenConfig: class_channel_stddev rows must have num_channels entries");
      for (double s : row)
        if (s <= 0) throw std::invalid_argument("GenConfig: stddevs must be positive");
    }
    for (int ch = 0; ch < num_channels; ++ch)
      for (int a = 0; a < num_classes; ++a)
        for (int b = a + 1; b < num_classes; ++b)
          if (class_channel_stddev[a][ch] == class_channel_stddev[b][ch])
            throw std::invalid_argument("GenConfig: stddev tie in channel " + std::to_string(ch));
    for (double a : harmonic_amps)
      if (a < 0) throw std::invalid_argument("GenConfig: harmonic amplitudes must be >= 0");
  }
};

inline void to_json(nlohmann::json& j, const GenConfig& c) {
  j = nlohmann::json{{"num_classes", c.num_classes},
                     {"samples_per_class", c.samples_per_class},
                     {"series_length", c.series_length},
                     {"num_channels", c.num_channels},
                     {"base_freqs_hz", c.base_freqs_hz},
                     {"class_channel_stddev", c.class_channel_stddev},
                     {"harmonic_amps", c.harmonic_amps},
                     {"sampling_rate_hz", c.sampling_rate_hz},
                     {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, GenConfig& c) {
  GenConfig def;
  c.num_classes = j.value("num_classes", def.num_classes);
  c.samples_per_class = j.value("samples_per_class", def.samples_per_class);
  c.series_length = j.value("series_length", def.series_length);
  c.num_channels = j.value("num_channels", def.num_channels);
  c.base_freqs_hz = j.value("base_freqs_hz", def.base_freqs_hz);
  c.class_channel_stddev = j.value("class_channel_stddev", def.class_channel_stddev);
  c.harmonic_amps = j.value("harmonic_amps", def.harmonic_amps);
  c.sampling_rate_hz = j.value("sampling_rate_hz", def.sampling_rate_hz);
  c.seed = j.value("seed", def.seed);
}

// Each sample draws from its own stream keyed by (seed, global sample index),
// so generation order (or parallelism) cannot change the output.
inline Dataset generate(const GenConfig& config) {
  config.validate();
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  Dataset ds;
  ds.class_names = generic_class_names(config.num_classes);
  ds.channel_names = default_channel_names(config.num_channels);
  ds.sampling_rate_hz = config.sampling_rate_hz;
  ds.samples.reserve(static_cast<std::size_t>(config.num_classes) * config.samples_per_class);

  const int H = static_cast<int>(config.harmonic_amps.size());
  std::vector<double> phases(H);
  for (int cls = 0; cls < config.num_classes; ++cls) {
    const double f0 = config.base_freqs_hz[cls];
    for (int s = 0; s < config.samples_per_class; ++s) {
      const std::uint64_t global_index =
          static_cast<std::uint64_t>(cls) * config.samples_per_class + s;
      Rng rng(Rng::mix(config.seed, global_index));
      for (int h = 0; h < H; ++h) phases[h] = rng.uniform(0.0, kTwoPi);

      Sample sample;
      sample.num_channels = config.num_channels;
      sample.series_length = config.series_length;
      sample.label = cls;
      sample.values.resize(static_cast<std::size_t>(config.num_channels) * config.series_length);
      for (int ch = 0; ch < config.num_channels; ++ch) {
        const double sigma = config.class_channel_stddev[cls][ch];
        for (int t = 0; t < config.series_length; ++t) {
          double v = 0.0;
          for (int h = 0; h < H; ++h)
            v += config.harmonic_amps[h] *
                 std::sin(kTwoPi * f0 * (h + 1) * t / config.sampling_rate_hz + phases[h]);
          v += sigma * rng.normal();
          sample.at(ch, t) = v;
        }
      }
      ds.samples.push_back(std::move(sample));
    }
  }
  return ds;
}

}  // namespace vibclass

#pragma once

#include "strad/timeseries.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace strad {

enum class Shapelet { sine, square, sawtooth };

struct ChannelConfig {
    double frequency = 0.02;  // cycles per sample, in (0, 0.5)
    double amplitude = 1.0;
    double phase = 0.0;
    double slope = 0.0;  // units per sample
    Shapelet shapelet = Shapelet::sine;
};

// x_j = amplitude * shapelet(2 pi omega j + phase) + slope * j + noise
struct GeneratorConfig {
    Index length = 1000;
    std::vector<ChannelConfig> channels{ChannelConfig{}};
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class AnomalyKind { global_point, contextual_point, shapelet_pattern, seasonal_pattern, trend_pattern };

struct AnomalySpec {
    AnomalyKind kind = AnomalyKind::global_point;
    Index start = 0;
    Index length = 1;
    double magnitude = 1.0;
    int channel = -1;  // -1 selects every channel

    Segment range() const { return {start, start + length - 1}; }
};

std::string to_string(AnomalyKind kind);
std::string to_string(Shapelet shapelet);

// Periodic shape with period 2 pi and range [-1, 1].
double evaluate_shapelet(Shapelet shapelet, double phase);

TimeSeries generate_base(const GeneratorConfig& cfg);

// Injects one anomaly into a series produced from `cfg`; labels are set to 1
// on the injected range and values outside it are left untouched.
//   global_point      adds magnitude * (channel std)
//   contextual_point  replaces the point by the mean of its +-5 neighbours
//                     plus magnitude * their std
//   shapelet_pattern  swaps the periodic component for a different shapelet
//                     (sine -> square -> sawtooth -> sine), amplitude scaled
//                     by magnitude
//   seasonal_pattern  multiplies the frequency by magnitude, phase-continuous
//                     at the left edge
//   trend_pattern     adds a ramp of slope magnitude
TimeSeries inject(const TimeSeries& series, const GeneratorConfig& cfg, const AnomalySpec& spec);

struct Benchmark {
    TimeSeries train;
    TimeSeries test;
};

inline constexpr std::uint64_t kTestSeedOffset = 1;

// Train is the first train_fraction of a clean generation of cfg.length
// points; test is a fresh generation of the remaining length (seed offset by
// kTestSeedOffset) with every spec injected.
Benchmark make_benchmark(const GeneratorConfig& cfg, const std::vector<AnomalySpec>& specs, double train_fraction);

} // namespace strad

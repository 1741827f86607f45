#include "strad/synth.hpp"

#include "strad/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace strad {

namespace {

constexpr Index kContextRadius = 5;

bool is_point_kind(AnomalyKind kind) {
    return kind == AnomalyKind::global_point || kind == AnomalyKind::contextual_point;
}

Shapelet alternate(Shapelet s) {
    switch (s) {
    case Shapelet::sine: return Shapelet::square;
    case Shapelet::square: return Shapelet::sawtooth;
    case Shapelet::sawtooth: return Shapelet::sine;
    }
    return Shapelet::sine;
}

double base_phase(const ChannelConfig& ch, double j) {
    return 2.0 * std::numbers::pi * ch.frequency * j + ch.phase;
}

void validate_spec(const AnomalySpec& spec, Index length, Index channels) {
    if (spec.start < 0 || spec.length < 1 || spec.start + spec.length > length) {
        throw InvalidArgumentError(to_string(spec.kind) + " anomaly at [" + std::to_string(spec.start) + ", " +
                                   std::to_string(spec.start + spec.length) + ") lies outside [0, " +
                                   std::to_string(length) + ")");
    }
    if (is_point_kind(spec.kind) && spec.length != 1) {
        throw InvalidArgumentError(to_string(spec.kind) + " anomalies must have length 1");
    }
    if (!is_point_kind(spec.kind) && spec.length < 2) {
        throw InvalidArgumentError(to_string(spec.kind) + " anomalies need length >= 2");
    }
    if (spec.channel < -1 || spec.channel >= channels) {
        throw InvalidArgumentError("anomaly channel " + std::to_string(spec.channel) + " out of range");
    }
    if (!std::isfinite(spec.magnitude)) throw InvalidArgumentError("anomaly magnitude must be finite");
}

} // namespace

std::string to_string(AnomalyKind kind) {
    switch (kind) {
    case AnomalyKind::global_point: return "global_point";
    case AnomalyKind::contextual_point: return "contextual_point";
    case AnomalyKind::shapelet_pattern: return "shapelet_pattern";
    case AnomalyKind::seasonal_pattern: return "seasonal_pattern";
    case AnomalyKind::trend_pattern: return "trend_pattern";
    }
    return "unknown";
}

std::string to_string(Shapelet shapelet) {
    switch (shapelet) {
    case Shapelet::sine: return "sine";
    case Shapelet::square: return "square";
    case Shapelet::sawtooth: return "sawtooth";
    }
    return "unknown";
}

void GeneratorConfig::validate() const {
    if (length < 1) throw InvalidArgumentError("generator length must be positive");
    if (channels.empty()) throw InvalidArgumentError("generator needs at least one channel");
    if (!(noise_sigma >= 0.0)) throw InvalidArgumentError("noise_sigma must be >= 0");
    for (const auto& ch : channels) {
        if (!(ch.frequency > 0.0 && ch.frequency < 0.5)) {
            throw InvalidArgumentError("frequency must lie in (0, 0.5), got " + std::to_string(ch.frequency));
        }
        if (!std::isfinite(ch.amplitude) || !std::isfinite(ch.phase) || !std::isfinite(ch.slope)) {
            throw InvalidArgumentError("channel parameters must be finite");
        }
    }
}

double evaluate_shapelet(Shapelet shapelet, double phase) {
    switch (shapelet) {
    case Shapelet::sine:
        return std::sin(phase);
    case Shapelet::square:
        return std::sin(phase) >= 0.0 ? 1.0 : -1.0;
    case Shapelet::sawtooth: {
        const double cycles = phase / (2.0 * std::numbers::pi);
        return 2.0 * (cycles - std::floor(cycles + 0.5));
    }
    }
    return 0.0;
}

TimeSeries generate_base(const GeneratorConfig& cfg) {
    cfg.validate();
    const auto d = static_cast<Index>(cfg.channels.size());
    TimeSeries series;
    series.name = "synthetic";
    series.values.resize(cfg.length, d);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (Index j = 0; j < cfg.length; ++j) {
        for (Index c = 0; c < d; ++c) {
            const auto& ch = cfg.channels[static_cast<std::size_t>(c)];
            double v = ch.amplitude * evaluate_shapelet(ch.shapelet, base_phase(ch, static_cast<double>(j))) +
                       ch.slope * static_cast<double>(j);
            if (cfg.noise_sigma > 0.0) v += cfg.noise_sigma * noise(rng);
            series.values(j, c) = v;
        }
    }
    series.labels = Labels(static_cast<std::size_t>(cfg.length), 0);
    return series;
}

TimeSeries inject(const TimeSeries& series, const GeneratorConfig& cfg, const AnomalySpec& spec) {
    validate(series);
    if (static_cast<Index>(cfg.channels.size()) != series.channels()) {
        throw ShapeMismatchError("generator config channel count does not match the series");
    }
    validate_spec(spec, series.length(), series.channels());

    TimeSeries out = series;
    if (!out.labels) out.labels = Labels(static_cast<std::size_t>(series.length()), 0);
    const Index s = spec.start;
    const Index e = spec.start + spec.length;  // exclusive
    const Index m = series.length();

    for (Index c = 0; c < series.channels(); ++c) {
        if (spec.channel >= 0 && spec.channel != c) continue;
        const auto& ch = cfg.channels[static_cast<std::size_t>(c)];
        auto col = out.values.col(c);
        const auto orig = series.values.col(c);
        switch (spec.kind) {
        case AnomalyKind::global_point: {
            const double mean = orig.mean();
            const double sd = std::sqrt((orig.array() - mean).square().mean());
            col(s) += spec.magnitude * sd;
            break;
        }
        case AnomalyKind::contextual_point: {
            double sum = 0.0;
            double sq = 0.0;
            int n = 0;
            for (Index j = std::max<Index>(0, s - kContextRadius); j <= std::min(m - 1, s + kContextRadius); ++j) {
                if (j == s) continue;
                sum += orig(j);
                sq += orig(j) * orig(j);
                ++n;
            }
            if (n == 0) {
                col(s) += spec.magnitude;
                break;
            }
            const double mean = sum / n;
            const double sd = std::sqrt(std::max(0.0, sq / n - mean * mean));
            col(s) = mean + spec.magnitude * sd;
            break;
        }
        case AnomalyKind::shapelet_pattern: {
            const auto alt = alternate(ch.shapelet);
            for (Index j = s; j < e; ++j) {
                const double phase = base_phase(ch, static_cast<double>(j));
                col(j) += ch.amplitude * (spec.magnitude * evaluate_shapelet(alt, phase) -
                                          evaluate_shapelet(ch.shapelet, phase));
            }
            break;
        }
        case AnomalyKind::seasonal_pattern: {
            if (spec.magnitude == 1.0) break;  // frequency unchanged
            const double left = base_phase(ch, static_cast<double>(s));
            for (Index j = s; j < e; ++j) {
                const double phase = left + 2.0 * std::numbers::pi * ch.frequency * spec.magnitude *
                                                static_cast<double>(j - s);
                col(j) += ch.amplitude * (evaluate_shapelet(ch.shapelet, phase) -
                                          evaluate_shapelet(ch.shapelet, base_phase(ch, static_cast<double>(j))));
            }
            break;
        }
        case AnomalyKind::trend_pattern:
            for (Index j = s; j < e; ++j) col(j) += spec.magnitude * static_cast<double>(j - s + 1);
            break;
        }
    }
    std::fill(out.labels->begin() + s, out.labels->begin() + e, std::uint8_t{1});
    return out;
}

Benchmark make_benchmark(const GeneratorConfig& cfg, const std::vector<AnomalySpec>& specs, double train_fraction) {
    cfg.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidArgumentError("train_fraction must lie in (0, 1)");
    const auto train_len = static_cast<Index>(std::llround(static_cast<double>(cfg.length) * train_fraction));
    const Index test_len = cfg.length - train_len;
    if (train_len < 1 || test_len < 1) throw InvalidArgumentError("train_fraction leaves an empty split");

    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& sp = specs[i];
        if (sp.start < 0 || sp.start + sp.length > test_len) {
            throw InvalidArgumentError("anomaly spec #" + std::to_string(i) + " (" + to_string(sp.kind) + " at " +
                                       std::to_string(sp.start) + ", length " + std::to_string(sp.length) +
                                       ") lies outside the test region [0, " + std::to_string(test_len) + ")");
        }
    }

    Benchmark bench;
    const auto clean = generate_base(cfg);
    bench.train.values = clean.values.topRows(train_len);
    bench.train.labels = Labels(static_cast<std::size_t>(train_len), 0);
    bench.train.name = "train";

    GeneratorConfig test_cfg = cfg;
    test_cfg.length = test_len;
    test_cfg.seed = cfg.seed + kTestSeedOffset;
    bench.test = generate_base(test_cfg);
    bench.test.name = "test";
    for (const auto& sp : specs) bench.test = inject(bench.test, test_cfg, sp);
    return bench;
}

} // namespace strad

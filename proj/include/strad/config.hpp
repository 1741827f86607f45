#pragma once

#include "strad/detector.hpp"
#include "strad/metrics.hpp"
#include "strad/synth.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace strad {

struct CsvSource {
    std::filesystem::path train;
    std::filesystem::path test;
    std::vector<std::string> value_columns{"value"};
    std::string label_column = "label";
};

struct SynthSource {
    GeneratorConfig generator;
    bool explicit_seed = false;  // otherwise the generator follows the experiment seed
    std::vector<AnomalySpec> anomalies;
    double train_fraction = 0.5;
};

struct DatasetConfig {
    std::string name;
    std::optional<CsvSource> csv;
    std::optional<SynthSource> synth;
};

enum class ThresholdMode { best_f1, quantile };
enum class MetricSelection { rpa, pa, both };

struct ExperimentConfig {
    std::vector<DatasetConfig> datasets;
    Index window = 64;
    Index train_stride = 0;  // 0: window / 2
    Index score_stride = 1;
    std::vector<Index> hidden_layers{64, 16, 64};
    TrainConfig train;
    ScoreMode score_mode = ScoreMode::strad_broadcast;
    ThresholdMode threshold_mode = ThresholdMode::best_f1;
    double quantile = 0.99;
    MetricSelection metric = MetricSelection::both;
    RpaFalsePositives rpa_false_positives = RpaFalsePositives::per_run;
    std::vector<LossKind> compare_losses{LossKind::mse, LossKind::strad};
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    int jobs = 1;

    Index effective_train_stride() const { return train_stride > 0 ? train_stride : std::max<Index>(1, window / 2); }
    std::vector<Index> layer_sizes(Index channels) const;
    void validate() const;
};

// Parses a config document. Relative data paths resolve against base_dir.
// Unknown keys and malformed values raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

// Reads a config file and applies "dotted.key=value" overrides (values are
// parsed as JSON, falling back to a plain string) before parsing.
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

// Fully resolved configuration, defaults included; the basis of config_hash.
nlohmann::json to_json(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hex64(std::uint64_t v);

std::string to_string(LossKind kind);
std::string to_string(ScoreMode mode);
std::string to_string(TrendVariant variant);
std::string to_string(SpectralNorm norm);
std::string to_string(ThresholdMode mode);
std::string to_string(MetricSelection metric);
std::string to_string(RpaFalsePositives mode);

LossKind parse_loss_kind(const std::string& s);
MetricSelection parse_metric_selection(const std::string& s);
RpaFalsePositives parse_rpa_false_positives(const std::string& s);

} // namespace strad

#pragma once

#include "strad/config.hpp"
#include "strad/detector.hpp"
#include "strad/gradcheck.hpp"
#include "strad/metrics.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace strad {

// A dataset after loading/generation, normalized with train statistics.
struct PreparedData {
    std::string name;
    TimeSeries train;
    TimeSeries test;
    NormalizationStats stats;
    std::vector<std::string> value_columns;
};

Benchmark generate_synth(const SynthSource& src);
PreparedData prepare(const DatasetConfig& dataset);

TrainResult train_model(const ExperimentConfig& cfg,
                        const PreparedData& data,
                        LossKind loss,
                        const LossWeights& train_weights);

struct Detection {
    ScoreSeries test_scores;
    std::optional<double> quantile_threshold;  // set in quantile mode
};

Detection detect(const ExperimentConfig& cfg, const Autoencoder& model, const PreparedData& data);

// With a fixed threshold both metrics use it; otherwise each metric gets its
// own best-F1 threshold.
DatasetEval evaluate_scores(const std::string& name,
                            const VectorXd& scores,
                            const Labels& labels,
                            RpaFalsePositives fp_mode,
                            std::optional<double> fixed_threshold);

// train -> detect -> evaluate for one dataset.
DatasetEval run_pipeline(const ExperimentConfig& cfg,
                         const PreparedData& data,
                         LossKind loss,
                         const LossWeights& train_weights);

// Runs count jobs on up to `jobs` threads; results are assembled by index.
void run_parallel(int jobs, std::size_t count, const std::function<void(std::size_t)>& job);

std::vector<std::string> channel_names(Index channels);
std::string format_number(double v);
std::string provenance(const std::string& command, std::uint64_t hash, std::uint64_t seed);
std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

// --- commands -------------------------------------------------------------

struct SynthOutput {
    std::vector<std::filesystem::path> csv_files;
    std::filesystem::path manifest;
};
SynthOutput cmd_synth(const ExperimentConfig& cfg);

struct TrainOutput {
    std::vector<std::filesystem::path> checkpoints;
    std::vector<std::filesystem::path> histories;
};
TrainOutput cmd_train(const ExperimentConfig& cfg);

struct DetectOutput {
    std::vector<std::filesystem::path> score_files;
    std::vector<std::filesystem::path> segment_files;
    std::vector<double> thresholds;
};
DetectOutput cmd_detect(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& checkpoint);

struct EvalOptions {
    std::vector<std::filesystem::path> score_files;
    std::vector<std::filesystem::path> label_files;
    std::string label_column = "label";
    MetricSelection metric = MetricSelection::both;
    RpaFalsePositives rpa_false_positives = RpaFalsePositives::per_run;
    std::optional<double> threshold;
    std::filesystem::path output_dir = "out";
};

struct EvalOutput {
    EvalReport report;
    std::filesystem::path text_file;
    std::filesystem::path csv_file;
};
EvalOutput cmd_eval(const EvalOptions& options);

struct CompareRow {
    std::string loss;
    std::string dataset;
    double rpa_f1 = 0.0;
    double pa_f1 = 0.0;
};

struct ImprovementRow {
    std::string loss;
    std::string metric;  // "rpa" or "pa"
    double avg_improved = 0.0;
    std::optional<double> air;  // empty when every baseline F1 is zero
};

struct CompareOutput {
    std::vector<CompareRow> rows;
    std::vector<ImprovementRow> improvements;
    std::vector<std::pair<std::string, EvalReport>> reports;  // per loss
    std::vector<std::string> warnings;
    std::filesystem::path table_file;
    std::filesystem::path improvement_file;
    std::filesystem::path entire_file;
};
CompareOutput cmd_compare(const ExperimentConfig& cfg);

struct AblationRow {
    bool trend = false;
    bool seasonality = false;
    bool shape = false;
    EvalReport report;
};

struct AblationOutput {
    std::vector<AblationRow> rows;
    std::filesystem::path table_file;
};
AblationOutput cmd_ablate(const ExperimentConfig& cfg);

struct GradcheckOutput {
    GradcheckReport report;
    std::optional<std::filesystem::path> report_file;
};
GradcheckOutput cmd_gradcheck(const GradcheckOptions& options, const std::optional<std::filesystem::path>& output_dir);

} // namespace strad

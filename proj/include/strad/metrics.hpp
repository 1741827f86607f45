#pragma once

#include "strad/timeseries.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace strad {

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    // 0/0 is taken as 0 for precision, recall and F1.
    double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
    double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
    double f1() const {
        const double p = precision();
        const double r = recall();
        return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    }

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

enum class Metric { rpa, pa };

// How RPA counts false positives outside truth segments.
enum class RpaFalsePositives {
    per_run,    // one per maximal predicted run touching no truth segment
    per_point,  // one per predicted point outside every truth segment
};

// Every truth segment containing at least one prediction becomes fully predicted.
Labels point_adjust(const Labels& preds, const std::vector<Segment>& truth);

ConfusionCounts pa_counts(const Labels& preds, const Labels& truth);

// Each truth segment is one sample: tp if hit, fn otherwise. A predicted run
// overlapping any truth segment is absorbed by it.
ConfusionCounts rpa_counts(const Labels& preds,
                           const std::vector<Segment>& truth,
                           RpaFalsePositives fp_mode = RpaFalsePositives::per_run);

struct SubsetF1 {
    std::int64_t segments = 0;  // e_i
    double f1 = 0.0;
};

// Segment-count weighted average of per-sub-dataset F1 scores.
double entire_f1(std::span<const SubsetF1> subsets);

double avg_improved(std::span<const double> f1_star, std::span<const double> f1_mse);

struct AirResult {
    double value = 0.0;
    std::vector<std::size_t> dropped;  // datasets skipped for a zero baseline
};

// Mean relative improvement over the MSE baseline. Datasets whose baseline
// F1 is zero are dropped and reported; all-zero baselines are an error.
AirResult air(std::span<const double> f1_star, std::span<const double> f1_mse);

struct DatasetEval {
    std::string name;
    std::int64_t segments = 0;
    double rpa_f1 = 0.0;
    double pa_f1 = 0.0;
    double rpa_threshold = 0.0;
    double pa_threshold = 0.0;
    ConfusionCounts rpa;
    ConfusionCounts pa;
};

struct EvalReport {
    std::vector<DatasetEval> datasets;
    double entire_rpa_f1 = 0.0;
    double entire_pa_f1 = 0.0;
};

// Fills the entire-dataset fields from the per-dataset entries.
void finalize(EvalReport& report);

} // namespace strad

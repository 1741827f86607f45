#pragma once

#include "strad/autoencoder.hpp"
#include "strad/metrics.hpp"
#include "strad/structural_loss.hpp"
#include "strad/timeseries.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace strad {

enum class LossKind { mse, strad, mse_plus_strad };

struct TrainConfig {
    int epochs = 50;
    int batch_size = 32;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::strad;
    LossWeights weights;
    double mix = 0.5;  // mse_plus_strad: mix * MSE + (1 - mix) * StrAD
    double learning_rate = 1e-3;

    void validate() const;
};

struct EpochRecord {
    double total = 0.0;
    // Mean StrAD components, for the strad and mse_plus_strad objectives.
    std::optional<LossBreakdown<double>> breakdown;
};

struct TrainResult {
    Autoencoder model;
    std::vector<EpochRecord> history;
    std::int64_t optimizer_steps = 0;
};

// Objective value and its gradient with respect to the reconstruction.
struct WindowLoss {
    double total = 0.0;
    std::optional<LossBreakdown<double>> breakdown;
    MatrixXd grad;
};

WindowLoss evaluate_loss(const MatrixXd& x, const MatrixXd& x_rec, const TrainConfig& cfg);

// Seeded-permutation minibatch training with one Adam step per batch; the
// batch gradient is the mean of per-window gradients.
TrainResult train(Autoencoder model, const WindowSet& windows, const TrainConfig& cfg);

enum class ScoreMode { shape_only, strad_broadcast };

struct ScoreSeries {
    VectorXd scores;
    std::vector<Index> coverage;
};

// Per-point scores: lambda3 * sum_c |x - x'| per point, plus, for
// strad_broadcast, (lambda1 * trend + lambda2 * seasonality) / t spread over
// the window (monotone trend). Contributions are averaged over coverage.
ScoreSeries score(const Autoencoder& model,
                  const TimeSeries& series,
                  Index window_length,
                  Index stride,
                  const LossWeights& weights,
                  ScoreMode mode);

// Point i is predicted anomalous when scores(i) >= threshold.
Labels predict(const VectorXd& scores, double threshold);

struct ThresholdResult {
    double threshold = 0.0;
    double f1 = 0.0;
    ConfusionCounts counts;
};

ConfusionCounts metric_counts(const Labels& preds, const Labels& truth, Metric metric, RpaFalsePositives fp_mode);

// Sweeps the distinct score values (and +inf). The lowest score is skipped
// since it flags every point. Ties go to the higher threshold.
ThresholdResult threshold_best_f1(const VectorXd& scores,
                                  const Labels& truth,
                                  Metric metric,
                                  RpaFalsePositives fp_mode = RpaFalsePositives::per_run);

// Linear-interpolation quantile of training scores.
double threshold_quantile(const VectorXd& train_scores, double q);

} // namespace strad

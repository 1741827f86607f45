#include "strad/detector.hpp"

#include "strad/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace strad {

void TrainConfig::validate() const {
    if (epochs < 1) throw InvalidArgumentError("epochs must be >= 1");
    if (batch_size < 1) throw InvalidArgumentError("batch_size must be >= 1");
    if (!(mix >= 0.0 && mix <= 1.0)) throw InvalidArgumentError("mix must lie in [0, 1]");
    if (!(learning_rate > 0.0)) throw InvalidArgumentError("learning rate must be positive");
    if (loss != LossKind::mse) weights.validate();
}

WindowLoss evaluate_loss(const MatrixXd& x, const MatrixXd& x_rec, const TrainConfig& cfg) {
    WindowLoss out;
    switch (cfg.loss) {
    case LossKind::mse:
        out.total = mse_loss(x, x_rec);
        out.grad = mse_loss_grad(x, x_rec);
        break;
    case LossKind::strad:
        out.breakdown = strad_loss(x, x_rec, cfg.weights);
        out.total = out.breakdown->total;
        out.grad = strad_grad(x, x_rec, cfg.weights);
        break;
    case LossKind::mse_plus_strad:
        out.breakdown = strad_loss(x, x_rec, cfg.weights);
        out.total = cfg.mix * mse_loss(x, x_rec) + (1.0 - cfg.mix) * out.breakdown->total;
        out.grad = cfg.mix * mse_loss_grad(x, x_rec) + (1.0 - cfg.mix) * strad_grad(x, x_rec, cfg.weights);
        break;
    }
    return out;
}

TrainResult train(Autoencoder model, const WindowSet& windows, const TrainConfig& cfg) {
    cfg.validate();
    if (windows.windows.empty()) throw InvalidArgumentError("no training windows");
    for (const auto& w : windows.windows) {
        if (w.data.size() != model.input_size()) {
            throw ShapeMismatchError("training window has " + std::to_string(w.data.size()) +
                                     " entries, model expects " + std::to_string(model.input_size()));
        }
    }

    TrainResult result;
    auto adam = make_adam_state(model, cfg.learning_rate);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(windows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    const bool track_breakdown = cfg.loss != LossKind::mse;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        EpochRecord record;
        LossBreakdown<double> sum_breakdown;
        for (std::size_t begin = 0; begin < order.size(); begin += batch) {
            const std::size_t end = std::min(order.size(), begin + batch);
            auto grads = zeros_like(model.layers);
            const double scale = 1.0 / static_cast<double>(end - begin);
            for (std::size_t k = begin; k < end; ++k) {
                const auto& x = windows.windows[order[k]].data;
                const auto trace = forward_trace(model, x);
                const auto rec = trace.reconstruction(x.rows(), x.cols());
                const auto loss = evaluate_loss(x, rec, cfg);
                if (!std::isfinite(loss.total) || !loss.grad.allFinite()) {
                    throw NumericError("non-finite loss at epoch " + std::to_string(epoch));
                }
                record.total += loss.total;
                if (loss.breakdown) {
                    sum_breakdown.trend += loss.breakdown->trend;
                    sum_breakdown.seasonality += loss.breakdown->seasonality;
                    sum_breakdown.shape += loss.breakdown->shape;
                    sum_breakdown.total += loss.breakdown->total;
                }
                accumulate(grads, parameter_gradients(model, trace, loss.grad), scale);
            }
            adam_step(model, grads, adam);
            ++result.optimizer_steps;
        }
        const auto n = static_cast<double>(order.size());
        record.total /= n;
        if (track_breakdown) {
            record.breakdown = LossBreakdown<double>{sum_breakdown.trend / n, sum_breakdown.seasonality / n,
                                                     sum_breakdown.shape / n, sum_breakdown.total / n};
        }
        result.history.push_back(record);
    }
    result.model = std::move(model);
    return result;
}

ScoreSeries score(const Autoencoder& model,
                  const TimeSeries& series,
                  Index window_length,
                  Index stride,
                  const LossWeights& weights,
                  ScoreMode mode) {
    const auto windows = sliding_windows(series, window_length, stride);
    LossWeights monotone = weights;
    monotone.trend_variant = TrendVariant::monotone;

    const Index m = series.length();
    VectorXd sum = VectorXd::Zero(m);
    ScoreSeries out;
    out.coverage.assign(static_cast<std::size_t>(m), 0);
    for (const auto& w : windows.windows) {
        const MatrixXd rec = forward(model, w.data);
        VectorXd contrib = weights.lambda3 * (w.data - rec).cwiseAbs().rowwise().sum();
        if (mode == ScoreMode::strad_broadcast) {
            const double trend = trend_loss(w.data, rec, monotone.epsilon, TrendVariant::monotone);
            const double seasonality = seasonality_loss(w.data, rec, monotone.spectral_norm);
            contrib.array() += (weights.lambda1 * trend + weights.lambda2 * seasonality) /
                               static_cast<double>(window_length);
        }
        sum.segment(w.start, window_length) += contrib;
        for (Index i = 0; i < window_length; ++i) ++out.coverage[static_cast<std::size_t>(w.start + i)];
    }
    out.scores = VectorXd::Zero(m);
    for (Index i = 0; i < m; ++i) {
        if (out.coverage[static_cast<std::size_t>(i)] > 0) {
            out.scores(i) = sum(i) / static_cast<double>(out.coverage[static_cast<std::size_t>(i)]);
        }
    }
    if (!out.scores.allFinite()) throw NumericError("non-finite anomaly score");
    return out;
}

Labels predict(const VectorXd& scores, double threshold) {
    Labels preds(static_cast<std::size_t>(scores.size()), 0);
    for (Index i = 0; i < scores.size(); ++i) preds[static_cast<std::size_t>(i)] = scores(i) >= threshold ? 1 : 0;
    return preds;
}

ConfusionCounts metric_counts(const Labels& preds, const Labels& truth, Metric metric, RpaFalsePositives fp_mode) {
    if (preds.size() != truth.size()) throw ShapeMismatchError("predictions and labels differ in length");
    if (metric == Metric::pa) return pa_counts(preds, truth);
    return rpa_counts(preds, segments_from_labels(truth), fp_mode);
}

ThresholdResult threshold_best_f1(const VectorXd& scores, const Labels& truth, Metric metric, RpaFalsePositives fp_mode) {
    if (truth.empty()) throw InvalidArgumentError("best-F1 threshold needs labels");
    if (static_cast<Index>(truth.size()) != scores.size()) throw ShapeMismatchError("scores and labels differ in length");

    std::vector<double> candidates(scores.data(), scores.data() + scores.size());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (!candidates.empty()) candidates.erase(candidates.begin());
    candidates.push_back(std::numeric_limits<double>::infinity());

    ThresholdResult best;
    bool first = true;
    // Highest threshold first so that ties keep the higher one.
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
        const auto counts = metric_counts(predict(scores, *it), truth, metric, fp_mode);
        const double f1 = counts.f1();
        if (first || f1 > best.f1) {
            best = {*it, f1, counts};
            first = false;
        }
    }
    return best;
}

double threshold_quantile(const VectorXd& train_scores, double q) {
    if (train_scores.size() == 0) throw InvalidArgumentError("quantile threshold needs scores");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgumentError("quantile must lie in [0, 1]");
    std::vector<double> sorted(train_scores.data(), train_scores.data() + train_scores.size());
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace strad

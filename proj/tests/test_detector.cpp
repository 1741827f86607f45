#include "strad/detector.hpp"
#include "strad/errors.hpp"
#include "strad/metrics.hpp"

#include <doctest.h>

#include <limits>
#include <random>

using namespace strad;

namespace {

// A single linear layer with identity weights reconstructs its input exactly.
Autoencoder identity_model(Index size) {
    Autoencoder m;
    m.layer_sizes = {size, size};
    m.layers.push_back({MatrixXd::Identity(size, size), VectorXd::Zero(size)});
    return m;
}

Autoencoder zero_model(Index size) {
    Autoencoder m;
    m.layer_sizes = {size, size};
    m.layers.push_back({MatrixXd::Zero(size, size), VectorXd::Zero(size)});
    return m;
}

TimeSeries random_series(Index m, Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    TimeSeries s;
    s.values = MatrixXd(m, d);
    for (Index i = 0; i < s.values.size(); ++i) s.values.data()[i] = n(rng);
    return s;
}

} // namespace

TEST_CASE("train bookkeeping") {
    const auto series = random_series(40, 2, 1);
    const auto windows = sliding_windows(series, 8, 4);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = static_cast<int>(windows.windows.size());
    auto result = train(init_model(std::vector<Index>{16, 6, 16}, 1), windows, cfg);
    CHECK(result.optimizer_steps == 1);
    CHECK(result.history.size() == 1);
    CHECK(result.history[0].breakdown.has_value());

    cfg.epochs = 3;
    cfg.batch_size = 4;
    cfg.loss = LossKind::mse;
    result = train(init_model(std::vector<Index>{16, 6, 16}, 1), windows, cfg);
    CHECK(result.history.size() == 3);
    CHECK(result.optimizer_steps == 3 * 3);
    CHECK_FALSE(result.history[0].breakdown.has_value());

    CHECK_THROWS_AS(train(init_model(std::vector<Index>{12, 6, 12}, 1), windows, cfg), ShapeMismatchError);
    cfg.epochs = 0;
    CHECK_THROWS_AS(train(init_model(std::vector<Index>{16, 6, 16}, 1), windows, cfg), InvalidArgumentError);
}

TEST_CASE("train is deterministic and mixes losses") {
    const auto series = random_series(60, 1, 2);
    const auto windows = sliding_windows(series, 16, 4);
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.batch_size = 3;
    cfg.seed = 9;
    const auto a = train(init_model(std::vector<Index>{16, 8, 16}, 3), windows, cfg);
    const auto b = train(init_model(std::vector<Index>{16, 8, 16}, 3), windows, cfg);
    CHECK(flatten(a.model.layers) == flatten(b.model.layers));

    const MatrixXd x = windows.windows[0].data;
    const MatrixXd r = x.array() * 0.5 + 0.1;
    cfg.loss = LossKind::mse_plus_strad;
    cfg.mix = 0.25;
    const auto mixed = evaluate_loss(x, r, cfg);
    const auto st = strad_loss(x, r, cfg.weights);
    CHECK(mixed.total == doctest::Approx(0.25 * mse_loss(x, r) + 0.75 * st.total));
    CHECK((mixed.grad - (0.25 * mse_loss_grad(x, r) + 0.75 * strad_grad(x, r, cfg.weights))).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("score coverage and identity values") {
    const auto series = random_series(20, 2, 3);
    const LossWeights w;
    const auto perfect = score(identity_model(10), series, 5, 1, w, ScoreMode::strad_broadcast);
    CHECK(perfect.scores.size() == 20);
    CHECK(perfect.scores.cwiseAbs().maxCoeff() == 0.0);
    CHECK(perfect.coverage.front() == 1);
    CHECK(perfect.coverage[10] == 5);
    CHECK(perfect.coverage.back() == 1);

    const auto gaps = score(identity_model(10), series, 5, 4, w, ScoreMode::shape_only);
    CHECK(gaps.coverage.back() == 0);  // start 16 would overrun
    CHECK(gaps.scores(19) == 0.0);

    TimeSeries ones;
    ones.values = MatrixXd::Ones(3, 1);
    const auto one = score(zero_model(3), ones, 3, 1, w, ScoreMode::shape_only);
    CHECK(one.scores(0) == doctest::Approx(1.0));

    CHECK_THROWS_AS(score(zero_model(3), ones, 4, 1, w, ScoreMode::shape_only), InvalidArgumentError);
}

TEST_CASE("strad_broadcast dominates shape_only and matches a manual reduction") {
    const auto series = random_series(30, 2, 4);
    const auto model = init_model(std::vector<Index>{16, 5, 16}, 4);
    const LossWeights w;
    const auto shape = score(model, series, 8, 3, w, ScoreMode::shape_only);
    const auto full = score(model, series, 8, 3, w, ScoreMode::strad_broadcast);
    for (Index i = 0; i < 30; ++i) CHECK(full.scores(i) >= shape.scores(i));

    VectorXd sum = VectorXd::Zero(30);
    std::vector<int> cov(30, 0);
    for (Index s = 0; s + 8 <= 30; s += 3) {
        const MatrixXd x = series.values.middleRows(s, 8);
        const MatrixXd r = forward(model, x);
        const double window_term =
            (w.lambda1 * trend_loss(x, r, w.epsilon, TrendVariant::monotone) + w.lambda2 * seasonality_loss(x, r)) / 8.0;
        for (Index j = 0; j < 8; ++j) {
            sum(s + j) += w.lambda3 * (x.row(j) - r.row(j)).cwiseAbs().sum() + window_term;
            ++cov[static_cast<std::size_t>(s + j)];
        }
    }
    for (Index i = 0; i < 30; ++i) {
        const double expected = cov[static_cast<std::size_t>(i)] ? sum(i) / cov[static_cast<std::size_t>(i)] : 0.0;
        CHECK(full.scores(i) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("threshold_best_f1") {
    VectorXd s(4);
    s << 0, 0, 9, 0;
    const Labels truth{0, 0, 1, 0};
    const auto r = threshold_best_f1(s, truth, Metric::rpa, RpaFalsePositives::per_run);
    CHECK(r.threshold > 0.0);
    CHECK(r.threshold <= 9.0);
    CHECK(r.f1 == 1.0);

    const auto flat = threshold_best_f1(VectorXd(VectorXd::Zero(4)), truth, Metric::rpa, RpaFalsePositives::per_run);
    CHECK(flat.threshold == std::numeric_limits<double>::infinity());
    CHECK(flat.f1 == 0.0);

    const auto empty = threshold_best_f1(s, Labels{0, 0, 0, 0}, Metric::pa, RpaFalsePositives::per_run);
    CHECK(empty.f1 == 0.0);

    CHECK_THROWS_AS(threshold_best_f1(s, Labels{0, 1}, Metric::pa, RpaFalsePositives::per_run), ShapeMismatchError);

    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 5 + trial % 30;
        VectorXd sc(n);
        Labels lab(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) {
            sc(i) = static_cast<double>(rng() % 6);
            lab[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng() % 3 == 0);
        }
        for (auto metric : {Metric::rpa, Metric::pa}) {
            for (auto fp : {RpaFalsePositives::per_run, RpaFalsePositives::per_point}) {
                const auto best = threshold_best_f1(sc, lab, metric, fp);
                CHECK(metric_counts(predict(sc, best.threshold), lab, metric, fp).f1() == best.f1);
                // no candidate does better
                for (Index i = 0; i < n; ++i) {
                    if (sc(i) == sc.minCoeff()) continue;
                    CHECK(metric_counts(predict(sc, sc(i)), lab, metric, fp).f1() <= best.f1);
                }
            }
        }
    }
}

TEST_CASE("threshold_quantile") {
    VectorXd a(3);
    a << 1, 2, 3;
    CHECK(threshold_quantile(a, 1.0) == 3.0);
    VectorXd b(2);
    b << 3, 1;
    CHECK(threshold_quantile(b, 0.5) == doctest::Approx(2.0));
    CHECK(threshold_quantile(VectorXd(VectorXd::Constant(5, 0.7)), 0.3) == doctest::Approx(0.7));
    CHECK_THROWS_AS(threshold_quantile(VectorXd(), 0.5), InvalidArgumentError);
    CHECK_THROWS_AS(threshold_quantile(a, 1.5), InvalidArgumentError);
}

#include "strad/errors.hpp"
#include "strad/metrics.hpp"

#include <doctest.h>

#include <random>

using namespace strad;

namespace {

// Reference recounts straight from the definitions, one point at a time.
ConfusionCounts brute_pa(const Labels& preds, const Labels& truth) {
    const std::size_t n = truth.size();
    Labels adj = preds;
    for (std::size_t i = 0; i < n; ++i) {
        if (!truth[i]) continue;
        std::size_t a = i, b = i;
        while (a > 0 && truth[a - 1]) --a;
        while (b + 1 < n && truth[b + 1]) ++b;
        bool hit = false;
        for (std::size_t j = a; j <= b; ++j) hit = hit || preds[j];
        if (hit) adj[i] = 1;
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < n; ++i) {
        c.tp += adj[i] && truth[i];
        c.fp += adj[i] && !truth[i];
        c.fn += !adj[i] && truth[i];
    }
    return c;
}

ConfusionCounts brute_rpa(const Labels& preds, const Labels& truth, RpaFalsePositives mode) {
    const std::size_t n = truth.size();
    ConfusionCounts c;
    for (std::size_t i = 0; i < n; ++i) {
        if (!truth[i] || (i > 0 && truth[i - 1])) continue;  // segment start
        bool hit = false;
        for (std::size_t j = i; j < n && truth[j]; ++j) hit = hit || preds[j];
        (hit ? c.tp : c.fn) += 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (mode == RpaFalsePositives::per_point) {
            c.fp += preds[i] && !truth[i];
            continue;
        }
        if (!preds[i] || (i > 0 && preds[i - 1])) continue;  // run start
        bool touches = false;
        for (std::size_t j = i; j < n && preds[j]; ++j) touches = touches || truth[j];
        c.fp += !touches;
    }
    return c;
}

bool same(const ConfusionCounts& a, const ConfusionCounts& b) { return a.tp == b.tp && a.fp == b.fp && a.fn == b.fn; }

} // namespace

TEST_CASE("confusion count conventions") {
    ConfusionCounts zero;
    CHECK(zero.precision() == 0.0);
    CHECK(zero.recall() == 0.0);
    CHECK(zero.f1() == 0.0);
    ConfusionCounts c{3, 2, 0};
    CHECK(c.precision() == doctest::Approx(0.6));
    CHECK(c.recall() == 1.0);
}

TEST_CASE("point_adjust") {
    CHECK(point_adjust({0, 0, 1, 0, 0}, {{1, 3}}) == Labels{0, 1, 1, 1, 0});
    CHECK(point_adjust({1, 0, 0, 0, 1}, {{1, 3}}) == Labels{1, 0, 0, 0, 1});
    CHECK(point_adjust({0, 1, 0, 0, 0, 1, 0}, {{0, 2}, {4, 6}}) == Labels{1, 1, 1, 0, 1, 1, 1});
    CHECK_THROWS_AS(point_adjust({0, 0}, {{1, 3}}), InvalidArgumentError);
}

TEST_CASE("pa_counts worked examples") {
    auto c = pa_counts({0, 0, 1, 0, 0}, {0, 1, 1, 1, 0});
    CHECK(same(c, {3, 0, 0}));
    CHECK(c.f1() == 1.0);
    c = pa_counts({0, 0, 0, 0}, {0, 1, 1, 0});
    CHECK(same(c, {0, 0, 2}));
    c = pa_counts({1, 1, 1, 1, 1}, {0, 1, 1, 0, 1});
    CHECK(same(c, {3, 2, 0}));
    CHECK(c.precision() == doctest::Approx(0.6));
    CHECK(c.recall() == 1.0);
    CHECK_THROWS_AS(pa_counts({0, 1}, {0, 1, 0}), ShapeMismatchError);
}

TEST_CASE("rpa_counts worked examples") {
    auto c = rpa_counts({0, 1, 0, 0, 1, 1, 0}, {{1, 2}});
    CHECK(same(c, {1, 1, 0}));
    CHECK(c.precision() == 0.5);
    CHECK(c.recall() == 1.0);
    CHECK(c.f1() == 2.0 / 3.0);
    CHECK(same(rpa_counts({0, 0, 0, 0}, {{1, 2}}), {0, 0, 1}));
    c = rpa_counts({0, 1, 1, 0, 1, 0}, {{1, 2}, {4, 4}});
    CHECK(same(c, {2, 0, 0}));
    CHECK(c.f1() == 1.0);
    // a run straddling a segment boundary is absorbed by the hit
    CHECK(same(rpa_counts({0, 1, 1, 1, 1}, {{2, 2}}), {1, 0, 0}));
    CHECK(same(rpa_counts({0, 1, 1, 1, 1}, {{2, 2}}, RpaFalsePositives::per_point), {1, 3, 0}));
}

TEST_CASE("pa and rpa agree with brute-force recounts") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 40;
        Labels preds(n), truth(n);
        const unsigned density = 2 + rng() % 4;
        for (std::size_t i = 0; i < n; ++i) {
            preds[i] = static_cast<std::uint8_t>(rng() % density == 0);
            truth[i] = static_cast<std::uint8_t>(rng() % density == 0);
        }
        const auto segs = segments_from_labels(truth);
        CHECK(same(pa_counts(preds, truth), brute_pa(preds, truth)));
        for (auto mode : {RpaFalsePositives::per_run, RpaFalsePositives::per_point}) {
            CHECK(same(rpa_counts(preds, segs, mode), brute_rpa(preds, truth, mode)));
        }
        const double f = rpa_counts(preds, segs).f1();
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
}

TEST_CASE("widening a run inside a segment moves PA but not RPA") {
    const Labels truth{0, 1, 1, 1, 1, 0, 0, 1, 1, 0};
    const auto segs = segments_from_labels(truth);
    const Labels narrow{0, 0, 1, 0, 0, 0, 0, 0, 0, 0};
    const Labels wide{0, 0, 1, 1, 1, 0, 0, 0, 0, 0};
    CHECK(rpa_counts(narrow, segs).f1() == rpa_counts(wide, segs).f1());
    // widening past the segment edge: RPA absorbs the spill, PA counts it
    const Labels spill{0, 0, 1, 1, 1, 1, 0, 0, 0, 0};
    CHECK(rpa_counts(spill, segs).f1() == rpa_counts(narrow, segs).f1());
    CHECK(pa_counts(spill, truth).f1() < pa_counts(narrow, truth).f1());
}

TEST_CASE("entire_f1") {
    const std::vector<SubsetF1> two{{2, 0.5}, {3, 1.0}};
    CHECK(entire_f1(two) == 0.8);
    const std::vector<SubsetF1> one{{7, 0.35}};
    CHECK(entire_f1(one) == 0.35);
    const std::vector<SubsetF1> flat{{1, 0.4}, {5, 0.4}, {9, 0.4}};
    CHECK(entire_f1(flat) == doctest::Approx(0.4));
    const std::vector<SubsetF1> none{{0, 0.5}};
    CHECK_THROWS_AS(entire_f1(none), InvalidArgumentError);

    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<SubsetF1> s(1 + rng() % 6);
        double lo = 1.0, hi = 0.0;
        for (auto& x : s) {
            x = {static_cast<std::int64_t>(1 + rng() % 9), u(rng)};
            lo = std::min(lo, x.f1);
            hi = std::max(hi, x.f1);
        }
        const double e = entire_f1(s);
        CHECK(e >= lo - 1e-15);
        CHECK(e <= hi + 1e-15);
    }
}

TEST_CASE("improvement statistics") {
    const std::vector<double> a{0.3, 0.5}, b{0.1, 0.1};
    CHECK(avg_improved(a, a) == 0.0);
    CHECK(avg_improved(a, b) == doctest::Approx(0.3));
    CHECK(avg_improved(std::vector<double>{0.9}, std::vector<double>{0.4}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(avg_improved(a, std::vector<double>{0.1}), ShapeMismatchError);
    CHECK_THROWS_AS(avg_improved(std::vector<double>{}, std::vector<double>{}), InvalidArgumentError);

    CHECK(air(std::vector<double>{0.2}, std::vector<double>{0.1}).value == doctest::Approx(1.0));
    CHECK(air(a, a).value == 0.0);
    CHECK(air(std::vector<double>{0.2, 0.3}, std::vector<double>{0.1, 0.3}).value == doctest::Approx(0.5));

    const auto dropped = air(std::vector<double>{0.2, 0.5}, std::vector<double>{0.1, 0.0});
    CHECK(dropped.value == doctest::Approx(1.0));
    CHECK(dropped.dropped == std::vector<std::size_t>{1});
    CHECK_THROWS_AS(air(std::vector<double>{0.2}, std::vector<double>{0.0}), InvalidArgumentError);
}

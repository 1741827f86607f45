#include "strad/metrics.hpp"

#include "strad/errors.hpp"

#include <algorithm>

namespace strad {

namespace {

void check_segments(const std::vector<Segment>& truth, std::size_t length) {
    for (const auto& s : truth) {
        if (s.start < 0 || s.start > s.end || static_cast<std::size_t>(s.end) >= length) {
            throw InvalidArgumentError("truth segment (" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                                       ") out of range for " + std::to_string(length) + " predictions");
        }
    }
}

bool any_hit(const Labels& preds, const Segment& s) {
    return std::any_of(preds.begin() + s.start, preds.begin() + s.end + 1, [](std::uint8_t p) { return p != 0; });
}

} // namespace

Labels point_adjust(const Labels& preds, const std::vector<Segment>& truth) {
    check_segments(truth, preds.size());
    Labels adjusted = preds;
    for (const auto& s : truth) {
        if (any_hit(preds, s)) std::fill(adjusted.begin() + s.start, adjusted.begin() + s.end + 1, std::uint8_t{1});
    }
    return adjusted;
}

ConfusionCounts pa_counts(const Labels& preds, const Labels& truth) {
    if (preds.size() != truth.size()) {
        throw ShapeMismatchError("predictions (" + std::to_string(preds.size()) + ") and labels (" +
                                 std::to_string(truth.size()) + ") differ in length");
    }
    const auto adjusted = point_adjust(preds, segments_from_labels(truth));
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (adjusted[i] && truth[i]) ++c.tp;
        else if (adjusted[i]) ++c.fp;
        else if (truth[i]) ++c.fn;
    }
    return c;
}

ConfusionCounts rpa_counts(const Labels& preds, const std::vector<Segment>& truth, RpaFalsePositives fp_mode) {
    check_segments(truth, preds.size());
    ConfusionCounts c;
    Labels inside(preds.size(), 0);
    for (const auto& s : truth) {
        if (any_hit(preds, s)) ++c.tp;
        else ++c.fn;
        std::fill(inside.begin() + s.start, inside.begin() + s.end + 1, std::uint8_t{1});
    }
    if (fp_mode == RpaFalsePositives::per_point) {
        for (std::size_t i = 0; i < preds.size(); ++i) {
            if (preds[i] && !inside[i]) ++c.fp;
        }
        return c;
    }
    for (const auto& run : segments_from_labels(preds)) {
        const bool touches = std::any_of(inside.begin() + run.start, inside.begin() + run.end + 1,
                                         [](std::uint8_t v) { return v != 0; });
        if (!touches) ++c.fp;
    }
    return c;
}

double entire_f1(std::span<const SubsetF1> subsets) {
    std::int64_t total = 0;
    for (const auto& s : subsets) {
        if (s.segments < 0) throw InvalidArgumentError("segment counts must be non-negative");
        total += s.segments;
    }
    if (total == 0) throw InvalidArgumentError("entire-dataset F1 needs at least one anomaly segment");
    double acc = 0.0;
    for (const auto& s : subsets) acc += static_cast<double>(s.segments) / static_cast<double>(total) * s.f1;
    return acc;
}

double avg_improved(std::span<const double> f1_star, std::span<const double> f1_mse) {
    if (f1_star.size() != f1_mse.size()) throw ShapeMismatchError("F1 lists differ in length");
    if (f1_star.empty()) throw InvalidArgumentError("improvement needs at least one dataset");
    double acc = 0.0;
    for (std::size_t i = 0; i < f1_star.size(); ++i) acc += f1_star[i] - f1_mse[i];
    return acc / static_cast<double>(f1_star.size());
}

AirResult air(std::span<const double> f1_star, std::span<const double> f1_mse) {
    if (f1_star.size() != f1_mse.size()) throw ShapeMismatchError("F1 lists differ in length");
    AirResult out;
    double acc = 0.0;
    std::size_t q = 0;
    for (std::size_t i = 0; i < f1_star.size(); ++i) {
        if (!(f1_mse[i] > 0.0)) {
            out.dropped.push_back(i);
            continue;
        }
        acc += (f1_star[i] - f1_mse[i]) / f1_mse[i];
        ++q;
    }
    if (q == 0) throw InvalidArgumentError("A.I.R. undefined: every MSE baseline F1 is zero");
    out.value = acc / static_cast<double>(q);
    return out;
}

void finalize(EvalReport& report) {
    std::vector<SubsetF1> rpa;
    std::vector<SubsetF1> pa;
    for (const auto& d : report.datasets) {
        rpa.push_back({d.segments, d.rpa_f1});
        pa.push_back({d.segments, d.pa_f1});
    }
    report.entire_rpa_f1 = entire_f1(rpa);
    report.entire_pa_f1 = entire_f1(pa);
}

} // namespace strad

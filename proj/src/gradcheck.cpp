#include "strad/gradcheck.hpp"

#include "strad/autoencoder.hpp"
#include "strad/structural_loss.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace strad {

namespace {

constexpr double kPerturbation = 0.1;

struct Case {
    std::function<double(const MatrixXd&, const MatrixXd&)> value;
    std::function<MatrixXd(const MatrixXd&, const MatrixXd&)> grad;
};

LossWeights weights_for(TrendVariant variant) {
    LossWeights w;
    w.trend_variant = variant;
    return w;
}

Case loss_case(GradComponent c) {
    switch (c) {
    case GradComponent::trend_paper:
    case GradComponent::trend_monotone: {
        const auto v = c == GradComponent::trend_paper ? TrendVariant::paper : TrendVariant::monotone;
        const double eps = LossWeights{}.epsilon;
        return {[=](const MatrixXd& x, const MatrixXd& y) { return trend_loss(x, y, eps, v); },
                [=](const MatrixXd& x, const MatrixXd& y) { return trend_loss_grad(x, y, eps, v); }};
    }
    case GradComponent::seasonality:
    case GradComponent::seasonality_real_imag: {
        const auto n = c == GradComponent::seasonality ? SpectralNorm::modulus : SpectralNorm::real_imag;
        return {[=](const MatrixXd& x, const MatrixXd& y) { return seasonality_loss(x, y, n); },
                [=](const MatrixXd& x, const MatrixXd& y) { return seasonality_loss_grad(x, y, n); }};
    }
    case GradComponent::shape:
        return {[](const MatrixXd& x, const MatrixXd& y) { return shape_loss(x, y); },
                [](const MatrixXd& x, const MatrixXd& y) { return shape_loss_grad(x, y); }};
    case GradComponent::mse:
    case GradComponent::model_mse:
        return {[](const MatrixXd& x, const MatrixXd& y) { return mse_loss(x, y); },
                [](const MatrixXd& x, const MatrixXd& y) { return mse_loss_grad(x, y); }};
    case GradComponent::strad_paper:
    case GradComponent::strad_monotone:
    case GradComponent::model_strad: {
        const auto w = weights_for(c == GradComponent::strad_paper ? TrendVariant::paper : TrendVariant::monotone);
        return {[=](const MatrixXd& x, const MatrixXd& y) { return strad_loss(x, y, w).total; },
                [=](const MatrixXd& x, const MatrixXd& y) { return strad_grad(x, y, w); }};
    }
    }
    return {};
}

// Sign pattern of the L1 kinks a component can hit. Code 0 marks a term
// within kink_radius of its kink. `local` holds one code per residual entry
// (only the entry itself depends on that coordinate); `global` holds terms
// that depend on every coordinate: slope differences and DFT bins.
struct KinkSignature {
    std::vector<int> local;
    std::vector<int> global;

    bool operator==(const KinkSignature&) const = default;
    bool near_global() const { return std::find(global.begin(), global.end(), 0) != global.end(); }
    bool near_any() const { return near_global() || std::find(local.begin(), local.end(), 0) != local.end(); }
};

int sign_code(double v, double radius) { return std::abs(v) < radius ? 0 : (v > 0 ? 1 : -1); }

bool uses_shape(GradComponent c) {
    return c == GradComponent::shape || c == GradComponent::strad_paper || c == GradComponent::strad_monotone ||
           c == GradComponent::model_strad;
}

bool uses_trend(GradComponent c) {
    return c == GradComponent::trend_paper || c == GradComponent::trend_monotone ||
           c == GradComponent::strad_paper || c == GradComponent::strad_monotone || c == GradComponent::model_strad;
}

bool uses_modulus_spectrum(GradComponent c) {
    return c == GradComponent::seasonality || c == GradComponent::strad_paper ||
           c == GradComponent::strad_monotone || c == GradComponent::model_strad;
}

KinkSignature kink_signature(GradComponent c, const MatrixXd& x, const MatrixXd& y, double radius) {
    KinkSignature sig;
    const MatrixXd r = y - x;
    if (uses_shape(c)) {
        for (Index i = 0; i < r.size(); ++i) sig.local.push_back(sign_code(r(i), radius));
    }
    if (uses_trend(c)) {
        const VectorXd slope_diff = trend_fit(y) - trend_fit(x);
        for (Index k = 0; k < slope_diff.size(); ++k) sig.global.push_back(sign_code(slope_diff(k), radius));
    }
    const bool modulus = uses_modulus_spectrum(c);
    const bool real_imag = c == GradComponent::seasonality_real_imag;
    if (modulus || real_imag) {
        for (Index col = 0; col < r.cols(); ++col) {
            const VectorXd v = r.col(col);
            const auto spec = fft_forward(v);
            const Index n = spec.size();
            for (Index k = 0; k < n; ++k) {
                const bool real_bin = k == 0 || (n % 2 == 0 && k == n / 2);
                if (modulus) {
                    // Complex bins only kink at the origin; real bins kink on a sign change.
                    sig.global.push_back(real_bin ? sign_code(spec(k).real(), radius)
                                                  : (std::abs(spec(k)) < radius ? 0 : 1));
                }
                if (real_imag) {
                    sig.global.push_back(sign_code(spec(k).real(), radius));
                    if (!real_bin) sig.global.push_back(sign_code(spec(k).imag(), radius));
                }
            }
        }
    }
    return sig;
}

ComponentReport check_loss_component(GradComponent c, const GradcheckOptions& opt, std::mt19937_64& rng) {
    static const Index lengths[] = {8, 16, 32};
    static const Index channel_counts[] = {1, 3};
    const auto cs = loss_case(c);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComponentReport rep{c, 0.0, opt.tolerance};

    for (int w = 0; w < opt.windows; ++w) {
        const Index t = lengths[w % 3];
        const Index d = channel_counts[(w / 3) % 2];
        MatrixXd x(t, d);
        MatrixXd y(t, d);
        for (Index i = 0; i < x.size(); ++i) {
            x(i) = normal(rng);
            y(i) = normal(rng);
        }
        MatrixXd analytic = cs.grad(x, y);
        if (opt.perturb == c) analytic.array() += kPerturbation;

        const auto center = kink_signature(c, x, y, opt.kink_radius);
        std::vector<Index> kept;
        for (Index i = 0; i < y.size(); ++i) {
            MatrixXd yp = y;
            MatrixXd ym = y;
            yp(i) += opt.step;
            ym(i) -= opt.step;
            const bool near = center.near_global() ||
                              (!center.local.empty() && center.local[static_cast<std::size_t>(i)] == 0);
            const bool crosses = !(kink_signature(c, x, yp, opt.kink_radius) == center) ||
                                 !(kink_signature(c, x, ym, opt.kink_radius) == center);
            if (near || crosses) {
                ++rep.excluded;
            } else {
                kept.push_back(i);
            }
        }
        if (kept.empty()) continue;
        VectorXd fd(static_cast<Index>(kept.size()));
        VectorXd an(static_cast<Index>(kept.size()));
        for (std::size_t k = 0; k < kept.size(); ++k) {
            const Index i = kept[k];
            MatrixXd yp = y;
            MatrixXd ym = y;
            yp(i) += opt.step;
            ym(i) -= opt.step;
            fd(static_cast<Index>(k)) = (cs.value(x, yp) - cs.value(x, ym)) / (2.0 * opt.step);
            an(static_cast<Index>(k)) = analytic(i);
        }
        rep.checked += static_cast<std::int64_t>(kept.size());
        rep.max_rel_error = std::max(rep.max_rel_error, relative_error(fd, an));
    }
    rep.passed = rep.checked > 0 && rep.max_rel_error < rep.tolerance;
    return rep;
}

ComponentReport check_model_component(GradComponent c, const GradcheckOptions& opt, std::mt19937_64& rng) {
    // Two small shapes: t=4, d=1 through a 2-unit bottleneck (48 parameters)
    // and t=2, d=2 through 2 hidden units (22 parameters).
    struct Shape {
        Index t, d;
        std::vector<Index> sizes;
    };
    static const Shape shapes[] = {{4, 1, {4, 3, 2, 3, 4}}, {2, 2, {4, 2, 4}}};
    const auto cs = loss_case(c);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComponentReport rep{c, 0.0, c == GradComponent::model_mse ? opt.tolerance : opt.model_tolerance};

    for (int k = 0; k < opt.models; ++k) {
        const auto& shape = shapes[k % 2];
        auto model = init_model<double>(shape.sizes, rng());
        for (auto& l : model.layers) {
            for (Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.5 * normal(rng);
        }
        MatrixXd x(shape.t, shape.d);
        for (Index i = 0; i < x.size(); ++i) x(i) = normal(rng);

        const MatrixXd rec = forward(model, x);
        MatrixXd upstream = cs.grad(x, rec);
        if (opt.perturb == c) upstream.array() += kPerturbation;
        const VectorXd analytic = flatten(parameter_gradients(model, x, upstream));

        const VectorXd theta = flatten(model.layers);
        auto at = [&](const VectorXd& p) {
            auto m = model;
            unflatten(p, m.layers);
            return m;
        };
        const auto center = kink_signature(c, x, rec, opt.kink_radius);
        std::vector<Index> kept;
        for (Index i = 0; i < theta.size(); ++i) {
            VectorXd tp = theta;
            VectorXd tm = theta;
            tp(i) += opt.step;
            tm(i) -= opt.step;
            bool skip = false;
            if (c == GradComponent::model_strad) {
                skip = center.near_any() ||
                       !(kink_signature(c, x, forward(at(tp), x), opt.kink_radius) == center) ||
                       !(kink_signature(c, x, forward(at(tm), x), opt.kink_radius) == center);
            }
            if (skip) {
                ++rep.excluded;
            } else {
                kept.push_back(i);
            }
        }
        if (kept.empty()) continue;
        VectorXd fd(static_cast<Index>(kept.size()));
        VectorXd an(static_cast<Index>(kept.size()));
        for (std::size_t j = 0; j < kept.size(); ++j) {
            const Index i = kept[j];
            VectorXd tp = theta;
            VectorXd tm = theta;
            tp(i) += opt.step;
            tm(i) -= opt.step;
            fd(static_cast<Index>(j)) = (cs.value(x, forward(at(tp), x)) - cs.value(x, forward(at(tm), x))) /
                                        (2.0 * opt.step);
            an(static_cast<Index>(j)) = analytic(i);
        }
        rep.checked += static_cast<std::int64_t>(kept.size());
        rep.max_rel_error = std::max(rep.max_rel_error, relative_error(fd, an));
    }
    rep.passed = rep.checked > 0 && rep.max_rel_error < rep.tolerance;
    return rep;
}

} // namespace

std::string to_string(GradComponent c) {
    switch (c) {
    case GradComponent::trend_paper: return "trend_paper";
    case GradComponent::trend_monotone: return "trend_monotone";
    case GradComponent::seasonality: return "seasonality";
    case GradComponent::seasonality_real_imag: return "seasonality_real_imag";
    case GradComponent::shape: return "shape";
    case GradComponent::mse: return "mse";
    case GradComponent::strad_paper: return "strad_paper";
    case GradComponent::strad_monotone: return "strad_monotone";
    case GradComponent::model_mse: return "model_mse";
    case GradComponent::model_strad: return "model_strad";
    }
    return "unknown";
}

const std::vector<GradComponent>& all_grad_components() {
    static const std::vector<GradComponent> all = {
        GradComponent::trend_paper,    GradComponent::trend_monotone, GradComponent::seasonality,
        GradComponent::seasonality_real_imag, GradComponent::shape, GradComponent::mse,
        GradComponent::strad_paper,    GradComponent::strad_monotone, GradComponent::model_mse,
        GradComponent::model_strad,
    };
    return all;
}

std::optional<GradComponent> parse_grad_component(const std::string& name) {
    for (auto c : all_grad_components()) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

VectorXd central_difference(const std::function<double(const VectorXd&)>& f, const VectorXd& x, double step) {
    VectorXd out(x.size());
    VectorXd probe = x;
    for (Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + step;
        const double up = f(probe);
        probe(i) = x(i) - step;
        const double down = f(probe);
        probe(i) = x(i);
        out(i) = (up - down) / (2.0 * step);
    }
    return out;
}

double relative_error(const VectorXd& a, const VectorXd& b) {
    const double denom = a.norm() + b.norm();
    if (denom == 0.0) return 0.0;
    return (a - b).norm() / denom;
}

bool GradcheckReport::passed() const {
    for (const auto& c : components) {
        if (!c.passed) return false;
    }
    return !components.empty();
}

std::string GradcheckReport::to_text() const {
    std::ostringstream out;
    out << std::left << std::setw(24) << "component" << std::setw(16) << "max_rel_error" << std::setw(12)
        << "tolerance" << std::setw(10) << "checked" << std::setw(10) << "excluded" << "result\n";
    for (const auto& c : components) {
        out << std::left << std::setw(24) << to_string(c.component) << std::setw(16) << std::scientific
            << std::setprecision(3) << c.max_rel_error << std::setw(12) << c.tolerance << std::defaultfloat
            << std::setw(10) << c.checked << std::setw(10) << c.excluded << (c.passed ? "PASS" : "FAIL") << '\n';
    }
    out << (passed() ? "gradcheck passed\n" : "gradcheck FAILED\n");
    return out.str();
}

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
    GradcheckReport report;
    for (auto c : all_grad_components()) {
        // Each component draws from its own stream so reports are stable
        // when components are added or reordered.
        std::mt19937_64 rng(options.seed * 1000003ULL + static_cast<std::uint64_t>(c) + 1);
        if (c == GradComponent::model_mse || c == GradComponent::model_strad) {
            report.components.push_back(check_model_component(c, options, rng));
        } else {
            report.components.push_back(check_loss_component(c, options, rng));
        }
    }
    return report;
}

} // namespace strad

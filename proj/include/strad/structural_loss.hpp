#pragma once

#include "strad/errors.hpp"
#include "strad/spectral.hpp"
#include "strad/types.hpp"

#include <cmath>
#include <string>

namespace strad {

enum class TrendVariant {
    paper,     // -ln(D + eps)
    monotone,  // ln(D + eps) - ln(eps); zero at D = 0, increasing in D
};

struct LossWeights {
    double lambda1 = 1.5;   // trend
    double lambda2 = 10.0;  // seasonality
    double lambda3 = 1.0;   // shape
    double epsilon = 1e-7;
    TrendVariant trend_variant = TrendVariant::monotone;
    SpectralNorm spectral_norm = SpectralNorm::modulus;

    void validate() const {
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgumentError("epsilon must be positive");
        for (double l : {lambda1, lambda2, lambda3}) {
            if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidArgumentError("loss weights must be finite and >= 0");
        }
        if (lambda1 == 0.0 && lambda2 == 0.0 && lambda3 == 0.0) {
            throw InvalidArgumentError("at least one loss weight must be positive");
        }
    }
};

template <typename Scalar>
struct LossBreakdown {
    Scalar trend = 0;
    Scalar seasonality = 0;
    Scalar shape = 0;
    Scalar total = 0;
};

namespace detail {

template <typename DerivedX, typename DerivedY>
void require_same_shape(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw ShapeMismatchError("window shapes differ: " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                                 " vs " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
    }
}

template <typename Scalar>
Scalar sign_or_zero(Scalar v) {
    return v > 0 ? Scalar(1) : (v < 0 ? Scalar(-1) : Scalar(0));
}

inline constexpr double kSlopeKink = 1e-12;

} // namespace detail

// Normalized time axis tau_j = -1 + 2j/(t-1), the degree-1 Legendre domain.
template <typename Scalar = double>
Vector<Scalar> trend_axis(Index t) {
    if (t < 2) throw InvalidArgumentError("trend fit needs at least 2 points, got " + std::to_string(t));
    return Vector<Scalar>::LinSpaced(t, Scalar(-1), Scalar(1));
}

// OLS slope of every channel against the normalized time axis. The axis is
// centred, so the slope reduces to sum(tau x) / sum(tau^2).
template <typename Derived>
Vector<typename Derived::Scalar> trend_fit(const Eigen::MatrixBase<Derived>& window) {
    using Scalar = typename Derived::Scalar;
    const auto tau = trend_axis<Scalar>(window.rows());
    return (window.transpose() * tau) / tau.squaredNorm();
}

// Slope discrepancy D = sum_c |a_c - b_c| * sum_j |tau_j|. Intercepts are
// not compared.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar trend_discrepancy(const Eigen::MatrixBase<DerivedX>& x,
                                            const Eigen::MatrixBase<DerivedY>& x_rec) {
    using Scalar = typename DerivedX::Scalar;
    detail::require_same_shape(x, x_rec);
    const auto tau = trend_axis<Scalar>(x.rows());
    return (trend_fit(x) - trend_fit(x_rec)).cwiseAbs().sum() * tau.cwiseAbs().sum();
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar trend_loss(const Eigen::MatrixBase<DerivedX>& x,
                                     const Eigen::MatrixBase<DerivedY>& x_rec,
                                     double epsilon,
                                     TrendVariant variant) {
    using Scalar = typename DerivedX::Scalar;
    const Scalar d = trend_discrepancy(x, x_rec);
    const Scalar eps(epsilon);
    if (variant == TrendVariant::paper) return -std::log(d + eps);
    return std::log(d + eps) - std::log(eps);
}

template <typename DerivedX, typename DerivedY>
Matrix<typename DerivedX::Scalar> trend_loss_grad(const Eigen::MatrixBase<DerivedX>& x,
                                                  const Eigen::MatrixBase<DerivedY>& x_rec,
                                                  double epsilon,
                                                  TrendVariant variant) {
    using Scalar = typename DerivedX::Scalar;
    detail::require_same_shape(x, x_rec);
    const auto tau = trend_axis<Scalar>(x.rows());
    const Scalar abs_tau_sum = tau.cwiseAbs().sum();
    const Vector<Scalar> diff = trend_fit(x_rec) - trend_fit(x);  // b - a
    const Scalar d = diff.cwiseAbs().sum() * abs_tau_sum;
    const Scalar outer = (variant == TrendVariant::paper ? Scalar(-1) : Scalar(1)) / (d + Scalar(epsilon));

    // d b_c / d x_rec(j, c) = tau_j / sum(tau^2)
    const Vector<Scalar> slope_sensitivity = tau / tau.squaredNorm();
    Vector<Scalar> channel_scale(diff.size());
    for (Index c = 0; c < diff.size(); ++c) {
        const Scalar s = std::abs(diff(c)) < Scalar(detail::kSlopeKink) ? Scalar(0) : detail::sign_or_zero(diff(c));
        channel_scale(c) = outer * s * abs_tau_sum;
    }
    return slope_sensitivity * channel_scale.transpose();
}

// Sum over channels of the spectral L1 distance.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar seasonality_loss(const Eigen::MatrixBase<DerivedX>& x,
                                           const Eigen::MatrixBase<DerivedY>& x_rec,
                                           SpectralNorm norm = SpectralNorm::modulus) {
    using Scalar = typename DerivedX::Scalar;
    detail::require_same_shape(x, x_rec);
    Scalar total = 0;
    for (Index c = 0; c < x.cols(); ++c) total += spectral_l1(x.col(c), x_rec.col(c), norm);
    return total;
}

template <typename DerivedX, typename DerivedY>
Matrix<typename DerivedX::Scalar> seasonality_loss_grad(const Eigen::MatrixBase<DerivedX>& x,
                                                        const Eigen::MatrixBase<DerivedY>& x_rec,
                                                        SpectralNorm norm = SpectralNorm::modulus) {
    using Scalar = typename DerivedX::Scalar;
    detail::require_same_shape(x, x_rec);
    Matrix<Scalar> grad(x.rows(), x.cols());
    for (Index c = 0; c < x.cols(); ++c) grad.col(c) = spectral_l1_grad(x.col(c), x_rec.col(c), norm);
    return grad;
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar shape_loss(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& x_rec) {
    detail::require_same_shape(x, x_rec);
    return (x - x_rec).cwiseAbs().sum();
}

template <typename DerivedX, typename DerivedY>
Matrix<typename DerivedX::Scalar> shape_loss_grad(const Eigen::MatrixBase<DerivedX>& x,
                                                  const Eigen::MatrixBase<DerivedY>& x_rec) {
    using Scalar = typename DerivedX::Scalar;
    detail::require_same_shape(x, x_rec);
    return (x_rec - x).unaryExpr([](Scalar v) { return detail::sign_or_zero(v); });
}

template <typename DerivedX, typename DerivedY>
LossBreakdown<typename DerivedX::Scalar> strad_loss(const Eigen::MatrixBase<DerivedX>& x,
                                                    const Eigen::MatrixBase<DerivedY>& x_rec,
                                                    const LossWeights& w) {
    using Scalar = typename DerivedX::Scalar;
    w.validate();
    LossBreakdown<Scalar> out;
    out.trend = trend_loss(x, x_rec, w.epsilon, w.trend_variant);
    out.seasonality = seasonality_loss(x, x_rec, w.spectral_norm);
    out.shape = shape_loss(x, x_rec);
    out.total = Scalar(w.lambda1) * out.trend + Scalar(w.lambda2) * out.seasonality + Scalar(w.lambda3) * out.shape;
    return out;
}

template <typename DerivedX, typename DerivedY>
Matrix<typename DerivedX::Scalar> strad_grad(const Eigen::MatrixBase<DerivedX>& x,
                                             const Eigen::MatrixBase<DerivedY>& x_rec,
                                             const LossWeights& w) {
    using Scalar = typename DerivedX::Scalar;
    w.validate();
    const Matrix<Scalar> gt = trend_loss_grad(x, x_rec, w.epsilon, w.trend_variant);
    const Matrix<Scalar> gs = seasonality_loss_grad(x, x_rec, w.spectral_norm);
    const Matrix<Scalar> gp = shape_loss_grad(x, x_rec);
    return Scalar(w.lambda1) * gt + Scalar(w.lambda2) * gs + Scalar(w.lambda3) * gp;
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar mse_loss(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& x_rec) {
    detail::require_same_shape(x, x_rec);
    return (x - x_rec).squaredNorm() / static_cast<typename DerivedX::Scalar>(x.size());
}

template <typename DerivedX, typename DerivedY>
Matrix<typename DerivedX::Scalar> mse_loss_grad(const Eigen::MatrixBase<DerivedX>& x,
                                                const Eigen::MatrixBase<DerivedY>& x_rec) {
    using Scalar = typename DerivedX::Scalar;
    detail::require_same_shape(x, x_rec);
    return (x_rec - x) * (Scalar(2) / static_cast<Scalar>(x.size()));
}

} // namespace strad

#pragma once

#include "strad/errors.hpp"
#include "strad/types.hpp"

#include <cmath>
#include <numbers>

namespace strad {

// Unnormalized forward DFT: bin k holds sum_j x_j exp(-2 pi i j k / n).
template <typename Scalar>
using Spectrum = ComplexVector<Scalar>;

// How the element-wise L1 norm treats a complex bin difference.
enum class SpectralNorm {
    modulus,    // |d|
    real_imag,  // |Re d| + |Im d|
};

namespace detail {

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

// O(n^2) complex transform; sign = -1 forward, +1 inverse (unscaled).
template <typename Scalar>
ComplexVector<Scalar> naive_transform(const ComplexVector<Scalar>& x, int sign) {
    const Index n = x.size();
    ComplexVector<Scalar> out(n);
    const Scalar base = sign * 2 * std::numbers::pi_v<Scalar> / static_cast<Scalar>(n);
    for (Index k = 0; k < n; ++k) {
        std::complex<Scalar> acc(0, 0);
        for (Index j = 0; j < n; ++j) {
            // Reduce j*k mod n before scaling to keep the angle small.
            const Scalar angle = base * static_cast<Scalar>((j * k) % n);
            acc += x(j) * std::complex<Scalar>(std::cos(angle), std::sin(angle));
        }
        out(k) = acc;
    }
    return out;
}

// Iterative radix-2 Cooley-Tukey, in place; n must be a power of two.
template <typename Scalar>
void radix2_transform(ComplexVector<Scalar>& a, int sign) {
    const Index n = a.size();
    for (Index i = 1, j = 0; i < n; ++i) {
        Index bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a(i), a(j));
    }
    for (Index len = 2; len <= n; len <<= 1) {
        const Scalar step = sign * 2 * std::numbers::pi_v<Scalar> / static_cast<Scalar>(len);
        const Index half = len / 2;
        for (Index i = 0; i < n; i += len) {
            for (Index k = 0; k < half; ++k) {
                // Twiddles computed directly rather than by recurrence to bound drift.
                const Scalar angle = step * static_cast<Scalar>(k);
                const std::complex<Scalar> w(std::cos(angle), std::sin(angle));
                const auto u = a(i + k);
                const auto v = a(i + k + half) * w;
                a(i + k) = u + v;
                a(i + k + half) = u - v;
            }
        }
    }
}

template <typename Scalar>
ComplexVector<Scalar> complex_transform(ComplexVector<Scalar> x, int sign) {
    if (x.size() == 0) return x;
    if (!is_power_of_two(x.size())) return naive_transform<Scalar>(x, sign);
    radix2_transform<Scalar>(x, sign);
    return x;
}

template <typename Derived>
ComplexVector<typename Derived::Scalar> to_complex(const Eigen::MatrixBase<Derived>& x) {
    return x.template cast<std::complex<typename Derived::Scalar>>();
}

} // namespace detail

// Reference O(n^2) transform.
template <typename Derived>
Spectrum<typename Derived::Scalar> dft_naive(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    return detail::naive_transform<Scalar>(detail::to_complex(x), -1);
}

// Radix-2 for power-of-two lengths, naive fallback otherwise.
template <typename Derived>
Spectrum<typename Derived::Scalar> fft_forward(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    return detail::complex_transform<Scalar>(detail::to_complex(x), -1);
}

// Inverse transform scaled by 1/n; returns the real part.
template <typename Scalar>
Vector<Scalar> fft_inverse(const Spectrum<Scalar>& s) {
    const Index n = s.size();
    if (n == 0) return {};
    const auto z = detail::complex_transform<Scalar>(s, +1);
    return z.real() / static_cast<Scalar>(n);
}

namespace detail {

template <typename DerivedX, typename DerivedY>
Spectrum<typename DerivedX::Scalar> difference_spectrum(const Eigen::MatrixBase<DerivedX>& x,
                                                       const Eigen::MatrixBase<DerivedY>& y) {
    if (x.size() != y.size()) {
        throw ShapeMismatchError("spectral distance needs equal lengths, got " + std::to_string(x.size()) +
                                 " and " + std::to_string(y.size()));
    }
    // F(y) - F(x) = F(y - x) by linearity.
    using Scalar = typename DerivedX::Scalar;
    const Vector<Scalar> diff = y.template cast<Scalar>() - x;
    return fft_forward(diff);
}

} // namespace detail

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar spectral_l1(const Eigen::MatrixBase<DerivedX>& x,
                                      const Eigen::MatrixBase<DerivedY>& y,
                                      SpectralNorm norm = SpectralNorm::modulus) {
    const auto d = detail::difference_spectrum(x, y);
    if (norm == SpectralNorm::modulus) return d.cwiseAbs().sum();
    return d.real().cwiseAbs().sum() + d.imag().cwiseAbs().sum();
}

inline constexpr double kSpectralKink = 1e-12;

// Gradient of spectral_l1 with respect to y. With D = F(y - x) and unit
// phases u_k = D_k / |D_k| (0 where |D_k| < kSpectralKink), the adjoint of
// the forward transform gives grad_j = Re sum_k u_k exp(+2 pi i j k / n),
// i.e. n * Re(ifft(u)).
template <typename DerivedX, typename DerivedY>
Vector<typename DerivedX::Scalar> spectral_l1_grad(const Eigen::MatrixBase<DerivedX>& x,
                                                   const Eigen::MatrixBase<DerivedY>& y,
                                                   SpectralNorm norm = SpectralNorm::modulus) {
    using Scalar = typename DerivedX::Scalar;
    const auto d = detail::difference_spectrum(x, y);
    const Index n = d.size();
    Spectrum<Scalar> u(n);
    const auto sign = [](Scalar v) {
        return std::abs(v) < Scalar(kSpectralKink) ? Scalar(0) : (v > 0 ? Scalar(1) : Scalar(-1));
    };
    for (Index k = 0; k < n; ++k) {
        if (norm == SpectralNorm::modulus) {
            const Scalar mag = std::abs(d(k));
            u(k) = mag < Scalar(kSpectralKink) ? std::complex<Scalar>(0, 0) : d(k) / mag;
        } else {
            u(k) = std::complex<Scalar>(sign(d(k).real()), sign(d(k).imag()));
        }
    }
    return fft_inverse<Scalar>(u) * static_cast<Scalar>(n);
}

} // namespace strad

#pragma once

#include "strad/errors.hpp"
#include "strad/types.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace strad {

template <typename Scalar>
struct DenseLayer {
    Matrix<Scalar> weight;  // out x in
    Vector<Scalar> bias;    // out
};

// Per-layer weights and biases; also used for gradients and Adam moments.
template <typename Scalar>
using ParameterSet = std::vector<DenseLayer<Scalar>>;

// Fully connected autoencoder: tanh on hidden layers, identity on the output.
// layer_sizes runs input -> hidden... -> latent -> hidden... -> output, with
// output size equal to input size.
template <typename Scalar>
struct DenseAutoencoder {
    std::vector<Index> layer_sizes;
    ParameterSet<Scalar> layers;

    Index input_size() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
};

using Autoencoder = DenseAutoencoder<double>;

inline void validate_layer_sizes(const std::vector<Index>& sizes) {
    if (sizes.size() < 2) throw InvalidArgumentError("autoencoder needs at least an input and an output layer");
    for (Index s : sizes) {
        if (s < 1) throw InvalidArgumentError("layer sizes must be positive");
    }
    if (sizes.front() != sizes.back()) {
        throw InvalidArgumentError("output size " + std::to_string(sizes.back()) + " differs from input size " +
                                   std::to_string(sizes.front()));
    }
}

template <typename Scalar>
ParameterSet<Scalar> zeros_like(const ParameterSet<Scalar>& params) {
    ParameterSet<Scalar> out;
    out.reserve(params.size());
    for (const auto& l : params) {
        out.push_back({Matrix<Scalar>::Zero(l.weight.rows(), l.weight.cols()), Vector<Scalar>::Zero(l.bias.size())});
    }
    return out;
}

template <typename Scalar>
Index parameter_count(const ParameterSet<Scalar>& params) {
    Index n = 0;
    for (const auto& l : params) n += l.weight.size() + l.bias.size();
    return n;
}

// Flat view in checkpoint order: per layer, weights row-major then biases.
template <typename Scalar>
Vector<Scalar> flatten(const ParameterSet<Scalar>& params) {
    Vector<Scalar> flat(parameter_count(params));
    Index k = 0;
    for (const auto& l : params) {
        for (Index i = 0; i < l.weight.rows(); ++i) {
            for (Index j = 0; j < l.weight.cols(); ++j) flat(k++) = l.weight(i, j);
        }
        for (Index i = 0; i < l.bias.size(); ++i) flat(k++) = l.bias(i);
    }
    return flat;
}

template <typename Scalar>
void unflatten(const Vector<Scalar>& flat, ParameterSet<Scalar>& params) {
    if (flat.size() != parameter_count(params)) throw ShapeMismatchError("flat parameter vector has the wrong size");
    Index k = 0;
    for (auto& l : params) {
        for (Index i = 0; i < l.weight.rows(); ++i) {
            for (Index j = 0; j < l.weight.cols(); ++j) l.weight(i, j) = flat(k++);
        }
        for (Index i = 0; i < l.bias.size(); ++i) l.bias(i) = flat(k++);
    }
}

template <typename Scalar>
bool all_finite(const ParameterSet<Scalar>& params) {
    for (const auto& l : params) {
        if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
}

template <typename Scalar>
void require_same_shapes(const ParameterSet<Scalar>& a, const ParameterSet<Scalar>& b) {
    bool ok = a.size() == b.size();
    for (std::size_t l = 0; ok && l < a.size(); ++l) {
        ok = a[l].weight.rows() == b[l].weight.rows() && a[l].weight.cols() == b[l].weight.cols() &&
             a[l].bias.size() == b[l].bias.size();
    }
    if (!ok) throw ShapeMismatchError("parameter shapes do not match the model");
}

// Glorot-uniform weights, zero biases; fully determined by seed.
template <typename Scalar = double>
DenseAutoencoder<Scalar> init_model(const std::vector<Index>& layer_sizes, std::uint64_t seed) {
    validate_layer_sizes(layer_sizes);
    DenseAutoencoder<Scalar> model;
    model.layer_sizes = layer_sizes;
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const Index fan_in = layer_sizes[l];
        const Index fan_out = layer_sizes[l + 1];
        const Scalar limit = std::sqrt(Scalar(6) / static_cast<Scalar>(fan_in + fan_out));
        std::uniform_real_distribution<Scalar> dist(-limit, limit);
        DenseLayer<Scalar> layer{Matrix<Scalar>(fan_out, fan_in), Vector<Scalar>::Zero(fan_out)};
        for (Index i = 0; i < fan_out; ++i) {
            for (Index j = 0; j < fan_in; ++j) layer.weight(i, j) = dist(rng);
        }
        model.layers.push_back(std::move(layer));
    }
    return model;
}

// Windows are flattened time-major: flat(j * d + c) = window(j, c).
template <typename Derived>
Vector<typename Derived::Scalar> flatten_window(const Eigen::MatrixBase<Derived>& window) {
    using Scalar = typename Derived::Scalar;
    Vector<Scalar> flat(window.size());
    Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(), window.rows(),
                                                                                     window.cols()) = window;
    return flat;
}

template <typename Scalar>
Matrix<Scalar> unflatten_window(const Vector<Scalar>& flat, Index rows, Index cols) {
    return Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(), rows,
                                                                                                  cols);
}

// Layer inputs/outputs kept for the backward pass; activations[0] is the
// flattened input and activations.back() the reconstruction.
template <typename Scalar>
struct ForwardTrace {
    std::vector<Vector<Scalar>> activations;

    Matrix<Scalar> reconstruction(Index rows, Index cols) const {
        return unflatten_window(activations.back(), rows, cols);
    }
};

template <typename Scalar, typename Derived>
ForwardTrace<Scalar> forward_trace(const DenseAutoencoder<Scalar>& model, const Eigen::MatrixBase<Derived>& window) {
    if (window.size() != model.input_size()) {
        throw ShapeMismatchError("window has " + std::to_string(window.size()) + " entries, model expects " +
                                 std::to_string(model.input_size()));
    }
    ForwardTrace<Scalar> trace;
    trace.activations.reserve(model.layers.size() + 1);
    trace.activations.push_back(flatten_window(window.template cast<Scalar>()));
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        Vector<Scalar> z = layer.weight * trace.activations.back() + layer.bias;
        if (l + 1 < model.layers.size()) z = z.array().tanh().matrix();
        trace.activations.push_back(std::move(z));
    }
    return trace;
}

// Reconstruction with the same t x d shape as the input window.
template <typename Scalar, typename Derived>
Matrix<Scalar> forward(const DenseAutoencoder<Scalar>& model, const Eigen::MatrixBase<Derived>& window) {
    return forward_trace(model, window).reconstruction(window.rows(), window.cols());
}

// Vector-Jacobian product: gradient of (loss o forward) with respect to every
// parameter, given d loss / d reconstruction.
template <typename Scalar, typename Derived>
ParameterSet<Scalar> parameter_gradients(const DenseAutoencoder<Scalar>& model,
                                         const ForwardTrace<Scalar>& trace,
                                         const Eigen::MatrixBase<Derived>& loss_grad) {
    const Index out_size = model.layer_sizes.back();
    if (loss_grad.size() != out_size || trace.activations.size() != model.layers.size() + 1) {
        throw ShapeMismatchError("loss gradient does not match the reconstruction shape");
    }
    ParameterSet<Scalar> grads(model.layers.size());
    Vector<Scalar> delta = flatten_window(loss_grad.template cast<Scalar>());
    for (std::size_t l = model.layers.size(); l-- > 0;) {
        const auto& input = trace.activations[l];
        grads[l].weight = delta * input.transpose();
        grads[l].bias = delta;
        if (l > 0) {
            // input = tanh(z) for hidden layers, so d input / d z = 1 - input^2.
            delta = (model.layers[l].weight.transpose() * delta).cwiseProduct(
                (Scalar(1) - input.array().square()).matrix());
        }
    }
    return grads;
}

template <typename Scalar, typename DerivedW, typename DerivedG>
ParameterSet<Scalar> parameter_gradients(const DenseAutoencoder<Scalar>& model,
                                         const Eigen::MatrixBase<DerivedW>& window,
                                         const Eigen::MatrixBase<DerivedG>& loss_grad) {
    if (loss_grad.rows() != window.rows() || loss_grad.cols() != window.cols()) {
        throw ShapeMismatchError("loss gradient does not match the reconstruction shape");
    }
    return parameter_gradients(model, forward_trace(model, window), loss_grad);
}

// into += scale * g
template <typename Scalar>
void accumulate(ParameterSet<Scalar>& into, const ParameterSet<Scalar>& g, Scalar scale = Scalar(1)) {
    require_same_shapes(into, g);
    for (std::size_t l = 0; l < into.size(); ++l) {
        into[l].weight += scale * g[l].weight;
        into[l].bias += scale * g[l].bias;
    }
}

template <typename Scalar>
struct AdamState {
    std::int64_t step = 0;
    ParameterSet<Scalar> first_moment;
    ParameterSet<Scalar> second_moment;
    Scalar learning_rate = Scalar(1e-3);
    Scalar beta1 = Scalar(0.9);
    Scalar beta2 = Scalar(0.999);
    Scalar epsilon = Scalar(1e-8);
};

template <typename Scalar>
AdamState<Scalar> make_adam_state(const DenseAutoencoder<Scalar>& model, Scalar learning_rate = Scalar(1e-3)) {
    AdamState<Scalar> state;
    state.first_moment = zeros_like(model.layers);
    state.second_moment = zeros_like(model.layers);
    state.learning_rate = learning_rate;
    return state;
}

// One bias-corrected Adam update, in place.
template <typename Scalar>
void adam_step(DenseAutoencoder<Scalar>& model, const ParameterSet<Scalar>& grads, AdamState<Scalar>& state) {
    require_same_shapes(model.layers, grads);
    require_same_shapes(model.layers, state.first_moment);
    require_same_shapes(model.layers, state.second_moment);
    if (!all_finite(grads)) throw NumericError("non-finite gradient passed to the optimizer");

    ++state.step;
    const Scalar b1 = state.beta1;
    const Scalar b2 = state.beta2;
    const Scalar correction1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
    const Scalar correction2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));
    auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
        m = b1 * m + (Scalar(1) - b1) * g;
        v = b2 * v + (Scalar(1) - b2) * g.cwiseAbs2();
        param.array() -= state.learning_rate * (m.array() / correction1) /
                         ((v.array() / correction2).sqrt() + state.epsilon);
    };
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        update(model.layers[l].weight, grads[l].weight, state.first_moment[l].weight, state.second_moment[l].weight);
        update(model.layers[l].bias, grads[l].bias, state.first_moment[l].bias, state.second_moment[l].bias);
    }
    if (!all_finite(model.layers)) throw NumericError("optimizer step produced non-finite parameters");
}

// Text checkpoint, see README for the layout.
void save_checkpoint(const Autoencoder& model,
                     const std::filesystem::path& path,
                     const std::vector<std::string>& comments = {});
Autoencoder load_checkpoint(const std::filesystem::path& path);

} // namespace strad

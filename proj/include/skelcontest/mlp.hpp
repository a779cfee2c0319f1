#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "skelcontest/error.hpp"
#include "skelcontest/rng.hpp"

namespace skelcontest::dqn {

/// Raised when an update would leave non-finite parameters, or a checkpoint is corrupt.
class TrainingError : public Error {
public:
    using Error::Error;
};

/// One regression sample for the Q-value objective: drive output `action`
/// of the network at `input` toward `target`.
struct QSample {
    std::span<const double> input;
    std::size_t action = 0;
    double target = 0.0;
};

/// Fully connected network, rectifier on hidden layers, identity output.
/// Parameters are stored flat, layer by layer: the weight matrix
/// (out x in, row-major) followed by the bias vector.
class Mlp {
public:
    Mlp() = default;
    /// All-zero parameters.
    explicit Mlp(std::vector<std::size_t> layer_sizes);

    /// Glorot-uniform weights, zero biases.
    static Mlp glorot(std::vector<std::size_t> layer_sizes, Rng& rng);

    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    std::size_t input_size() const { return sizes_.front(); }
    std::size_t output_size() const { return sizes_.back(); }
    std::size_t layer_count() const { return sizes_.size() - 1; }

    std::span<const double> parameters() const { return params_; }
    std::span<double> parameters() { return params_; }

    double& weight(std::size_t layer, std::size_t out, std::size_t in);
    double& bias(std::size_t layer, std::size_t out);

    std::vector<double> forward(std::span<const double> input) const;

    /// Mean squared error over the samples; the gradient with respect to the
    /// flat parameter vector is written into `gradient` (resized as needed).
    double loss_and_gradient(std::span<const QSample> samples, std::vector<double>& gradient) const;
    double loss(std::span<const QSample> samples) const;

    bool all_finite() const;

    void save(std::ostream& out) const;
    static Mlp load(std::istream& in);
    void save_file(const std::string& path) const;
    static Mlp load_file(const std::string& path);

    friend bool operator==(const Mlp&, const Mlp&) = default;

private:
    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const {
        return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
    }

    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

}  // namespace skelcontest::dqn

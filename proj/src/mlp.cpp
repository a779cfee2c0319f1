#include "skelcontest/mlp.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

namespace skelcontest::dqn {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'C', 'Q', 'N'};
constexpr std::uint8_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

}  // namespace

Mlp::Mlp(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw InvalidArgument("an MLP needs at least an input and an output layer");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        if (sizes_[l] == 0 || sizes_[l + 1] == 0) throw InvalidArgument("MLP layer sizes must be positive");
        offsets_.push_back(total);
        total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
    }
    params_.assign(total, 0.0);
}

Mlp Mlp::glorot(std::vector<std::size_t> layer_sizes, Rng& rng) {
    Mlp net(std::move(layer_sizes));
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const std::size_t in = net.sizes_[l];
        const std::size_t out = net.sizes_[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        double* w = net.params_.data() + net.weight_offset(l);
        for (std::size_t i = 0; i < in * out; ++i) w[i] = rng.uniform(-limit, limit);
    }
    return net;
}

double& Mlp::weight(std::size_t layer, std::size_t out, std::size_t in) {
    if (layer >= layer_count() || out >= sizes_[layer + 1] || in >= sizes_[layer]) {
        throw InvalidArgument("weight index out of range");
    }
    return params_[weight_offset(layer) + out * sizes_[layer] + in];
}

double& Mlp::bias(std::size_t layer, std::size_t out) {
    if (layer >= layer_count() || out >= sizes_[layer + 1]) throw InvalidArgument("bias index out of range");
    return params_[bias_offset(layer) + out];
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
    if (input.size() != input_size()) {
        throw InvalidArgument(fmt::format("network expects {} inputs, got {}", input_size(), input.size()));
    }
    std::vector<double> act(input.begin(), input.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < layer_count(); ++l) {
        const std::size_t in = sizes_[l];
        const std::size_t out = sizes_[l + 1];
        const double* w = params_.data() + weight_offset(l);
        const double* b = params_.data() + bias_offset(l);
        next.assign(out, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
            double z = b[o];
            for (std::size_t i = 0; i < in; ++i) z += w[o * in + i] * act[i];
            next[o] = (l + 1 < layer_count()) ? std::max(z, 0.0) : z;
        }
        act.swap(next);
    }
    return act;
}

double Mlp::loss_and_gradient(std::span<const QSample> samples, std::vector<double>& gradient) const {
    if (samples.empty()) throw InvalidArgument("loss over an empty batch");
    gradient.assign(params_.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    double total = 0.0;

    std::vector<std::vector<double>> acts(sizes_.size());
    std::vector<double> delta, prev_delta;
    for (const auto& s : samples) {
        if (s.action >= output_size()) throw InvalidArgument("sample action out of range");
        if (s.input.size() != input_size()) throw InvalidArgument("sample input has the wrong width");

        acts[0].assign(s.input.begin(), s.input.end());
        for (std::size_t l = 0; l < layer_count(); ++l) {
            const std::size_t in = sizes_[l];
            const std::size_t out = sizes_[l + 1];
            const double* w = params_.data() + weight_offset(l);
            const double* b = params_.data() + bias_offset(l);
            auto& a = acts[l + 1];
            a.assign(out, 0.0);
            for (std::size_t o = 0; o < out; ++o) {
                double z = b[o];
                for (std::size_t i = 0; i < in; ++i) z += w[o * in + i] * acts[l][i];
                a[o] = (l + 1 < layer_count()) ? std::max(z, 0.0) : z;
            }
        }

        const double err = acts.back()[s.action] - s.target;
        total += err * err;

        // Only the selected output carries error.
        delta.assign(output_size(), 0.0);
        delta[s.action] = 2.0 * err * inv_n;
        for (std::size_t l = layer_count(); l-- > 0;) {
            const std::size_t in = sizes_[l];
            const std::size_t out = sizes_[l + 1];
            const double* w = params_.data() + weight_offset(l);
            double* gw = gradient.data() + weight_offset(l);
            double* gb = gradient.data() + bias_offset(l);
            for (std::size_t o = 0; o < out; ++o) {
                if (delta[o] == 0.0) continue;
                gb[o] += delta[o];
                for (std::size_t i = 0; i < in; ++i) gw[o * in + i] += delta[o] * acts[l][i];
            }
            if (l == 0) break;
            prev_delta.assign(in, 0.0);
            for (std::size_t i = 0; i < in; ++i) {
                if (acts[l][i] <= 0.0) continue;  // rectifier gate
                double g = 0.0;
                for (std::size_t o = 0; o < out; ++o) g += w[o * in + i] * delta[o];
                prev_delta[i] = g;
            }
            delta.swap(prev_delta);
        }
    }
    return total * inv_n;
}

double Mlp::loss(std::span<const QSample> samples) const {
    if (samples.empty()) throw InvalidArgument("loss over an empty batch");
    double total = 0.0;
    for (const auto& s : samples) {
        const double err = forward(s.input).at(s.action) - s.target;
        total += err * err;
    }
    return total / static_cast<double>(samples.size());
}

bool Mlp::all_finite() const {
    return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

// Layout: magic "SCQN", version byte, u32 layer count, u32 per layer size,
// then every parameter as a little-endian float64.
void Mlp::save(std::ostream& out) const {
    out.write(kMagic.data(), kMagic.size());
    out.put(static_cast<char>(kVersion));
    auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
    put_u32(static_cast<std::uint32_t>(sizes_.size()));
    for (auto s : sizes_) put_u32(static_cast<std::uint32_t>(s));
    out.write(reinterpret_cast<const char*>(params_.data()),
              static_cast<std::streamsize>(params_.size() * sizeof(double)));
    if (!out) throw Error("failed to write checkpoint");
}

Mlp Mlp::load(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw TrainingError("checkpoint has a bad magic number");
    const int version = in.get();
    if (version != kVersion) throw TrainingError(fmt::format("unsupported checkpoint version {}", version));
    auto get_u32 = [&] {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        if (!in) throw TrainingError("checkpoint is truncated");
        return v;
    };
    const std::uint32_t count = get_u32();
    if (count < 2 || count > 64) throw TrainingError("checkpoint has an implausible layer count");
    std::vector<std::size_t> sizes;
    for (std::uint32_t i = 0; i < count; ++i) sizes.push_back(get_u32());
    Mlp net(std::move(sizes));
    in.read(reinterpret_cast<char*>(net.params_.data()),
            static_cast<std::streamsize>(net.params_.size() * sizeof(double)));
    if (!in) throw TrainingError("checkpoint is truncated");
    if (in.peek() != std::char_traits<char>::eof()) throw TrainingError("checkpoint has trailing bytes");
    return net;
}

void Mlp::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write checkpoint '{}'", path));
    save(out);
}

Mlp Mlp::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open checkpoint '{}'", path));
    return load(in);
}

}  // namespace skelcontest::dqn

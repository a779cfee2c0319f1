#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "skelcontest/skeleton.hpp"

namespace skelcontest::skeleton {

QuantizationBounds::QuantizationBounds(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
        throw InvalidArgument(fmt::format("quantization bounds need lo < hi, got [{}, {}]", lo, hi));
    }
}

namespace {

std::uint8_t quantize(double v, const QuantizationBounds& b) {
    const double c = std::clamp(v, b.lo, b.hi);
    return static_cast<std::uint8_t>(std::lround(255.0 * (c - b.lo) / (b.hi - b.lo)));
}

double dequantize(std::uint8_t q, const QuantizationBounds& b) { return b.lo + q * (b.hi - b.lo) / 255.0; }

}  // namespace

std::vector<std::uint8_t> encode_frame(const SkeletonFrame& frame, const QuantizationBounds& bounds) {
    std::vector<std::uint8_t> out;
    out.reserve(frame.joint_count() * 3);
    for (const auto& p : frame.keypoints) {
        out.push_back(quantize(p.x, bounds));
        out.push_back(quantize(p.y, bounds));
        out.push_back(quantize(p.z, bounds));
    }
    return out;
}

SkeletonFrame decode_frame(std::span<const std::uint8_t> bytes, std::size_t joint_count,
                           const QuantizationBounds& bounds) {
    if (bytes.size() != joint_count * 3) {
        throw InvalidArgument(fmt::format("payload length mismatch: got {} bytes, expected {} for {} joints",
                                          bytes.size(), joint_count * 3, joint_count));
    }
    SkeletonFrame frame;
    frame.keypoints.reserve(joint_count);
    for (std::size_t j = 0; j < joint_count; ++j) {
        frame.keypoints.push_back({dequantize(bytes[3 * j], bounds), dequantize(bytes[3 * j + 1], bounds),
                                   dequantize(bytes[3 * j + 2], bounds)});
    }
    return frame;
}

double compression_ratio(std::uint64_t width, std::uint64_t height, std::uint64_t bits_per_pixel,
                         std::size_t joint_count) {
    if (width == 0 || height == 0 || bits_per_pixel == 0 || joint_count == 0) {
        throw InvalidArgument("compression_ratio: all inputs must be positive");
    }
    const double image_bytes = static_cast<double>(width) * static_cast<double>(height) *
                               static_cast<double>(bits_per_pixel) / 8.0;
    return image_bytes / static_cast<double>(joint_count * 3);
}

}  // namespace skelcontest::skeleton

#include "skelcontest/skeleton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "skelcontest/rng.hpp"

namespace skelcontest::skeleton {

bool Keypoint3::is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

double squared_distance(const Keypoint3& a, const Keypoint3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

SkeletonSequence::SkeletonSequence(std::vector<SkeletonFrame> frames, int native_rate, std::string user_label)
    : frames_(std::move(frames)), native_rate_(native_rate), user_label_(std::move(user_label)) {
    if (frames_.empty()) throw InvalidArgument("skeleton sequence needs at least one frame");
    if (native_rate_ < 1) throw InvalidArgument(fmt::format("native rate must be positive, got {}", native_rate_));
    const std::size_t k = frames_.front().joint_count();
    if (k == 0) throw InvalidArgument("skeleton frames need at least one joint");
    for (std::size_t i = 0; i < frames_.size(); ++i) {
        if (frames_[i].joint_count() != k) {
            throw InvalidArgument(
                fmt::format("frame {} has {} joints, expected {}", i + 1, frames_[i].joint_count(), k));
        }
        for (const auto& p : frames_[i].keypoints) {
            if (!p.is_finite()) throw InvalidArgument(fmt::format("frame {} has a non-finite coordinate", i + 1));
        }
    }
}

// ---------------------------------------------------------------------------

std::string_view to_string(MotionKind kind) {
    switch (kind) {
        case MotionKind::run: return "run";
        case MotionKind::dance: return "dance";
        case MotionKind::wave: return "wave";
        case MotionKind::stand: return "stand";
    }
    return "stand";
}

MotionKind parse_motion_kind(std::string_view name) {
    for (auto kind : {MotionKind::run, MotionKind::dance, MotionKind::wave, MotionKind::stand}) {
        if (to_string(kind) == name) return kind;
    }
    throw InvalidArgument(fmt::format("unknown motion profile '{}'", name));
}

namespace {

// elbows and wrists
constexpr std::array<std::size_t, 4> kArmJoints = {7, 8, 9, 10};

constexpr std::array<Keypoint3, kDefaultJointCount> kRestPose = {{
    {0.00, 0.75, 0.08},   // nose
    {0.03, 0.78, 0.06},   {-0.03, 0.78, 0.06},  // eyes
    {0.07, 0.76, 0.00},   {-0.07, 0.76, 0.00},  // ears
    {0.19, 0.60, 0.00},   {-0.19, 0.60, 0.00},  // shoulders
    {0.24, 0.30, 0.00},   {-0.24, 0.30, 0.00},  // elbows
    {0.26, 0.05, 0.02},   {-0.26, 0.05, 0.02},  // wrists
    {0.11, 0.05, 0.00},   {-0.11, 0.05, 0.00},  // hips
    {0.12, -0.40, 0.01},  {-0.12, -0.40, 0.01}, // knees
    {0.12, -0.82, -0.02}, {-0.12, -0.82, -0.02},// ankles
}};

std::vector<std::size_t> all_joints(std::size_t k) {
    std::vector<std::size_t> out(k);
    for (std::size_t j = 0; j < k; ++j) out[j] = j;
    return out;
}

}  // namespace

MotionProfile default_profile(MotionKind kind, std::size_t joint_count) {
    MotionProfile p;
    p.kind = kind;
    switch (kind) {
        case MotionKind::run:
            p.amplitude = 0.25;
            p.temporal_frequency = 2.0;
            p.active_joints = all_joints(joint_count);
            break;
        case MotionKind::dance:
            p.amplitude = 0.18;
            p.temporal_frequency = 1.5;
            p.active_joints = all_joints(joint_count);
            break;
        case MotionKind::wave:
            p.amplitude = 0.10;
            p.temporal_frequency = 1.0;
            for (std::size_t j = 0; j < joint_count; ++j) {
                if (std::find(kArmJoints.begin(), kArmJoints.end(), j % kDefaultJointCount) != kArmJoints.end()) {
                    p.active_joints.push_back(j);
                }
            }
            if (p.active_joints.empty()) p.active_joints = all_joints(joint_count);
            break;
        case MotionKind::stand:
            p.amplitude = 0.005;
            p.temporal_frequency = 0.5;
            p.active_joints = all_joints(joint_count);
            break;
    }
    return p;
}

SkeletonFrame base_pose(std::size_t joint_count) {
    SkeletonFrame frame;
    frame.keypoints.reserve(joint_count);
    for (std::size_t j = 0; j < joint_count; ++j) frame.keypoints.push_back(kRestPose[j % kDefaultJointCount]);
    return frame;
}

SkeletonSequence generate_synthetic(const MotionProfile& profile, std::size_t frame_count, int native_rate,
                                    std::size_t joint_count, std::uint64_t seed, std::string user_label) {
    if (frame_count == 0) throw InvalidArgument("generate_synthetic: frame count must be at least 1");
    if (joint_count == 0) throw InvalidArgument("generate_synthetic: joint count must be at least 1");
    if (native_rate < 1) throw InvalidArgument("generate_synthetic: native rate must be at least 1");
    if (!(profile.amplitude >= 0.0)) throw InvalidArgument("generate_synthetic: amplitude must be non-negative");
    if (!(profile.temporal_frequency > 0.0)) throw InvalidArgument("generate_synthetic: frequency must be positive");
    if (profile.active_joints.empty()) throw InvalidArgument("generate_synthetic: no active joints");

    // Phases and directions are drawn for every joint so that a joint's
    // parameters do not depend on which other joints are active.
    Rng rng(seed);
    std::vector<double> phase(joint_count);
    std::vector<Keypoint3> direction(joint_count);
    for (std::size_t j = 0; j < joint_count; ++j) {
        phase[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double z = rng.uniform(-1.0, 1.0);
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        direction[j] = {r * std::cos(theta), r * std::sin(theta), z};
    }

    std::vector<bool> active(joint_count, false);
    for (auto j : profile.active_joints) {
        if (j >= joint_count) throw InvalidArgument(fmt::format("active joint {} out of range", j));
        active[j] = true;
    }

    const SkeletonFrame rest = base_pose(joint_count);
    const double angular = 2.0 * std::numbers::pi * profile.temporal_frequency / native_rate;
    std::vector<SkeletonFrame> frames(frame_count, rest);
    for (std::size_t i = 0; i < frame_count; ++i) {
        for (std::size_t j = 0; j < joint_count; ++j) {
            if (!active[j]) continue;
            const double s = profile.amplitude * std::sin(angular * static_cast<double>(i) + phase[j]);
            auto& p = frames[i].keypoints[j];
            p.x += s * direction[j].x;
            p.y += s * direction[j].y;
            p.z += s * direction[j].z;
        }
    }
    return SkeletonSequence(std::move(frames), native_rate, std::move(user_label));
}

// ---------------------------------------------------------------------------

std::vector<int> divisors(int n) {
    if (n < 1) throw InvalidArgument(fmt::format("divisors: n must be positive, got {}", n));
    std::vector<int> low, high;
    for (int d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        low.push_back(d);
        if (d != n / d) high.push_back(n / d);
    }
    low.insert(low.end(), high.rbegin(), high.rend());
    return low;
}

namespace {

void check_upload_rate(const SkeletonSequence& seq, int upload_rate) {
    if (upload_rate <= 0) throw InvalidArgument(fmt::format("upload rate must be positive, got {}", upload_rate));
    if (seq.native_rate() % upload_rate != 0) {
        throw InvalidArgument(
            fmt::format("upload rate {} does not divide native rate {}", upload_rate, seq.native_rate()));
    }
}

Keypoint3 lerp(const Keypoint3& a, const Keypoint3& b, double t) {
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)};
}

}  // namespace

SkeletonSequence downsample_render(const SkeletonSequence& seq, int upload_rate, Reconstruction mode) {
    check_upload_rate(seq, upload_rate);
    const std::size_t stride = static_cast<std::size_t>(seq.native_rate() / upload_rate);
    const std::size_t n = seq.frame_count();
    std::vector<SkeletonFrame> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t last = (i / stride) * stride;
        const std::size_t next = last + stride;
        if (mode == Reconstruction::hold || last == i || next >= n) {
            out.push_back(seq.frame(last));
            continue;
        }
        const double t = static_cast<double>(i - last) / static_cast<double>(stride);
        SkeletonFrame f;
        f.keypoints.reserve(seq.joint_count());
        for (std::size_t j = 0; j < seq.joint_count(); ++j) {
            f.keypoints.push_back(lerp(seq.frame(last).keypoints[j], seq.frame(next).keypoints[j], t));
        }
        out.push_back(std::move(f));
    }
    return SkeletonSequence(std::move(out), seq.native_rate(), seq.user_label());
}

double downsampling_loss(const SkeletonSequence& seq, int upload_rate, Reconstruction mode) {
    const SkeletonSequence rendered = downsample_render(seq, upload_rate, mode);
    double total = 0.0;
    for (std::size_t i = 0; i < seq.frame_count(); ++i) {
        const auto& a = seq.frame(i).keypoints;
        const auto& b = rendered.frame(i).keypoints;
        for (std::size_t j = 0; j < a.size(); ++j) total += squared_distance(a[j], b[j]);
    }
    return std::sqrt(total / static_cast<double>(seq.frame_count()));
}

std::vector<double> motion_difference(const SkeletonSequence& seq) {
    if (seq.frame_count() < 2) throw InvalidArgument("motion_difference needs at least two frames");
    std::vector<double> out(seq.frame_count() - 1, 0.0);
    for (std::size_t i = 0; i + 1 < seq.frame_count(); ++i) {
        const auto& a = seq.frame(i).keypoints;
        const auto& b = seq.frame(i + 1).keypoints;
        for (std::size_t j = 0; j < a.size(); ++j) out[i] += std::sqrt(squared_distance(a[j], b[j]));
    }
    return out;
}

}  // namespace skelcontest::skeleton

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skelcontest/error.hpp"

namespace skelcontest::skeleton {

/// Number of joints in the common 17-keypoint body layout.
inline constexpr std::size_t kDefaultJointCount = 17;

/// Joint names of the 17-keypoint layout, in index order.
inline constexpr std::string_view kJointNames[kDefaultJointCount] = {
    "nose",       "left_eye",    "right_eye",  "left_ear",    "right_ear",   "left_shoulder",
    "right_shoulder", "left_elbow", "right_elbow", "left_wrist", "right_wrist", "left_hip",
    "right_hip",  "left_knee",   "right_knee", "left_ankle",  "right_ankle"};

struct Keypoint3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool is_finite() const;
    friend bool operator==(const Keypoint3&, const Keypoint3&) = default;
};

double squared_distance(const Keypoint3& a, const Keypoint3& b);

struct SkeletonFrame {
    std::vector<Keypoint3> keypoints;

    std::size_t joint_count() const { return keypoints.size(); }
    friend bool operator==(const SkeletonFrame&, const SkeletonFrame&) = default;
};

/// A timed series of frames captured at a native rate (frames per second).
/// Construction validates: at least one frame, identical non-zero joint
/// count, finite coordinates, positive rate.
class SkeletonSequence {
public:
    SkeletonSequence(std::vector<SkeletonFrame> frames, int native_rate, std::string user_label = {});

    std::size_t frame_count() const { return frames_.size(); }
    std::size_t joint_count() const { return frames_.front().joint_count(); }
    int native_rate() const { return native_rate_; }
    const std::string& user_label() const { return user_label_; }

    const std::vector<SkeletonFrame>& frames() const { return frames_; }
    const SkeletonFrame& frame(std::size_t i) const { return frames_.at(i); }

    friend bool operator==(const SkeletonSequence&, const SkeletonSequence&) = default;

private:
    std::vector<SkeletonFrame> frames_;
    int native_rate_;
    std::string user_label_;
};

// ---------------------------------------------------------------------------
// Synthetic motion

enum class MotionKind { run, dance, wave, stand };

std::string_view to_string(MotionKind kind);
MotionKind parse_motion_kind(std::string_view name);

struct MotionProfile {
    MotionKind kind = MotionKind::stand;
    double amplitude = 0.0;          // meters
    double temporal_frequency = 1.0; // hertz
    std::vector<std::size_t> active_joints;
};

/// Default profile for a motion kind over a k-joint skeleton. Wave moves the
/// elbows and wrists only; the other kinds move every joint.
MotionProfile default_profile(MotionKind kind, std::size_t joint_count = kDefaultJointCount);

/// Upright rest pose centered at the origin, y up, roughly 1.7 m tall.
/// Joints beyond the 17-keypoint layout reuse the layout cyclically.
SkeletonFrame base_pose(std::size_t joint_count);

/// Deterministic sinusoidal trajectory: each active joint oscillates about
/// the base pose along a seed-derived unit direction with a seed-derived
/// phase. Throws InvalidArgument for zero frames, joints or rate.
SkeletonSequence generate_synthetic(const MotionProfile& profile, std::size_t frame_count, int native_rate,
                                    std::size_t joint_count, std::uint64_t seed, std::string user_label = {});

// ---------------------------------------------------------------------------
// Down-sampling

enum class Reconstruction { hold, linear };

/// Sorted divisors of n (n >= 1).
std::vector<int> divisors(int n);

/// Renders the sequence as seen by a server receiving uploads at `upload_rate`.
/// Uploads happen at frames 0, M/f, 2M/f, ...; frames in between are
/// reconstructed by holding the last upload or, with `linear`, by
/// interpolating toward the next one (held after the last upload).
SkeletonSequence downsample_render(const SkeletonSequence& seq, int upload_rate,
                                   Reconstruction mode = Reconstruction::hold);

/// Root of the per-frame mean of summed squared keypoint errors between the
/// sequence and its rendering at `upload_rate`.
double downsampling_loss(const SkeletonSequence& seq, int upload_rate, Reconstruction mode = Reconstruction::hold);

/// Sum over joints of the Euclidean displacement between consecutive frames.
std::vector<double> motion_difference(const SkeletonSequence& seq);

// ---------------------------------------------------------------------------
// Serialization

enum class SequenceFormat { csv, json };

SequenceFormat parse_sequence_format(std::string_view name);

enum class SequenceErrorKind {
    malformed_row,
    non_finite,
    inconsistent_joint_count,
    duplicate_entry,
    frame_gap,
    schema,
};

/// Parse failure with the offending frame (1-based) when one applies.
class SequenceFormatError : public Error {
public:
    SequenceFormatError(SequenceErrorKind kind, std::string message, std::optional<std::size_t> frame = {});

    SequenceErrorKind kind() const { return kind_; }
    std::optional<std::size_t> frame() const { return frame_; }

private:
    SequenceErrorKind kind_;
    std::optional<std::size_t> frame_;
};

/// CSV carries no rate or label; they are supplied here. JSON carries both.
struct CsvMetadata {
    int native_rate = 60;
    std::string user_label;
};

SkeletonSequence load_sequence(std::istream& in, SequenceFormat format, const CsvMetadata& csv_meta = {});
void save_sequence(std::ostream& out, const SkeletonSequence& seq, SequenceFormat format);

SkeletonSequence load_sequence_file(const std::string& path, SequenceFormat format, const CsvMetadata& csv_meta = {});
std::string save_sequence_string(const SkeletonSequence& seq, SequenceFormat format);

// ---------------------------------------------------------------------------
// Byte codec

struct QuantizationBounds {
    double lo = -2.0;
    double hi = 2.0;

    QuantizationBounds() = default;
    QuantizationBounds(double lo_, double hi_);
};

/// One unsigned byte per axis, joint-major, x/y/z order. Values are clamped
/// into [lo, hi] first, so the payload is always exactly 3k bytes.
std::vector<std::uint8_t> encode_frame(const SkeletonFrame& frame, const QuantizationBounds& bounds = {});

/// Inverse of encode_frame. Throws InvalidArgument when the payload is not 3k bytes.
SkeletonFrame decode_frame(std::span<const std::uint8_t> bytes, std::size_t joint_count,
                           const QuantizationBounds& bounds = {});

/// Raw image bytes per frame divided by the keypoint payload size.
double compression_ratio(std::uint64_t width, std::uint64_t height, std::uint64_t bits_per_pixel,
                         std::size_t joint_count);

}  // namespace skelcontest::skeleton

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "skelcontest/skeleton.hpp"

namespace skelcontest::skeleton {

SequenceFormatError::SequenceFormatError(SequenceErrorKind kind, std::string message,
                                         std::optional<std::size_t> frame)
    : Error(std::move(message)), kind_(kind), frame_(frame) {}

SequenceFormat parse_sequence_format(std::string_view name) {
    if (name == "csv") return SequenceFormat::csv;
    if (name == "json") return SequenceFormat::json;
    throw InvalidArgument(fmt::format("unknown sequence format '{}'", name));
}

namespace {

constexpr std::string_view kCsvHeader = "frame,joint,x,y,z";

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
    field = trim(field);
    if (field.empty()) return false;
    if constexpr (std::is_floating_point_v<T>) {
        // from_chars rejects a leading '+', which some writers emit.
        if (field.front() == '+') field.remove_prefix(1);
    }
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc() && ptr == end;
}

SkeletonSequence assemble(std::map<std::size_t, std::map<std::size_t, Keypoint3>>& table, int native_rate,
                          std::string label) {
    if (table.empty()) throw SequenceFormatError(SequenceErrorKind::schema, "sequence has no frames");
    std::size_t expected_frame = 1;
    std::size_t k = 0;
    std::vector<SkeletonFrame> frames;
    frames.reserve(table.size());
    for (auto& [frame_id, joints] : table) {
        if (frame_id != expected_frame) {
            throw SequenceFormatError(SequenceErrorKind::frame_gap,
                                      fmt::format("frame {} is missing", expected_frame), expected_frame);
        }
        if (frame_id == 1) k = joints.size();
        const bool contiguous = !joints.empty() && joints.rbegin()->first == joints.size();
        if (joints.size() != k || !contiguous) {
            throw SequenceFormatError(SequenceErrorKind::inconsistent_joint_count,
                                      fmt::format("inconsistent joint count in frame {}: expected joints 1..{}",
                                                  frame_id, k),
                                      frame_id);
        }
        SkeletonFrame f;
        f.keypoints.reserve(k);
        for (auto& [joint_id, p] : joints) f.keypoints.push_back(p);
        frames.push_back(std::move(f));
        ++expected_frame;
    }
    return SkeletonSequence(std::move(frames), native_rate, std::move(label));
}

SkeletonSequence load_csv(std::istream& in, const CsvMetadata& meta) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader) {
        throw SequenceFormatError(SequenceErrorKind::schema,
                                  fmt::format("csv header must be '{}'", kCsvHeader));
    }
    std::map<std::size_t, std::map<std::size_t, Keypoint3>> table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view row = trim(line);
        if (row.empty()) continue;

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = row.find(',', start);
            fields.push_back(row.substr(start, comma == std::string_view::npos ? comma : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        std::size_t frame = 0, joint = 0;
        Keypoint3 p;
        if (fields.size() != 5 || !parse_number(fields[0], frame) || !parse_number(fields[1], joint) ||
            frame == 0 || joint == 0) {
            throw SequenceFormatError(SequenceErrorKind::malformed_row,
                                      fmt::format("malformed row at line {}: '{}'", line_no, row));
        }
        if (!parse_number(fields[2], p.x) || !parse_number(fields[3], p.y) || !parse_number(fields[4], p.z)) {
            throw SequenceFormatError(SequenceErrorKind::malformed_row,
                                      fmt::format("malformed coordinate at line {}: '{}'", line_no, row), frame);
        }
        if (!p.is_finite()) {
            throw SequenceFormatError(SequenceErrorKind::non_finite,
                                      fmt::format("non-finite coordinate at line {}", line_no), frame);
        }
        if (!table[frame].emplace(joint, p).second) {
            throw SequenceFormatError(SequenceErrorKind::duplicate_entry,
                                      fmt::format("duplicate entry for frame {} joint {}", frame, joint), frame);
        }
    }
    return assemble(table, meta.native_rate, meta.user_label);
}

SkeletonSequence load_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SequenceFormatError(SequenceErrorKind::malformed_row, fmt::format("invalid json: {}", e.what()));
    }
    if (!doc.is_object() || !doc.contains("frames") || !doc["frames"].is_array() ||
        !doc.contains("native_rate") || !doc["native_rate"].is_number_integer()) {
        throw SequenceFormatError(SequenceErrorKind::schema,
                                  "json sequence needs integer 'native_rate' and array 'frames'");
    }
    std::string label;
    if (doc.contains("user_label")) {
        if (!doc["user_label"].is_string()) {
            throw SequenceFormatError(SequenceErrorKind::schema, "'user_label' must be a string");
        }
        label = doc["user_label"].get<std::string>();
    }
    const auto rate = doc["native_rate"].get<long long>();
    if (rate < 1 || rate > std::numeric_limits<int>::max()) {
        throw SequenceFormatError(SequenceErrorKind::schema, "'native_rate' must be a positive integer");
    }

    std::map<std::size_t, std::map<std::size_t, Keypoint3>> table;
    std::size_t frame_id = 0;
    for (const auto& frame : doc["frames"]) {
        ++frame_id;
        if (!frame.is_array()) {
            throw SequenceFormatError(SequenceErrorKind::schema, fmt::format("frame {} is not an array", frame_id),
                                      frame_id);
        }
        auto& joints = table[frame_id];
        std::size_t joint_id = 0;
        for (const auto& triple : frame) {
            ++joint_id;
            if (!triple.is_array() || triple.size() != 3 || !triple[0].is_number() || !triple[1].is_number() ||
                !triple[2].is_number()) {
                throw SequenceFormatError(SequenceErrorKind::malformed_row,
                                          fmt::format("frame {} joint {} is not an [x,y,z] triple", frame_id,
                                                      joint_id),
                                          frame_id);
            }
            Keypoint3 p{triple[0].get<double>(), triple[1].get<double>(), triple[2].get<double>()};
            if (!p.is_finite()) {
                throw SequenceFormatError(SequenceErrorKind::non_finite,
                                          fmt::format("non-finite coordinate in frame {}", frame_id), frame_id);
            }
            joints.emplace(joint_id, p);
        }
        if (joints.empty()) {
            throw SequenceFormatError(SequenceErrorKind::inconsistent_joint_count,
                                      fmt::format("inconsistent joint count in frame {}: no joints", frame_id),
                                      frame_id);
        }
    }
    return assemble(table, static_cast<int>(rate), std::move(label));
}

}  // namespace

SkeletonSequence load_sequence(std::istream& in, SequenceFormat format, const CsvMetadata& csv_meta) {
    return format == SequenceFormat::csv ? load_csv(in, csv_meta) : load_json(in);
}

void save_sequence(std::ostream& out, const SkeletonSequence& seq, SequenceFormat format) {
    if (format == SequenceFormat::csv) {
        out << kCsvHeader << '\n';
        for (std::size_t i = 0; i < seq.frame_count(); ++i) {
            const auto& kps = seq.frame(i).keypoints;
            for (std::size_t j = 0; j < kps.size(); ++j) {
                out << fmt::format("{},{},{},{},{}\n", i + 1, j + 1, kps[j].x, kps[j].y, kps[j].z);
            }
        }
        return;
    }
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : seq.frames()) {
        nlohmann::json joints = nlohmann::json::array();
        for (const auto& p : f.keypoints) joints.push_back({p.x, p.y, p.z});
        frames.push_back(std::move(joints));
    }
    nlohmann::json doc = {
        {"native_rate", seq.native_rate()},
        {"user_label", seq.user_label()},
        {"frames", std::move(frames)},
    };
    out << doc.dump() << '\n';
}

SkeletonSequence load_sequence_file(const std::string& path, SequenceFormat format, const CsvMetadata& csv_meta) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open sequence file '{}'", path));
    return load_sequence(in, format, csv_meta);
}

std::string save_sequence_string(const SkeletonSequence& seq, SequenceFormat format) {
    std::ostringstream out;
    save_sequence(out, seq, format);
    return out.str();
}

}  // namespace skelcontest::skeleton

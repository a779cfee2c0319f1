#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "skelcontest/rng.hpp"
#include "skelcontest/skeleton.hpp"

using namespace skelcontest;
using namespace skelcontest::skeleton;

namespace {

SkeletonSequence load_csv_text(const std::string& text, int rate = 60) {
    std::istringstream in(text);
    return load_sequence(in, SequenceFormat::csv, {rate, "u"});
}

SequenceFormatError csv_error(const std::string& text) {
    try {
        load_csv_text(text);
    } catch (const SequenceFormatError& e) {
        return e;
    }
    FAIL("expected a SequenceFormatError");
    throw;
}

}  // namespace

TEST_CASE("minimal csv table") {
    const auto seq = load_csv_text("frame,joint,x,y,z\n1,1,0,0,0\n2,1,1,0.5,-2\n", 2);
    CHECK(seq.frame_count() == 2);
    CHECK(seq.joint_count() == 1);
    CHECK(seq.native_rate() == 2);
    CHECK(seq.frame(1).keypoints[0] == Keypoint3{1, 0.5, -2});
}

TEST_CASE("csv rows may arrive out of order") {
    const auto seq = load_csv_text("frame,joint,x,y,z\n2,1,3,3,3\n1,2,2,2,2\n1,1,1,1,1\n2,2,4,4,4\n");
    CHECK(seq.frame(0).keypoints[1] == Keypoint3{2, 2, 2});
    CHECK(seq.frame(1).keypoints[0] == Keypoint3{3, 3, 3});
}

TEST_CASE("csv error contract") {
    std::string missing = "frame,joint,x,y,z\n";
    for (int f = 1; f <= 4; ++f) {
        for (int j = 1; j <= 6; ++j) {
            if (f == 3 && j == 5) continue;
            missing += std::to_string(f) + "," + std::to_string(j) + ",0,0,0\n";
        }
    }
    const auto e = csv_error(missing);
    CHECK(e.kind() == SequenceErrorKind::inconsistent_joint_count);
    CHECK(e.frame() == 3u);
    CHECK(std::string(e.what()).find("frame 3") != std::string::npos);

    CHECK(csv_error("frame,joint,x,y,z\n1,1,0,0\n").kind() == SequenceErrorKind::malformed_row);
    CHECK(csv_error("frame,joint,x,y,z\n1,1,0,zero,0\n").kind() == SequenceErrorKind::malformed_row);
    CHECK(csv_error("frame,joint,x,y,z\n0,1,0,0,0\n").kind() == SequenceErrorKind::malformed_row);
    CHECK(csv_error("frame,joint,x,y,z\n1,1,0,nan,0\n").kind() == SequenceErrorKind::non_finite);
    CHECK(csv_error("frame,joint,x,y,z\n1,1,0,inf,0\n").kind() == SequenceErrorKind::non_finite);
    CHECK(csv_error("frame,joint,x,y,z\n1,1,0,0,0\n1,1,1,1,1\n").kind() == SequenceErrorKind::duplicate_entry);
    const auto gap = csv_error("frame,joint,x,y,z\n1,1,0,0,0\n3,1,0,0,0\n");
    CHECK(gap.kind() == SequenceErrorKind::frame_gap);
    CHECK(gap.frame() == 2u);
    CHECK(csv_error("f,j,x,y,z\n1,1,0,0,0\n").kind() == SequenceErrorKind::schema);
    CHECK(csv_error("frame,joint,x,y,z\n").kind() == SequenceErrorKind::schema);
}

TEST_CASE("csv writer emits one header and k rows per frame") {
    const SkeletonSequence seq({base_pose(17)}, 60);
    const std::string text = save_sequence_string(seq, SequenceFormat::csv);
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 18);
    CHECK(lines[0] == "frame,joint,x,y,z");
    CHECK(lines[1].rfind("1,1,", 0) == 0);
    CHECK(lines[17].rfind("1,17,", 0) == 0);
}

TEST_CASE("json schema") {
    const auto seq = generate_synthetic(default_profile(MotionKind::wave), 4, 60, 17, 2, "waver");
    const auto doc = nlohmann::json::parse(save_sequence_string(seq, SequenceFormat::json));
    CHECK(doc["native_rate"] == 60);
    CHECK(doc["user_label"] == "waver");
    REQUIRE(doc["frames"].is_array());
    CHECK(doc["frames"].size() == 4);
    for (const auto& f : doc["frames"]) {
        CHECK(f.size() == 17);
        for (const auto& p : f) CHECK(p.size() == 3);
    }

    std::istringstream bad(R"({"native_rate": 60, "frames": [[[0,0,0]], [[0,0,0],[1,1,1]]]})");
    try {
        load_sequence(bad, SequenceFormat::json);
        FAIL("expected an error");
    } catch (const SequenceFormatError& e) {
        CHECK(e.kind() == SequenceErrorKind::inconsistent_joint_count);
        CHECK(e.frame() == 2u);
    }
    std::istringstream no_rate(R"({"frames": [[[0,0,0]]]})");
    CHECK_THROWS_AS(load_sequence(no_rate, SequenceFormat::json), SequenceFormatError);
    std::istringstream pair(R"({"native_rate": 60, "frames": [[[0,0]]]})");
    CHECK_THROWS_AS(load_sequence(pair, SequenceFormat::json), SequenceFormatError);
    std::istringstream garbage("{not json");
    CHECK_THROWS_AS(load_sequence(garbage, SequenceFormat::json), SequenceFormatError);
}

TEST_CASE("save then load is the identity on randomized sequences") {
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t frames = 1 + rng.uniform_index(12);
        const std::size_t joints = 1 + rng.uniform_index(20);
        std::vector<SkeletonFrame> data(frames);
        for (auto& f : data) {
            for (std::size_t j = 0; j < joints; ++j) {
                // Wide dynamic range exercises shortest round-trip printing.
                const double scale = std::pow(10.0, rng.uniform(-8, 4));
                f.keypoints.push_back({scale * rng.uniform(-1, 1), scale * rng.uniform(-1, 1), rng.uniform(-1, 1)});
            }
        }
        const int rate = static_cast<int>(1 + rng.uniform_index(120));
        const SkeletonSequence seq(data, rate, "user" + std::to_string(trial));
        for (auto fmt : {SequenceFormat::csv, SequenceFormat::json}) {
            std::istringstream in(save_sequence_string(seq, fmt));
            CHECK(load_sequence(in, fmt, {rate, seq.user_label()}) == seq);
        }
    }
}

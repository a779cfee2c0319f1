#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI inside `dir`, capturing stdout and stderr.
Run run(const fs::path& dir, const std::string& args) {
    const fs::path log = dir / "cli.log";
    const std::string cmd = fmt::format("cd '{}' && '{}' {} > '{}' 2>&1", dir.string(), SKELCONTEST_CLI_PATH, args,
                                        log.string());
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / fmt::format("skelcontest_{}_{}", name, ::getpid());
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("exit codes") {
    TempDir t("codes");
    CHECK(run(t.path, "--help").code == 0);
    CHECK(run(t.path, "").code == 2);
    CHECK(run(t.path, "frobnicate").code == 2);
    CHECK(run(t.path, "contest --awards 10,10").code == 2);
    write(t.path / "bad.ini", "[scenario]\nbudgett = 4\n");
    const Run bad = run(t.path, "gen --config bad.ini");
    CHECK(bad.code == 2);
    CHECK(bad.out.find("budgett") != std::string::npos);
    CHECK(run(t.path, "gen --config missing.ini").code == 2);
    const Run missing = run(t.path, "compare --policy nope.bin");
    CHECK(missing.code == 1);
    CHECK(missing.out.find("nope.bin") != std::string::npos);
    CHECK(run(t.path, "codec --input absent.csv --output x.bin --direction encode").code == 1);
}

TEST_CASE("gen is deterministic per seed") {
    TempDir t("gen");
    REQUIRE(run(t.path, "gen --out a").code == 0);
    REQUIRE(run(t.path, "gen --out b").code == 0);
    REQUIRE(run(t.path, "gen --out c --seed 9").code == 0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(t.path / "a")) {
        ++files;
        const std::string text = slurp(e.path());
        CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 300 * 17);
        CHECK(text == slurp(t.path / "b" / e.path().filename()));
        CHECK(text != slurp(t.path / "c" / e.path().filename()));
    }
    CHECK(files == 4);
    CHECK(fs::exists(t.path / "a" / "user1_run.csv"));
    CHECK(fs::exists(t.path / "a" / "user4_stand.csv"));
}

TEST_CASE("contest output matches the golden file") {
    TempDir t("contest");
    const Run r = run(t.path, "contest --out o --awards 40,30,20,10");
    REQUIRE(r.code == 0);
    const std::string golden = slurp(fs::path(SKELCONTEST_GOLDEN_DIR) / "contest_default.csv");
    CHECK(slurp(t.path / "o" / "contest.csv") == golden);
    CHECK(r.out == golden);
}

TEST_CASE("codec round trip and report") {
    TempDir t("codec");
    REQUIRE(run(t.path, "gen --out o").code == 0);
    const Run enc = run(t.path, "codec --out o --input o/user1_run.csv --output o/enc.bin --direction encode");
    REQUIRE(enc.code == 0);
    CHECK(enc.out == slurp(fs::path(SKELCONTEST_GOLDEN_DIR) / "codec_encode.txt"));
    CHECK(enc.out.find("51 bytes/frame") != std::string::npos);
    CHECK(enc.out.find("161618.8") != std::string::npos);
    CHECK(fs::file_size(t.path / "o" / "enc.bin") == 300 * 51);

    const Run dec = run(t.path, "codec --out o --input o/enc.bin --output o/dec.csv --direction decode");
    REQUIRE(dec.code == 0);
    const std::string text = slurp(t.path / "o" / "dec.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 300 * 17);

    {
        std::ofstream cut(t.path / "o" / "cut.bin", std::ios::binary);
        cut << std::string(50, '\x10');
    }
    const Run bad = run(t.path, "codec --out o --input o/cut.bin --output o/x.csv --direction decode");
    CHECK(bad.code == 1);
    CHECK(bad.out.find("malformed payload length") != std::string::npos);
}

TEST_CASE("train, compare and search on a single user") {
    TempDir t("single");
    write(t.path / "one.ini",
          "[scenario]\nprofiles = wave\nnative_rate = 12\nframes = 24\nbudget = 1\npool = 10\n"
          "[dqn]\nepisodes = 3\nsteps_per_episode = 5\nbatch_size = 4\nbuffer_capacity = 20\nhidden_layers = 4\n"
          "[search]\nstep = 5\n");
    REQUIRE(run(t.path, "train --config one.ini --out o").code == 0);
    CHECK(fs::exists(t.path / "o" / "policy.bin"));
    const std::string history = slurp(t.path / "o" / "history.csv");
    CHECK(std::count(history.begin(), history.end(), '\n') == 4);

    const Run cmp = run(t.path, "compare --config one.ini --out o --policy o/policy.bin");
    REQUIRE(cmp.code == 0);
    std::istringstream rows(slurp(t.path / "o" / "compare.csv"));
    std::string header, base, dqn, social;
    std::getline(rows, header);
    std::getline(rows, base);
    std::getline(rows, dqn);
    std::getline(rows, social);
    CHECK(header == "method,awards,efforts,total_loss,reduction_percent");
    const auto tail = [](const std::string& row) { return row.substr(row.find(',', row.find(',') + 1)); };
    CHECK(base.rfind("average_baseline,", 0) == 0);
    CHECK(dqn.rfind("dqn,10,", 0) == 0);
    CHECK(social.rfind("social_optimum,", 0) == 0);
    CHECK(tail(base) == tail(dqn));
    CHECK(tail(base) == tail(social));

    const Run search = run(t.path, "search --config one.ini --out o");
    CHECK(search.code == 0);
    CHECK(fs::exists(t.path / "o" / "search.csv"));
}

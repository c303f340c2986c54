#include "flights/commands.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace flights;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path root;
    explicit Scratch(const std::string& name) : root(fs::temp_directory_path() / ("flights_cli_" + name)) {
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~Scratch() { fs::remove_all(root); }
    std::string path(const std::string& leaf) const { return (root / leaf).string(); }
    std::string write(const std::string& leaf, const std::string& text) const {
        std::ofstream(root / leaf) << text;
        return path(leaf);
    }
};

int run(std::vector<std::string> args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (out_text) *out_text = out.str() + err.str();
    return code;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* kSmallSquare = R"({
  // small smooth-boundary campaign
  "domain": {"type": "square", "side": 1.0},
  "epsilon": 0.015625,
  "n_flights": 3000,
  "master_seed": 11,
  "analysis": {"bootstrap_resamples": 20}
})";

} // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}) == cli::kUsageError);
    CHECK(run({"bogus"}) == cli::kUsageError);
    CHECK(run({"decompose", "--nope"}) == cli::kUsageError);
    CHECK(run({"decompose", "--preset", "nonexistent"}) == cli::kUsageError);
    CHECK(run({"verify"}) == cli::kUsageError);

    Scratch s("usage");
    std::string message;
    CHECK(run({"decompose", "--config", s.write("bad.json", "{\"domain\": ")}, &message) == cli::kUsageError);
    CHECK(message.find("parse error") != std::string::npos);
    CHECK(run({"decompose", "--config", s.write("unknown.json", R"({"domain": {"type": "square"}, "epsilon": 0.1, "colour": 1})")}) ==
          cli::kUsageError);
    CHECK(run({"decompose", "--config", s.write("neg.json", R"({"domain": {"type": "square", "side": -1}})")}) ==
          cli::kUsageError);
    CHECK(run({"decompose", "--config", s.path("missing.json")}) == cli::kUsageError);
    CHECK(run({"analyze", "--records", s.path("missing.jsonl")}) == cli::kUsageError);
}

TEST_CASE("oracle table") {
    std::string text;
    CHECK(run({"oracle"}, &text) == cli::kPass);
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "a,x,t,reflection,eigen,abs_diff");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 108);
}

TEST_CASE("decompose writes the cube dump reproducibly") {
    Scratch s("decompose");
    const auto cfg = s.write("c.json", kSmallSquare);
    CHECK(run({"decompose", "--config", cfg, "--output-dir", s.path("a")}) == cli::kPass);
    CHECK(run({"decompose", "--config", cfg, "--output-dir", s.path("b")}) == cli::kPass);
    for (const char* f : {"cubes.csv", "layer_counts.csv", "hypothesis.json"}) {
        REQUIRE(fs::exists(s.root / "a" / f));
        CHECK(slurp(s.path(std::string("a/") + f)) == slurp(s.path(std::string("b/") + f)));
    }
    CHECK(slurp(s.path("a/cubes.csv")).rfind("# format_version=1\n# config=", 0) == 0);
}

TEST_CASE("simulate and analyze") {
    Scratch s("campaign");
    const auto cfg = s.write("c.json", kSmallSquare);
    CHECK(run({"simulate", "--config", cfg, "--output-dir", s.path("w1"), "--workers", "1"}) == cli::kPass);
    CHECK(run({"simulate", "--config", cfg, "--output-dir", s.path("w4"), "--workers", "4"}) == cli::kPass);
    CHECK(slurp(s.path("w1/flights.jsonl")) == slurp(s.path("w4/flights.jsonl")));
    CHECK(run({"simulate", "--config", cfg, "--output-dir", s.path("seed"), "--seed", "12"}) == cli::kPass);
    CHECK(slurp(s.path("w1/flights.jsonl")) != slurp(s.path("seed/flights.jsonl")));

    // The records carry their own configuration.
    std::string report;
    const int analyzed = run({"analyze", "--records", s.path("w1/flights.jsonl")}, &report);
    CHECK((analyzed == cli::kPass || analyzed == cli::kCheckFailed));
    for (const char* f : {"survival.csv", "fits.json", "report.json", "report.txt"})
        CHECK(fs::exists(s.root / "w1" / f));
    CHECK(report.find("survival exponent") != std::string::npos);

}

TEST_CASE("analysis target override fails the check") {
    Scratch s("target");
    const auto cfg = s.write("c.json", R"({
      "domain": {"type": "square", "side": 1.0},
      "epsilon": 0.015625,
      "n_flights": 3000,
      "master_seed": 11,
      "analysis": {"bootstrap_resamples": 20, "target_dimension": 1.9}
    })");
    CHECK(run({"simulate", "--config", cfg, "--output-dir", s.path("o")}) == cli::kPass);
    CHECK(run({"analyze", "--config", cfg, "--output-dir", s.path("o")}) == cli::kCheckFailed);
    CHECK(slurp(s.path("o/report.json")).find("\"pass\": false") != std::string::npos);
}

TEST_CASE("records from a different domain are rejected") {
    Scratch s("mismatch");
    const auto cfg = s.write("c.json", kSmallSquare);
    CHECK(run({"simulate", "--config", cfg, "--output-dir", s.path("o"), "--flights", "200"}) == cli::kPass);
    const auto box = s.write("box.json", R"({"domain": {"type": "box3d"}, "epsilon": 0.0625})");
    CHECK(run({"analyze", "--config", box, "--records", s.path("o/flights.jsonl")}) == cli::kUsageError);
    s.write("o/garbage.jsonl", "{\"format_version\": 1}\nnot json\n");
    CHECK(run({"analyze", "--records", s.path("o/garbage.jsonl")}) == cli::kUsageError);
}

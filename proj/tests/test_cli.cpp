#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "tsg/cli.hpp"

namespace fs = std::filesystem;

namespace {

/// Scenario file written to a temp path for the duration of one test.
class TempScenario {
public:
    explicit TempScenario(const std::string& text) {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("tsg_cli_test_" + std::to_string(++counter) + "_" +
                 std::to_string(static_cast<unsigned>(::getpid())) + ".json");
        std::ofstream out(path_);
        out << text;
    }
    ~TempScenario() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    [[nodiscard]] std::string path() const { return path_.string(); }

private:
    fs::path path_;
};

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = tsg::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const char* kThm21Basic = R"({
  "scales": {
    "t1": {"kind": "integers", "lo": 0, "hi": 2},
    "t2": {"kind": "integers", "lo": 0, "hi": 2},
    "i":  {"kind": "integers", "lo": 0, "hi": 1}
  },
  "functions": {"p1": {"expr": "1"}, "p2": {"expr": "1"}, "f": {"expr": "1"}},
  "theorem": "thm21",
  "options": {"tolerance": 1e-9,
              "fuzz": {"count": 25, "seed": 7, "max_points_xy": 8, "max_points_i": 4}}
})";

const char* kThm31Basic = R"({
  "scales": {
    "t1": {"kind": "integers", "lo": 0, "hi": 2},
    "t2": {"kind": "integers", "lo": 0, "hi": 2},
    "i":  {"kind": "integers", "lo": 0, "hi": 1}
  },
  "functions": {"g": {"expr": "1"}, "r": {"expr": "1"}, "f": {"expr": "1"}},
  "theorem": "thm31",
  "options": {"tolerance": 1e-9}
})";

const char* kLemmaContinuum = R"({
  "scales": {
    "t1": {"kind": "uniform", "start": 0, "stop": 1, "n": 1},
    "t2": {"kind": "integers", "lo": 0, "hi": 1}
  },
  "functions": {"a": {"expr": "2"}, "f": {"expr": "1"}},
  "theorem": "lemma"
})";

} // namespace

TEST_CASE("verify on the worked three-variable instance") {
    TempScenario sc(kThm21Basic);
    const CliResult res = run({"verify", sc.path()});
    CHECK(res.exit_code == 0);
    CHECK(res.out.rfind("i,j,k,t1_value,t2_value,i_value,subject,bound,margin\n", 0) == 0);
    // the worked corner rows: subject 6 vs bound 37, margin 31, both z layers
    CHECK(res.out.find("2,2,0,2,2,0,6,37,31\n") != std::string::npos);
    CHECK(res.out.find("2,2,1,2,2,1,6,37,31\n") != std::string::npos);
    CHECK(res.err.find("verdict=dominated") != std::string::npos);
}

TEST_CASE("verify exit code flips on an injected bound violation") {
    TempScenario sc(kThm21Basic);
    const CliResult res = run({"verify", sc.path(), "--corrupt-bound"});
    CHECK(res.exit_code == 1);
    CHECK(res.err.find("verdict=violated") != std::string::npos);
}

TEST_CASE("solve emits the oracle grid") {
    TempScenario sc(kThm31Basic);
    const CliResult res = run({"solve", sc.path()});
    CHECK(res.exit_code == 0);
    CHECK(res.out.rfind("i,j,k,t1_value,t2_value,i_value,value\n", 0) == 0);
    CHECK(res.out.find("2,2,0,2,2,0,6\n") != std::string::npos);
}

TEST_CASE("verify output is byte-identical across runs") {
    TempScenario sc(kThm21Basic);
    const CliResult first = run({"verify", sc.path(), "--seed", "123"});
    const CliResult second = run({"verify", sc.path(), "--seed", "123"});
    CHECK(first.exit_code == 0);
    CHECK(first.out == second.out);
    CHECK(first.err == second.err);
}

TEST_CASE("fuzz runs the randomized suite deterministically") {
    TempScenario sc(kThm21Basic);
    const CliResult first = run({"fuzz", sc.path(), "--seed", "11"});
    const CliResult second = run({"fuzz", sc.path(), "--seed", "11"});
    CHECK(first.exit_code == 0);
    CHECK(first.out == second.out);
    CHECK(first.out.rfind("instance,seed,n1,n2,n3,verdict,min_margin,max_violation\n", 0) == 0);
    // 25 instances plus the header
    std::size_t lines = 0;
    for (char c : first.out) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == 26);

    const CliResult other_seed = run({"fuzz", sc.path(), "--seed", "12"});
    CHECK(other_seed.out != first.out);

    const CliResult parallel = run({"fuzz", sc.path(), "--seed", "11", "--jobs", "3"});
    CHECK(parallel.out == first.out);
}

TEST_CASE("jsonl format") {
    TempScenario sc(kThm21Basic);
    const CliResult res = run({"verify", sc.path(), "--format", "jsonl"});
    CHECK(res.exit_code == 0);
    CHECK(res.out.rfind("{\"i\":0,\"j\":0,\"k\":0,", 0) == 0);
    CHECK(res.out.find("\"verdict\":\"dominated\"") != std::string::npos);
}

TEST_CASE("limit study refines the scenario") {
    TempScenario sc(kLemmaContinuum);
    const CliResult res = run({"limit", sc.path(), "--refine", "8"});
    CHECK(res.exit_code == 0);
    CHECK(res.out.rfind("factor,n1,n2,n3,subject_corner,bound_corner,margin_corner,min_margin\n",
                        0) == 0);
    // factors 1, 2, 4, 8
    std::size_t lines = 0;
    for (char c : res.out) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == 5);

    SUBCASE("three-variable scenarios refine too") {
        TempScenario sc3(kThm21Basic);
        const CliResult r3 = run({"limit", sc3.path(), "--refine", "4"});
        CHECK(r3.exit_code == 0);
        CHECK(r3.out.find("\n4,9,9,5,") != std::string::npos);  // 3x3x2 refined by 4
    }
    SUBCASE("table functions cannot be refined") {
        const char* text = R"({
          "scales": {
            "t1": {"kind": "integers", "lo": 0, "hi": 1},
            "t2": {"kind": "integers", "lo": 0, "hi": 1}
          },
          "functions": {"a": {"table": [[1, 1], [1, 2]]}, "f": {"expr": "1"}},
          "theorem": "lemma"
        })";
        TempScenario sct(text);
        const CliResult rt = run({"limit", sct.path(), "--refine", "4"});
        CHECK(rt.exit_code == 2);
        CHECK(rt.err.find("table") != std::string::npos);
    }
}

TEST_CASE("table-defined functions verify like expressions") {
    // the worked two-variable instance with a supplied as a table
    const char* text = R"({
      "scales": {
        "t1": {"kind": "integers", "lo": 0, "hi": 2},
        "t2": {"kind": "integers", "lo": 0, "hi": 2}
      },
      "functions": {
        "a": {"table": [[2, 2, 2], [2, 2, 2], [2, 2, 2]]},
        "f": {"expr": "1"}
      },
      "theorem": "lemma"
    })";
    TempScenario sc(text);
    const CliResult res = run({"verify", sc.path()});
    CHECK(res.exit_code == 0);
    // corner: exact solution 12 against bound 18
    CHECK(res.out.find("2,2,0,2,2,0,12,18,6\n") != std::string::npos);
}

TEST_CASE("input errors exit with code 2") {
    SUBCASE("missing file") {
        const CliResult res = run({"verify", "/nonexistent/path.json"});
        CHECK(res.exit_code == 2);
        CHECK_FALSE(res.err.empty());
    }
    SUBCASE("invalid scenario") {
        TempScenario sc(R"({"scales": {}, "theorem": "thm21"})");
        const CliResult res = run({"verify", sc.path()});
        CHECK(res.exit_code == 2);
        CHECK(res.err.find("validation failed") != std::string::npos);
    }
    SUBCASE("unknown flag") {
        TempScenario sc(kThm21Basic);
        const CliResult res = run({"verify", sc.path(), "--no-such-flag"});
        CHECK(res.exit_code == 2);
    }
    SUBCASE("no subcommand") {
        const CliResult res = run({});
        CHECK(res.exit_code == 2);
    }
}

TEST_CASE("hypothesis override downgrades the verdict") {
    // decreasing a violates the lemma's monotonicity hypothesis
    const char* text = R"({
      "scales": {
        "t1": {"kind": "integers", "lo": 0, "hi": 2},
        "t2": {"kind": "integers", "lo": 0, "hi": 2}
      },
      "functions": {"a": {"expr": "5 - x"}, "f": {"expr": "0"}},
      "theorem": "lemma"
    })";
    TempScenario sc(text);
    const CliResult strict = run({"verify", sc.path()});
    CHECK(strict.exit_code == 2);

    const CliResult relaxed = run({"verify", sc.path(), "--allow-hypothesis-violation"});
    // zero integrand: bound = a = u, margins hold, but the verdict carries
    // the caveat
    CHECK(relaxed.exit_code == 0);
    CHECK(relaxed.err.find("verdict=hypothesis-unverified") != std::string::npos);
}

TEST_CASE("fuzz instances that blow up are reported, not fatal") {
    // An absurd coefficient cap overflows the exact solver on most
    // instances; each failure must surface as an error row and exit 1,
    // even with worker threads.
    const char* text = R"({
      "scales": {
        "t1": {"kind": "integers", "lo": 0, "hi": 2},
        "t2": {"kind": "integers", "lo": 0, "hi": 2},
        "i":  {"kind": "integers", "lo": 0, "hi": 1}
      },
      "functions": {"p1": {"expr": "1"}, "p2": {"expr": "1"}, "f": {"expr": "1"}},
      "theorem": "thm21",
      "options": {"fuzz": {"count": 12, "seed": 3, "coeff_max": 1e154}}
    })";
    TempScenario sc(text);
    const CliResult res = run({"fuzz", sc.path(), "--jobs", "3"});
    CHECK(res.exit_code == 1);
    CHECK(res.out.find(",error,") != std::string::npos);
    const CliResult serial = run({"fuzz", sc.path()});
    CHECK(serial.out == res.out);
}

TEST_CASE("emitted solution grids re-ingest as tables and reproduce themselves") {
    TempScenario sc(kThm31Basic);
    const CliResult first = run({"solve", sc.path()});
    REQUIRE(first.exit_code == 0);

    // Collect the value column, keeping the emitted 17-digit text so the
    // round trip is bit-exact.
    std::vector<std::string> values;
    std::istringstream lines(first.out);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        values.push_back(line.substr(line.rfind(',') + 1));
    }
    REQUIRE(values.size() == 18);  // 3 x 3 x 2 grid

    // Rebuild a scenario with the solution as a table and a zero kernel.
    std::string table = "[";
    std::size_t idx = 0;
    for (int i = 0; i < 3; ++i) {
        table += i ? ",[" : "[";
        for (int j = 0; j < 3; ++j) {
            table += j ? ",[" : "[";
            for (int k = 0; k < 2; ++k) {
                table += (k ? "," : "") + values[idx++];
            }
            table += "]";
        }
        table += "]";
    }
    table += "]";
    const std::string reingest = R"({
      "scales": {
        "t1": {"kind": "integers", "lo": 0, "hi": 2},
        "t2": {"kind": "integers", "lo": 0, "hi": 2},
        "i":  {"kind": "integers", "lo": 0, "hi": 1}
      },
      "functions": {"g": {"table": )" +
                                table + R"(}, "r": {"expr": "0"}, "f": {"expr": "0"}},
      "theorem": "thm31"
    })";
    TempScenario sc2(reingest);
    const CliResult second = run({"solve", sc2.path()});
    CHECK(second.exit_code == 0);
    CHECK(second.out == first.out);
}

TEST_CASE("TSG_SEED environment fallback") {
    TempScenario sc(kThm21Basic);
    ::setenv("TSG_SEED", "11", 1);
    const CliResult from_env = run({"fuzz", sc.path()});
    ::unsetenv("TSG_SEED");
    const CliResult from_flag = run({"fuzz", sc.path(), "--seed", "11"});
    CHECK(from_env.out == from_flag.out);
}

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks of the command line tool; STABLAB_CLI_PATH is injected by
// the build.

namespace fs = std::filesystem;

namespace {

const char* kCli = STABLAB_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("stablab_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

}  // namespace

TEST_CASE("experiment subcommand writes the full artifact set") {
    TempDir tmp;
    const auto config = tmp.path / "exp.cfg";
    write(config,
          "kind = knn\n"
          "k = 1\n"
          "lambda = [16, 32]\n"
          "m = 20\n"
          "seed = 5\n");
    const auto out = tmp.path / "out";
    REQUIRE(run(std::string(kCli) + " experiment " + config.string() + " --out " + out.string() +
                " > /dev/null") == 0);
    for (const char* name : {"summary.json", "raw.csv", "var_scaling.csv", "ks_vs_lambda.csv"})
        REQUIRE(fs::exists(out / name));
    const std::string raw = slurp(out / "raw.csv");
    REQUIRE(raw.find("lambda,replicate,value,status") != std::string::npos);
}

TEST_CASE("experiment reruns are byte-identical for any thread count") {
    TempDir tmp;
    const auto config = tmp.path / "exp.cfg";
    write(config,
          "kind = knn\n"
          "k = 1\n"
          "lambda = [16, 32]\n"
          "m = 30\n"
          "seed = 12\n");
    const auto out1 = tmp.path / "a";
    const auto out2 = tmp.path / "b";
    const auto out3 = tmp.path / "c";
    REQUIRE(run(std::string(kCli) + " experiment " + config.string() + " --out " + out1.string() +
                " --threads 1 > /dev/null") == 0);
    REQUIRE(run(std::string(kCli) + " experiment " + config.string() + " --out " + out2.string() +
                " --threads 4 > /dev/null") == 0);
    REQUIRE(run("STABLAB_THREADS=3 " + std::string(kCli) + " experiment " + config.string() +
                " --out " + out3.string() + " > /dev/null") == 0);
    for (const char* name : {"raw.csv", "var_scaling.csv", "ks_vs_lambda.csv"}) {
        REQUIRE(slurp(out1 / name) == slurp(out2 / name));
        REQUIRE(slurp(out1 / name) == slurp(out3 / name));
    }
}

TEST_CASE("--seed overrides the config seed") {
    TempDir tmp;
    const auto config = tmp.path / "exp.cfg";
    write(config,
          "kind = knn\n"
          "k = 1\n"
          "lambda = [16]\n"
          "m = 10\n"
          "seed = 5\n");
    const auto out1 = tmp.path / "a";
    const auto out2 = tmp.path / "b";
    REQUIRE(run(std::string(kCli) + " experiment " + config.string() + " --out " + out1.string() +
                " > /dev/null") == 0);
    REQUIRE(run(std::string(kCli) + " experiment " + config.string() + " --seed 6 --out " +
                out2.string() + " > /dev/null") == 0);
    REQUIRE(slurp(out1 / "raw.csv") != slurp(out2 / "raw.csv"));
}

TEST_CASE("config errors exit with code 2") {
    TempDir tmp;
    const auto config = tmp.path / "bad.cfg";
    write(config,
          "kind = knn\n"
          "k = 0\n"
          "lambda = [16]\n"
          "m = 10\n"
          "seed = 5\n");
    REQUIRE(run(std::string(kCli) + " experiment " + config.string() + " --out " +
                (tmp.path / "o").string() + " 2> /dev/null") == 2);
    REQUIRE(run(std::string(kCli) + " experiment " + (tmp.path / "missing.cfg").string() +
                " 2> /dev/null") == 2);
    REQUIRE(run(std::string(kCli) + " nosuchcommand 2> /dev/null") == 2);
}

TEST_CASE("runtime failures exit with code 3") {
    TempDir tmp;
    const auto config = tmp.path / "exp.cfg";
    // cap 1 forces every replicate to fail
    write(config,
          "kind = independence-ratio\n"
          "b = 0.9\n"
          "cap = 1\n"
          "lambda = [50]\n"
          "m = 10\n"
          "seed = 5\n");
    REQUIRE(run(std::string(kCli) + " experiment " + config.string() + " --out " +
                (tmp.path / "o").string() + " 2> /dev/null") == 3);
}

TEST_CASE("bounds subcommand echoes the Chen-Shao example") {
    TempDir tmp;
    const auto config = tmp.path / "bounds.cfg";
    write(config,
          "q = 3\n"
          "D = 2\n"
          "V = 100\n"
          "theta = 0.1\n");
    const auto out = tmp.path / "out";
    REQUIRE(run(std::string(kCli) + " bounds " + config.string() + " --out " + out.string() +
                " > /dev/null") == 0);
    const std::string summary = slurp(out / "summary.json");
    REQUIRE(summary.find("7680") != std::string::npos);
}

TEST_CASE("tails subcommand writes a monotone tau column") {
    TempDir tmp;
    const auto config = tmp.path / "tails.cfg";
    write(config,
          "kind = two-color\n"
          "q = const\n"
          "q_value = 0.5\n"
          "rule = nn\n"
          "lambda = [36]\n"
          "probe = points\n"
          "probe_points = [0.5, 0.5]\n"
          "replicates = 300\n"
          "t = [0.25, 0.5, 1.0, 1.5]\n"
          "seed = 3\n");
    const auto out = tmp.path / "out";
    REQUIRE(run(std::string(kCli) + " tails " + config.string() + " --out " + out.string() +
                " > /dev/null") == 0);
    std::ifstream in(out / "tail.csv");
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "t,tau_hat,stderr,n");
    double prev = 1.0;
    int rows = 0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
        const double tau = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        REQUIRE(tau <= prev + 1e-12);
        prev = tau;
        ++rows;
    }
    REQUIRE(rows == 4);
}

TEST_CASE("verify-stab subcommand reports zero violations for a valid rule") {
    TempDir tmp;
    const auto config = tmp.path / "stab.cfg";
    write(config,
          "kind = two-color\n"
          "q = const\n"
          "q_value = 0.5\n"
          "rule = nn\n"
          "lambda = 40\n"
          "trials = 200\n"
          "seed = 21\n");
    const auto out = tmp.path / "out";
    REQUIRE(run(std::string(kCli) + " verify-stab " + config.string() + " --out " +
                out.string() + " > /dev/null") == 0);
    const std::string summary = slurp(out / "summary.json");
    REQUIRE(summary.find("\"violations\": 0") != std::string::npos);
    REQUIRE(fs::exists(out / "config.csv"));
}

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "test_config.hpp"

namespace fs = std::filesystem;

namespace {

std::string inst_path(const char* name) {
    return std::string(GREENPLAN_INSTANCE_DIR) + "/" + name;
}

fs::path cli_binary() {
    std::error_code ec;
    const auto exe = fs::read_symlink("/proc/self/exe", ec);
    REQUIRE_FALSE(ec);
    return exe.parent_path() / "greenplan";
}

struct Run {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Run run_cli(const std::string& args, const fs::path& scratch) {
    fs::create_directories(scratch);
    const fs::path out = scratch / "stdout.txt";
    const fs::path err = scratch / "stderr.txt";
    const std::string cmd = cli_binary().string() + " " + args + " > " + out.string() + " 2> " +
                            err.string();
    const int rc = std::system(cmd.c_str());
    Run r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

struct EnvGuard {
    EnvGuard() { unsetenv("GREENPLAN_SOLVER"); }
    ~EnvGuard() { unsetenv("GREENPLAN_SOLVER"); }
};

const fs::path root = fs::temp_directory_path() / "gp-test-cli";

} // namespace

TEST_CASE("run emits reports, validates them, and is reproducible") {
    EnvGuard guard;
    const fs::path dir = root / "run";
    fs::remove_all(dir);
    const std::string base = "run --instance " + inst_path("micro2.json") +
                             " --solver builtin --out ";

    const auto first = run_cli(base + (dir / "a").string(), dir);
    CHECK(first.exit_code == 0);
    for (const char* f : {"costs.csv", "energy.csv", "manifest.json"})
        CHECK(fs::exists(dir / "a" / f));
    for (const char* f : {"solution.sol", "violations.txt", "timeline.csv", "assignments.csv"})
        CHECK(fs::exists(dir / "a" / "S+Z" / f));
    CHECK(slurp(dir / "a" / "B" / "violations.txt") == "feasible\n");

    // all eight scenarios by default: header + 8 rows
    const auto costs = slurp(dir / "a" / "costs.csv");
    CHECK(count_lines(costs) == 9);
    CHECK(costs.find("scenario,Z,") == 0);

    const auto second = run_cli(base + (dir / "b").string(), dir);
    CHECK(second.exit_code == 0);
    CHECK(slurp(dir / "b" / "costs.csv") == costs);
    CHECK(slurp(dir / "b" / "energy.csv") == slurp(dir / "a" / "energy.csv"));
    CHECK(slurp(dir / "b" / "S+Z" / "solution.sol") == slurp(dir / "a" / "S+Z" / "solution.sol"));
    fs::remove_all(dir);
}

TEST_CASE("export writes deterministic model files and checksums") {
    EnvGuard guard;
    const fs::path dir = root / "export";
    fs::remove_all(dir);
    const std::string base = "export --instance " + inst_path("micro1.json") +
                             " --scenario S+Z --format lp --out ";
    const auto a = run_cli(base + (dir / "a").string(), dir);
    const auto b = run_cli(base + (dir / "b").string(), dir);
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(slurp(dir / "a" / "S+Z.lp") == slurp(dir / "b" / "S+Z.lp"));
    CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
    CHECK(slurp(dir / "a" / "manifest.json").find("\"checksums\"") != std::string::npos);

    // mps flavor too
    const auto m = run_cli("export --instance " + inst_path("micro1.json") +
                               " --scenario S+Z --format mps --out " + (dir / "m").string(),
                           dir);
    CHECK(m.exit_code == 0);
    CHECK(fs::exists(dir / "m" / "S+Z.mps"));
    fs::remove_all(dir);
}

TEST_CASE("validate accepts solver output and rejects tampered copies") {
    EnvGuard guard;
    const fs::path dir = root / "validate";
    fs::remove_all(dir);
    REQUIRE(run_cli("run --instance " + inst_path("micro2.json") +
                        " --scenario S+Z --solver builtin --out " + (dir / "out").string(),
                    dir)
                .exit_code == 0);
    const fs::path sol = dir / "out" / "S+Z" / "solution.sol";

    const std::string val_base = "validate --instance " + inst_path("micro2.json") +
                                 " --solution ";
    const auto good = run_cli(val_base + sol.string(), dir);
    CHECK(good.exit_code == 0);
    CHECK(good.out.find("feasible") == 0);
    CHECK(good.out.find("scenario,Z,") != std::string::npos);

    // flipping the install off leaves operating states without support
    const std::string text = slurp(sol);
    REQUIRE(text.find("z[1,1,1] 1") != std::string::npos);
    std::string broken = text;
    broken.replace(broken.find("z[1,1,1] 1"), 10, "z[1,1,1] 0");
    {
        std::ofstream f(dir / "broken.sol", std::ios::binary);
        f << broken;
    }
    const auto bad = run_cli(val_base + (dir / "broken.sol").string(), dir);
    CHECK(bad.exit_code == 1);
    CHECK(bad.out.find("violation") != std::string::npos);

    // a fractional binary is a usage error, not a violation report
    std::string frac = text;
    frac.replace(frac.find("z[1,1,1] 1"), 10, "z[1,1,1] .5");
    {
        std::ofstream f(dir / "frac.sol", std::ios::binary);
        f << frac;
    }
    CHECK(run_cli(val_base + (dir / "frac.sol").string(), dir).exit_code == 64);

    CHECK(run_cli(val_base + (dir / "no-such.sol").string(), dir).exit_code == 64);
    fs::remove_all(dir);
}

TEST_CASE("usage errors exit with 64") {
    EnvGuard guard;
    const fs::path dir = root / "usage";
    fs::remove_all(dir);
    CHECK(run_cli("run --instance " + inst_path("micro2.json") + " --scenario NOPE", dir)
              .exit_code == 64);
    CHECK(run_cli("run --instance /no/such/instance.json", dir).exit_code == 64);
    CHECK(run_cli("frobnicate", dir).exit_code == 64);
    CHECK(run_cli("run", dir).exit_code == 64); // missing required --instance
    CHECK(run_cli("export --instance " + inst_path("micro2.json") + " --format pdf", dir)
              .exit_code == 64);
    fs::remove_all(dir);
}

TEST_CASE("solver failures exit with 2") {
    EnvGuard guard;
    const fs::path dir = root / "solverfail";
    fs::remove_all(dir);
    const auto r = run_cli("run --instance " + inst_path("micro2.json") +
                               " --scenario B --solver false --out " + (dir / "out").string(),
                           dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("solver failure") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("the tax sweep reports the adoption switch") {
    EnvGuard guard;
    const fs::path dir = root / "sweep";
    fs::remove_all(dir);
    const auto r = run_cli("sweep --instance " + inst_path("micro-tax.json") +
                               " --solver builtin --levels 0:0 --levels 30:30 --out " +
                               (dir / "out").string(),
                           dir);
    CHECK(r.exit_code == 0);
    const auto csv = slurp(dir / "out" / "sweep.csv");
    CHECK(r.out == csv);
    REQUIRE(count_lines(csv) == 3);

    // columns: tax_start,tax_step,Z,E_G,CO2,solar_installs
    std::istringstream is(csv);
    std::string header, row0, row30;
    std::getline(is, header);
    std::getline(is, row0);
    std::getline(is, row30);
    auto last_field = [](const std::string& row) {
        return std::stoi(row.substr(row.rfind(',') + 1));
    };
    auto field = [](const std::string& row, int k) {
        size_t pos = 0;
        for (int i = 0; i < k; ++i) pos = row.find(',', pos) + 1;
        return std::stod(row.substr(pos));
    };
    CHECK(last_field(row0) == 0);  // cheap grid: no panels
    CHECK(last_field(row30) >= 1); // taxed grid: panels pay off
    CHECK(field(row30, 3) < field(row0, 3)); // grid energy drops
    fs::remove_all(dir);
}

TEST_CASE("peak-only trims the assignment dump") {
    EnvGuard guard;
    const fs::path dir = root / "peak";
    fs::remove_all(dir);
    const std::string base = "run --instance " + inst_path("micro1.json") +
                             " --scenario B --solver builtin --out ";
    REQUIRE(run_cli(base + (dir / "full").string(), dir).exit_code == 0);
    REQUIRE(run_cli(base + (dir / "peak").string() + " --peak-only", dir).exit_code == 0);
    const int full
        = count_lines(slurp(dir / "full" / "B" / "assignments.csv"));
    const int peak = count_lines(slurp(dir / "peak" / "B" / "assignments.csv"));
    CHECK(peak < full);
    CHECK(peak > 1);
    fs::remove_all(dir);
}

TEST_CASE("tax overrides flow into the manifest and the objective") {
    EnvGuard guard;
    const fs::path dir = root / "tax";
    fs::remove_all(dir);
    const std::string base = "run --instance " + inst_path("micro2.json") +
                             " --scenario B --solver builtin --out ";
    REQUIRE(run_cli(base + (dir / "plain").string(), dir).exit_code == 0);
    REQUIRE(run_cli(base + (dir / "taxed").string() + " --tax-start 30 --tax-step 5", dir)
                .exit_code == 0);
    const auto manifest = slurp(dir / "taxed" / "manifest.json");
    CHECK(manifest.find("\"tax_start\": 30") != std::string::npos);
    CHECK(manifest.find("\"tax_step\": 5") != std::string::npos);
    // grid is taxed, so the objective must rise
    auto z_of = [](const std::string& costs) {
        const size_t row = costs.find("\nB,") + 3;
        return std::stod(costs.substr(row, costs.find(',', row) - row));
    };
    CHECK(z_of(slurp(dir / "taxed" / "costs.csv")) >
          z_of(slurp(dir / "plain" / "costs.csv")));
    fs::remove_all(dir);
}

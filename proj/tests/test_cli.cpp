#include "cantor/measure_tree.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(CANTOR_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
    int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch() {
    auto d = fs::temp_directory_path() / ("cantor-cli-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("measure gran on Lebesgue") {
    auto r = run("measure gran --measure lebesgue --n 0..10");
    REQUIRE(r.status == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,g_exact,g_sandwich");
    for (int n = 0; n <= 10; ++n) {
        REQUIRE(std::getline(in, line));
        CHECK(line.substr(0, line.rfind(',')) == std::to_string(n) + "," + std::to_string(n + 1));
    }
}

TEST_CASE("atoms4 tree and trace are deterministic and reload valid") {
    auto d = scratch();
    for (int k = 0; k < 2; ++k) {
        auto r = run("construct atoms4 --pcf sched:linear --depth 40 --trace " + (d / ("t" + std::to_string(k))).string() +
                     " --out " + (d / ("a" + std::to_string(k))).string());
        REQUIRE(r.status == 0);
    }
    CHECK(read_file(d / "t0") == read_file(d / "t1"));
    CHECK(read_file(d / "a0") == read_file(d / "a1"));
    CHECK(read_file(d / "t0").rfind("stage=1 event=seed node=0 value=1/2^1\n", 0) == 0);
    auto t = cantor::tree_from_string(read_file(d / "a0"));
    CHECK(t.depth() == 40);
    CHECK(bool(cantor::tree_validate(t)));
    CHECK(cantor::tree_to_string(t) == read_file(d / "a0"));
    CHECK(run("measure validate " + (d / "a0").string()).out == "ok\n");
    fs::remove_all(d);
}

TEST_CASE("measure tree round trip") {
    auto d = scratch();
    REQUIRE(run("measure tree --measure bernoulli:1/2^2 --depth 8 --out " + (d / "b").string()).status == 0);
    auto again = run("measure tree --measure " + (d / "b").string() + " --depth 8");
    CHECK(again.out == read_file(d / "b"));
    std::ofstream(d / "bad") << "measuretree v1 depth=1\n- 1\n0 1/2^1\n1 1/2^2\n";
    CHECK(run("measure validate " + (d / "bad").string()).status == 4);
    fs::remove_all(d);
}

TEST_CASE("complexity profile and scan") {
    auto r = run("complexity profile --seq zeros:64 --measure point:0 --t 10000 --N 12");
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("n,k_t,ka_t,neglog_mu,deficiency\n0,", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 14);
    auto empty = run("complexity profile --seq zeros:64 --measure lebesgue --t 10000 --N 12 --from 13");
    CHECK(empty.out == "n,k_t,ka_t,neglog_mu,deficiency\n");
    auto s = run("complexity scan --seq zeros:4000 --order linear:1 --mode anti-complex --N 40 --from 11");
    CHECK(s.out.find("verdict=consistent certificate=yes") != std::string::npos);
    auto c = run("complexity scan --seq zeros:4000 --order linear:1 --mode complex --N 40");
    CHECK(c.out.find("verdict=refuted") != std::string::npos);
    CHECK(c.out.find("refutation-only") != std::string::npos);
}

TEST_CASE("calibration reproduces the bundled constants") {
    auto r = run("complexity calibrate --t 100000 --seeds 1000..1049");
    REQUIRE(r.status == 0);
    CHECK(r.out == read_file(fs::path(CANTOR_DATA_DIR) / "machine-constants.txt"));
}

TEST_CASE("encoders and config files") {
    CHECK(run("construct gamma --seed 0101 --blocks 4 --schedule const:1").out.rfind("output=100101100101\n", 0) == 0);
    CHECK(run("construct xi-ioc --seed 0110 --blocks 4").out.find("n=3 g=128 j=255 k=510") != std::string::npos);
    CHECK(run("construct xi-dim --seed 0110 --tree full --depth 7").out == "output=0010100\none_tail=0\n");
    auto d = scratch();
    std::ofstream(d / "cfg") << "construct v1 kind=gamma depth=0 pcf=sched:linear seed=0101 blocks=4\n";
    CHECK(run("construct config " + (d / "cfg").string()).out.find("n=3 g=128 ell=248") != std::string::npos);
    std::ofstream(d / "bad") << "construct v1 kind=gamma colour=red\n";
    CHECK(run("construct config " + (d / "bad").string()).status == 2);
    fs::remove_all(d);
}

TEST_CASE("exit status contract") {
    CHECK(run("construct atoms4 --pcf sched:bogus").status == 2);
    CHECK(run("construct atoms4 --frob").status == 2);
    CHECK(run("measure gran --n x..3").status == 2);
    CHECK(run("construct xi-ioc --pcf sched:never --blocks 2").status == 3);
    CHECK(run("complexity profile --seq zeros:4 --N 10").status == 3);
    CHECK(run("measure validate /nonexistent/file").status == 2);
}

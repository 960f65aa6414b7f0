#include "doctest.h"

#include "ccfuse/cd/constructors.hpp"
#include "ccfuse/cd/io.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace ccfuse;
using nlohmann::json;

namespace {

const std::string kCli = CCFUSE_CLI_PATH;
const std::string kData = CCFUSE_DATA_DIR;

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string tmp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "ccfuse_cli_test";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const std::string& args) {
    const std::string err_path = tmp_path("stderr.txt");
    const std::string cmd = kCli + " " + args + " 2>" + err_path;
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), p)) r.out += buf.data();
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err_path);
    return r;
}

double as_double(const json& j) {
    if (j.is_string()) return j.get<std::string>() == "inf" ? INFINITY : -INFINITY;
    return j.get<double>();
}

}  // namespace

TEST_CASE("meta normal-re on the skulls fixture") {
    const auto r = run("meta --model normal-re --focus psi0 --correct --input " + kData + "/skulls.csv");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(std::abs(as_double(j["estimate"]) - 1.980) < 0.01);
    CHECK(j["config"]["command"] == "meta");
    CHECK(j["config"]["options"]["model"] == "normal-re");
    CHECK(j["diagnostics"]["border_rule_triggered"] == true);

    const auto t = run("meta --model normal-re --focus tau --calibrate exact --variant cml --input " + kData +
                       "/skulls.csv");
    REQUIRE(t.code == 0);
    CHECK(std::abs(as_double(json::parse(t.out)["estimate"]) - 0.272) < 0.03);

    const auto q = run("meta --model normal-re --focus tau --calibrate qk --input " + kData + "/skulls.csv");
    REQUIRE(q.code == 0);
    CHECK(std::abs(as_double(json::parse(q.out)["estimate"]) - 0.390) < 0.005);
}

TEST_CASE("meta writes curve and summary files") {
    const std::string prefix = tmp_path("skulls");
    const auto r = run("meta --model normal-re --input " + kData + "/skulls.csv --out " + prefix);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("estimate") != std::string::npos);
    CHECK(r.out.find("level 0.95") != std::string::npos);
    const auto f = read_curve(prefix + ".csv");
    CHECK(f.kind == "cc");
    CHECK(f.grid.size() > 100);
    CHECK(json::parse(slurp(prefix + ".json")).contains("config"));
}

TEST_CASE("meta tables: errors and strict mode") {
    const std::string zero = kData + "/tables_zero_control.csv";
    const auto mh = run("meta --model tables-or --method mh --input " + zero);
    CHECK(mh.code != 0);
    CHECK(mh.err.find("undefined estimate") != std::string::npos);

    // every control arm empty: the conditional estimate is +inf
    const auto loose = run("meta --model tables-or --method exact --input " + zero);
    REQUIRE(loose.code == 0);
    CHECK(json::parse(loose.out)["estimate"] == "inf");
    const auto strict = run("--strict meta --model tables-or --method exact --input " + zero);
    CHECK(strict.code == 4);

    CHECK(run("meta --model tables-rd --method exact --input " + zero).code == 2);
    CHECK(run("meta --model nope --input " + zero).code == 2);
    CHECK(run("meta --model tables-or --input /nonexistent.csv").code == 2);

    const std::string bad = tmp_path("bad_tables.csv");
    std::ofstream(bad) << "y1,m1,y0,m0\n1,10,2,10\n1,10,x,10\n";
    const auto b = run("meta --model tables-or --input " + bad);
    CHECK(b.code == 2);
    CHECK(b.err.find("3") != std::string::npos);  // offending line
}

TEST_CASE("fuse: whales ratio focus with and without prior") {
    const auto r = run("fuse --intervals-csv " + kData +
                       "/whales.csv --focus '(p2-p1)/(6*p1)' --grid -0.4:1.5:381 --prior normal:0.07:0.12");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    const auto& base = j["without_prior"];
    CHECK(std::abs(as_double(base["estimate"]) - 0.026) < 0.003);
    const auto& iv = base["intervals"][1];
    CHECK(iv["level"] == 0.95);
    REQUIRE(iv["intervals"].size() == 1);
    const double lo = as_double(iv["intervals"][0]["lo"]), hi = as_double(iv["intervals"][0]["hi"]);
    CHECK(std::abs(lo - (-0.094)) < 0.01);
    CHECK(std::abs(hi - 0.454) < 0.01);

    const auto& pv = j["intervals"][1]["intervals"];
    REQUIRE(pv.size() == 1);
    const double width = as_double(pv[0]["hi"]) - as_double(pv[0]["lo"]);
    CHECK(width < hi - lo);
    CHECK(width < 2 * 1.959963984540054 * 0.12);
    CHECK(j["sources"].size() == 2);
}

TEST_CASE("fuse: one source with identity focus reproduces the input curve") {
    const std::string cd_prefix = tmp_path("normal_cd");
    REQUIRE(run("curve --type normal --estimate 1.0 --stddev 0.5 --out " + cd_prefix).code == 0);
    const std::string out = tmp_path("identity");
    REQUIRE(run("fuse --source " + cd_prefix + ".csv --focus p1 --out " + out).code == 0);
    const auto in = cc_from_cd(cd_from_file(read_curve(cd_prefix + ".csv")));
    const auto fused = cc_from_file(read_curve(out + ".csv"));
    double worst = 0.0;
    for (std::size_t i = 0; i < in.grid.size(); ++i) worst = std::max(worst, std::abs(fused.at(in.grid[i]) - in.values[i]));
    CHECK(worst < 1e-9);

    CHECK(run("fuse --interval 1:2 --focus p1").code == 2);
    CHECK(run("fuse --intervals-csv " + kData + "/whales.csv --focus 'p1 +'  --grid 0:1:10").code == 2);
    CHECK(run("fuse --intervals-csv " + kData + "/whales.csv --focus 'p1*p2'").code == 2);  // needs --grid
}

TEST_CASE("convert and curve") {
    const std::string cd_prefix = tmp_path("interval_cd");
    const auto c = run("curve --type interval --median 9810 --lo 3439 --hi 21457 --out " + cd_prefix);
    REQUIRE(c.code == 0);
    const auto j = json::parse(slurp(cd_prefix + ".json"));
    CHECK(std::abs(j["a"].get<double>() - 0.321) < 0.005);
    CHECK(std::abs(j["s"].get<double>() - 2.798) < 0.005);

    const std::string ll = tmp_path("interval_ll.csv");
    REQUIRE(run("convert --input " + cd_prefix + ".csv --method chi2 --out " + ll).code == 0);
    const auto f = read_curve(ll);
    CHECK(f.kind == "loglik");
    CHECK(run("convert --input " + ll + " --method normal --out " + tmp_path("x.csv")).code == 2);

    const auto m = run("curve --type median --values 3,1,4,1.5,9,2.6,5");
    REQUIRE(m.code == 0);
    CHECK(json::parse(m.out)["estimate"].get<double>() > 1.0);
    CHECK(run("curve --type t --estimate 0 --stddev 1").code == 2);  // needs --df
}

TEST_CASE("bench: shipped basic-re scenario, determinism and errors") {
    const std::string a = tmp_path("bench_a"), b = tmp_path("bench_b");
    const auto r = run("--threads 2 bench --scenario " + kData + "/scenarios/basic_re_small.json --out " + a);
    REQUIRE(r.code == 0);
    const auto j = json::parse(slurp(a + ".json"));
    REQUIRE(j["methods"].size() == 4);
    for (const auto& m : j["methods"]) {
        CAPTURE(m["method"].get<std::string>());
        CHECK(m["successes"].get<int>() + m["failures"].get<int>() + m["drops"].get<int>() == 2000);
        CHECK(m["coverage"].get<double>() >= 0.93);
        CHECK(m["coverage"].get<double>() <= 0.98);
    }
    REQUIRE(run("--threads 1 bench --scenario " + kData + "/scenarios/basic_re_small.json --out " + b).code == 0);
    // the thread count is part of the embedded config; the results are not
    auto ja = json::parse(slurp(a + ".json")), jb = json::parse(slurp(b + ".json"));
    ja.erase("config");
    jb.erase("config");
    CHECK(ja.dump() == jb.dump());
    CHECK(slurp(a + ".csv") == slurp(b + ".csv"));
    const std::string first = slurp(a + ".json");
    REQUIRE(run("--threads 2 bench --scenario " + kData + "/scenarios/basic_re_small.json --out " + a).code == 0);
    CHECK(first == slurp(a + ".json"));

    const auto bad = run("bench --scenario " + kData + "/scenarios/basic_re_small.json --methods standard,bogus");
    CHECK(bad.code == 2);
    CHECK(bad.err.find("bogus") != std::string::npos);
    CHECK(bad.err.find("hksj") != std::string::npos);
}

TEST_CASE("bench: Neyman-Scott scenario reports the distance to the gold curve") {
    const std::string out = tmp_path("ns");
    REQUIRE(run("bench --scenario " + kData + "/scenarios/neyman_scott.json --out " + out).code == 0);
    const auto j = json::parse(slurp(out + ".json"));
    bool found = false;
    for (const auto& m : j["methods"]) {
        if (m["method"] != "corrected") continue;
        found = true;
        // depends on k only: 0.0844 at k = 20
        CHECK(m["extras"]["sup_vs_gold"].get<double>() == doctest::Approx(0.0844).epsilon(0.01));
    }
    CHECK(found);
    CHECK(slurp(out + ".csv").find("sup_vs_gold=") != std::string::npos);
}

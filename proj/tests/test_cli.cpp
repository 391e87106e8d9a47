#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using Json = nlohmann::json;

namespace {

const std::string kBin = QSLICE_BIN;
const std::string kData = QSLICE_TEST_DATA;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunResult run(const std::string& args) {
    static int counter = 0;
    std::string out_path = "/tmp/qslice_cli_out_" + std::to_string(counter);
    std::string err_path = "/tmp/qslice_cli_err_" + std::to_string(counter);
    ++counter;
    std::string cmd = kBin + " " + args + " > " + out_path + " 2> " + err_path;
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(rc);
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

}  // namespace

TEST_CASE("formula command") {
    auto r = run("formula --d 3");
    REQUIRE(r.exit_code == 0);
    Json j = Json::parse(r.out);
    CHECK(j["d"] == 3);
    CHECK(j["limit"]["0"]["num"] == "1");
    CHECK(j["limit"]["0"]["den"] == "3");
    CHECK(j["limit"]["1"]["num"] == "1");
    CHECK(j["limit"]["1"]["den"] == "2");
    CHECK(j["limit"]["2"]["num"] == "0");
    CHECK(j["limit"]["3"]["num"] == "1");
    CHECK(j["limit"]["3"]["den"] == "6");

    auto csv = run("formula --d 3 --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.substr(0, 16) == "k,num,den,approx");

    auto e2 = run("formula --d 1 --e 2");
    REQUIRE(e2.exit_code == 0);
    Json j2 = Json::parse(e2.out);
    CHECK(j2["limit"]["2"]["den"] == "2");
}

TEST_CASE("exact command and exit codes") {
    auto r = run("exact --spec " + kData + "/conic3.var --N 1");
    REQUIRE(r.exit_code == 0);
    Json j = Json::parse(r.out);
    CHECK(j["levels"][0]["total"] == "13");
    CHECK(j["levels"][0]["counts"]["0"] == "3");
    CHECK(j["levels"][0]["counts"]["1"] == "4");
    CHECK(j["levels"][0]["counts"]["2"] == "6");
    CHECK(j["variety"]["p"] == 3);

    CHECK(run("exact --spec " + kData + "/missing.var --N 1").exit_code == 2);
    CHECK(run("exact --spec " + kData + "/conic3.var").exit_code == 2);  // missing --N
    CHECK(run("bogus-subcommand").exit_code == 2);
    // budget violations exit 3
    CHECK(run("exact --spec " + kData + "/conic3.var --N 1 --max-points 2").exit_code == 3);
}

TEST_CASE("mc determinism: byte-identical across reruns and thread counts") {
    std::string base = "mc --spec " + kData + "/conic3.var --N 1 --samples 2000 --seed 77";
    auto a = run(base + " --threads 1");
    auto b = run(base + " --threads 1");
    auto c = run(base + " --threads 4");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    Json j = Json::parse(a.out);
    CHECK(j["levels"][0]["mode"] == "mc");
    CHECK(j["levels"][0]["samples"] == 2000);
    CHECK(j["levels"][0].contains("se"));

    auto d = run(base + " --format csv");
    auto e = run("mc --spec " + kData + "/conic3.var --N 1 --samples 2000 --seed 78 --format csv");
    CHECK(d.out != e.out);  // different seed, different draw
}

TEST_CASE("converge command writes reports and plot data") {
    std::string out = "/tmp/qslice_conv.json";
    auto r = run("converge --spec " + kData + "/conic3.var --N-list 1,2,3 --out " + out);
    REQUIRE(r.exit_code == 0);
    Json j = Json::parse(slurp(out));
    REQUIRE(j["levels"].size() == 3);
    double prev = 1e9;
    for (const auto& level : j["levels"]) {
        double dev = level["deviation"].get<double>();
        CHECK(dev < prev);
        prev = dev;
    }
    std::string plot = slurp(out + ".plot");
    int lines = 0;
    for (char ch : plot)
        if (ch == '\n') ++lines;
    CHECK(lines == 3);
    CHECK(plot.substr(0, 2) == "3 ");  // q^1 = 3 first

    auto csv = run("converge --spec " + kData + "/conic3.var --N-list 1,2 --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("N,q_N,mode,total", 0) == 0);

    CHECK(run("converge --spec " + kData + "/conic3.var --N-list bogus").exit_code == 2);
}

TEST_CASE("csv and json renderings of one run agree on the rationals") {
    auto j = run("exact --spec " + kData + "/conic2.var --N 1");
    auto c = run("exact --spec " + kData + "/conic2.var --N 1 --format csv");
    REQUIRE(j.exit_code == 0);
    REQUIRE(c.exit_code == 0);
    Json json = Json::parse(j.out);
    std::istringstream is(c.out);
    std::string header, line;
    std::getline(is, header);
    while (std::getline(is, line)) {
        std::vector<std::string> cols;
        std::istringstream ls(line);
        std::string col;
        while (std::getline(ls, col, ',')) cols.push_back(col);
        if (cols[0] == "limit") {
            CHECK(json["limit"][cols[5]]["num"] == cols[7]);
        } else {
            CHECK(json["levels"][0]["p"][cols[5]]["num"] == cols[7]);
            CHECK(json["levels"][0]["p"][cols[5]]["den"] == cols[8]);
        }
    }
}

TEST_CASE("tangency command") {
    auto r = run("tangency --spec " + kData + "/conic3.var --levels 2");
    REQUIRE(r.exit_code == 0);
    Json j = Json::parse(r.out);
    CHECK(j["simple_tangency"]["found"] == true);
    CHECK(j["simple_tangency"]["pattern"][0] == 2);
    CHECK(j["simple_tangency"]["witness_line"].size() == 2);

    auto q = run("tangency --spec " + kData + "/quadric3.var --trials 5 --levels 2");
    REQUIRE(q.exit_code == 0);
    Json jq = Json::parse(q.out);
    CHECK(jq["simple_tangency"]["found"] == true);
    CHECK(jq["simple_tangency"].contains("slicing_subspace"));

    // identical invocation is byte-identical
    auto q2 = run("tangency --spec " + kData + "/quadric3.var --trials 5 --levels 2");
    CHECK(q.out == q2.out);

    CHECK(run("tangency --spec " + kData + "/line2.var").exit_code == 2);  // d = 1
}

TEST_CASE("mu command") {
    auto r = run("mu --spec " + kData + "/quadric3.var --N 1");
    REQUIRE(r.exit_code == 0);
    Json j = Json::parse(r.out);
    CHECK(j["total"] == "40");
    CHECK(j["irreducible"] == "24");
    CHECK(j["mu"]["num"] == "3");  // canonical form of 24/40
    CHECK(j["mu"]["den"] == "5");

    CHECK(run("mu --spec " + kData + "/conic3.var --N 1").exit_code == 2);  // not in P^3
}

TEST_CASE("probe-conjecture command") {
    std::string base = "probe-conjecture --spec " + kData + "/line3.var --N 2 --samples 400 --seed 9";
    auto r = run(base);
    REQUIRE(r.exit_code == 0);
    Json j = Json::parse(r.out);
    CHECK(j["samples"] == 400);
    CHECK(j["e"] == 2);
    CHECK(j["limit"]["0"]["den"] == "2");
    auto r2 = run(base);
    CHECK(r.out == r2.out);

    CHECK(run("probe-conjecture --spec " + kData + "/quadric3.var --N 1 --samples 10").exit_code ==
          2);
}

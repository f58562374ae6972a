#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

// Runs the tool with stderr dropped; stdout and the exit code are the
// contract under test.
RunResult run(const std::string& args) {
    std::string cmd = std::string(BELLPOLY_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    RunResult res;
    if (!pipe) return res;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
    int status = pclose(pipe);
    if (WIFEXITED(status)) res.code = WEXITSTATUS(status);
    return res;
}

std::filesystem::path tmp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("bellpoly_cli_" + name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("frobnicate").code == 2);
    CHECK(run("vertices").code == 2);                  // missing model
    CHECK(run("vertices \"PTO[A>B]\"").code == 2);     // grammar error
    CHECK(run("membership --model L[3]").code == 2);   // no query
    CHECK(run("reproduce nosuchtarget").code == 2);
    CHECK(run("reproduce table2 --backend rational").code == 2);
    CHECK(run("eval --ineq chsh").code == 2);          // eval needs a setup
    CHECK(run("vertices L[3] --backend fixnum").code == 2);
    CHECK(run("--help").code == 0);
}

TEST_CASE("vertices writes the artifact to stdout when --out is absent") {
    RunResult res = run("vertices L[3]");
    CHECK(res.code == 0);
    CHECK(res.out.rfind("model=L[3] n=3 count=64", 0) == 0);
    // 64 rows plus the header and the embedded manifest comment
    int lines = 0;
    for (char c : res.out) lines += c == '\n';
    CHECK(lines == 66);
}

TEST_CASE("repeated identical commands give byte-identical stdout") {
    std::string cmd = "vertices NS[2/1] --seed 9";
    RunResult a = run(cmd);
    RunResult b = run(cmd);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("count=160") != std::string::npos);
}

TEST_CASE("gated long-running modes refuse to start without --long") {
    CHECK(run("ns3").code == 2);
    CHECK(run("vertices NS[3/1]:ns3=/tmp/absent.vtx").code == 2);
}

TEST_CASE("eval reports the inequality value and the visibility threshold") {
    RunResult res = run("eval --setup PSI_OPT --ineq i-opt");
    CHECK(res.code == 0);
    CHECK(res.out.find("value = 28.8885") != std::string::npos);
    CHECK(res.out.find("bound = 19") != std::string::npos);
    CHECK(res.out.find("violated") != std::string::npos);
    CHECK(res.out.find("threshold = 0.6577") != std::string::npos);
}

TEST_CASE("membership verdicts straddle the W-state boundary") {
    auto w3 = tmp_path("w3.json");
    RunResult mk = run("eval --setup W3_paper --out " + w3.string());
    REQUIRE(mk.code == 0);

    RunResult inside = run("membership --model 'SV[2|1]' --behavior " + w3.string() + " --mix 0.95");
    CHECK(inside.code == 0);
    CHECK(inside.out.find("inside SV[2|1]") != std::string::npos);

    auto verdict = tmp_path("verdict.json");
    RunResult outside = run("membership --model 'SV[2|1]' --setup W3_paper --w 0.96 --out " + verdict.string());
    CHECK(outside.code == 0);
    CHECK(outside.out.find("outside SV[2|1]") != std::string::npos);

    auto doc = nlohmann::json::parse(slurp(verdict));
    CHECK(doc["verdict"] == "outside");
    CHECK(doc["model"] == "SV[2|1]");
    CHECK(doc["vertices"] == 2944);
    CHECK(doc["backend"] == "float");
    CHECK(doc["certificate"]["query_value"].get<double>() > doc["certificate"]["offset"].get<double>());
    CHECK(doc["manifest"]["version"].get<std::string>().rfind("bellpoly", 0) == 0);
    std::filesystem::remove(w3);
    std::filesystem::remove(verdict);
}

TEST_CASE("rational backend accepts float-sourced queries") {
    auto w3 = tmp_path("w3_rat.json");
    RunResult mk = run("eval --setup W3_paper --out " + w3.string());
    REQUIRE(mk.code == 0);

    // decimal --mix literals must parse exactly (0.96 = 24/25, not octal)
    RunResult outside = run("membership --model 'SV[2|1]' --behavior " + w3.string() +
                            " --mix 0.96 --backend rational");
    CHECK(outside.code == 0);
    CHECK(outside.out.find("outside SV[2|1]") != std::string::npos);

    // float data is snapped onto the no-signaling subspace, so a point well
    // inside the local set does not read as off-hull under exact arithmetic
    RunResult inside = run("membership --model L[3] --setup W3_paper --w 0.5 --backend rational");
    CHECK(inside.code == 0);
    CHECK(inside.out.find("inside L[3]") != std::string::npos);
    std::filesystem::remove(w3);
}

TEST_CASE("visibility agrees between the CLI and the frozen table value") {
    RunResult res = run("visibility --model NS[2/1] --setup W3_paper");
    CHECK(res.code == 0);
    CHECK(res.out.find("visibility = 0.8477") != std::string::npos);
}

TEST_CASE("facets of the bipartite local polytope") {
    RunResult res = run("facets --model L[2]");
    CHECK(res.code == 0);
    CHECK(res.out.find("facets=24") != std::string::npos);
    CHECK(res.out.find("equalities=0") != std::string::npos);
    CHECK(res.out.find("BOUND,") != std::string::npos);
}

TEST_CASE("canon maps relabeled inequalities to one family") {
    auto csv = tmp_path("chsh_swapped.csv");
    {
        std::ofstream out(csv);
        out << "0,0,1\n0,1,-1\n1,0,1\n1,1,1\nBOUND,2\n";
    }
    RunResult named = run("canon --ineq chsh");
    RunResult moved = run("canon --ineq " + csv.string());
    CHECK(named.code == 0);
    CHECK(moved.code == 0);
    CHECK(named.out.find("FAMILY,1cf12b2dee469b3a,8,1") != std::string::npos);
    CHECK(moved.out.find("FAMILY,1cf12b2dee469b3a,8,1") != std::string::npos);
    std::filesystem::remove(csv);
}

TEST_CASE("seesaw output is reproducible for a fixed seed") {
    std::string cmd = "seesaw --ineq chsh --restarts 6 --seed 12";
    RunResult a = run(cmd);
    RunResult b = run(cmd);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("value = 2.828427") != std::string::npos);
}

TEST_CASE("reproduce targets verify the frozen values") {
    RunResult table2 = run("reproduce table2");
    CHECK(table2.code == 0);
    CHECK(table2.out.find("result: PASS") != std::string::npos);
    CHECK(table2.out.find("0.847741") != std::string::npos);

    RunResult sv = run("reproduce svetlichny");
    CHECK(sv.code == 0);
    CHECK(sv.out.find("result: PASS") != std::string::npos);

    RunResult sym = run("reproduce sym-vertices");
    CHECK(sym.code == 0);
    CHECK(sym.out.find("1216") != std::string::npos);
    CHECK(sym.out.find("116") != std::string::npos);
}

#include "doctest.h"

#include "msequiv/msc.hpp"
#include "msequiv/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace msequiv;

TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("file digests") {
    const auto p = std::filesystem::temp_directory_path() / "msequiv_digest.txt";
    std::ofstream(p) << "foobar";
    CHECK(file_digest(p) == "fnv1a64:85944171f73967e8");
    CHECK_THROWS_AS(file_digest("/nonexistent/file"), InputError);
}

TEST_CASE("report envelope") {
    RunReport r;
    r.command = "check";
    r.results["x"] = 1;
    r.warnings.push_back("w");
    r.exit_status = 1;
    const auto j = to_json(r);
    CHECK(j["schema"] == "msequiv-report");
    CHECK(j["version"] == 1);
    CHECK(j["command"] == "check");
    CHECK(j["exit_status"] == 1);
    CHECK(j["inputs"].is_array());
    CHECK(j["warnings"][0] == "w");
    CHECK(j["results"]["x"] == 1);
}

TEST_CASE("steady-state CSV layout") {
    const auto states = find_steady_states(OdeSystem(msc::low_dim()));
    std::ostringstream out;
    write_steady_states_csv(out, states, {"z1", "z2", "z3"});
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line ==
          "index,unstable_count,residual,z1,z2,z3,re_lambda1,re_lambda2,re_lambda3,"
          "im_lambda1,im_lambda2,im_lambda3");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 11);
        CHECK(line.rfind(std::to_string(rows) + ",", 0) == 0);
    }
    CHECK(rows == 5);
}

TEST_CASE("other CSV layouts") {
    Trajectory t;
    t.t = {0.0, 0.5};
    t.states = Matrix{{1.0, 2.0}, {0.25, 3.0}};
    std::ostringstream a;
    write_trajectory_csv(a, t, {"x1", "x2"});
    CHECK(a.str() == "t,x1,x2\n0,1,2\n0.5,0.25,3\n");

    NyquistCurve c;
    c.omega = {-1.0, 0.0, 1.0};
    c.value = {{1.0, -0.5}, {2.0, 0.0}, {1.0, 0.5}};
    std::ostringstream b;
    write_nyquist_csv(b, c);
    CHECK(b.str() == "omega,re,im\n-1,1,-0.5\n0,2,0\n1,1,0.5\n");

    Branch br;
    br.points.push_back({0.1, Vector{{1.5}}, 0, -0.25, 1.0});
    std::ostringstream d;
    write_branch_csv(d, br, {"x"});
    CHECK(d.str() == "param,x,unstable_count,leading_re\n0.1,1.5,0,-0.25\n");
}

TEST_CASE("equivalence payload uses 1-based indices") {
    EquivalenceReport r;
    r.sign_mismatches.push_back({1, 1, 1, -1, {0.1, 0.2}});
    r.inconclusive.push_back(0);
    const auto j = to_json(r);
    CHECK(j["sign_mismatches"][0]["row"] == 2);
    CHECK(j["inconclusive"][0] == 1);
    CHECK(j["verdict"] == false);
}

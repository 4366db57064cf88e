#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sdfm/atoms.hpp"
#include "sdfm/config.hpp"
#include "sdfm/errors.hpp"
#include "sdfm/flow.hpp"
#include "sdfm/ot.hpp"
#include "sdfm/rasterio.hpp"
#include "sdfm/report.hpp"

using namespace sdfm;

static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

static std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

TEST_CASE("raster bytes are exact for a tiny field") {
    LabelField f;
    f.grid = make_grid(0.0, 1.0, 0.0, 1.0, 2, 2);
    f.labels = {1, 1, 2, 2};
    emit_raster(f, "io_raster_tiny.ppm");
    std::string got = slurp("io_raster_tiny.ppm");
    std::string want = "P6\n2 2\n255\n";
    const unsigned char px[12] = {31, 119, 180, 31, 119, 180, 255, 127, 14, 255, 127, 14};
    want.append(reinterpret_cast<const char*>(px), 12);
    CHECK(got == want);

    LabelField u;
    u.grid = make_grid(0.0, 1.0, 0.0, 1.0, 1, 1);
    u.labels = {UNRESOLVED};
    emit_raster(u, "io_raster_unresolved.ppm");
    std::string got2 = slurp("io_raster_unresolved.ppm");
    std::string want2 = "P6\n1 1\n255\n";
    const unsigned char white[3] = {255, 255, 255};
    want2.append(reinterpret_cast<const char*>(white), 3);
    CHECK(got2 == want2);

    // labels beyond 16 wrap around the palette
    LabelField w;
    w.grid = make_grid(0.0, 1.0, 0.0, 1.0, 1, 1);
    w.labels = {17};
    emit_raster(w, "io_raster_wrap.ppm");
    std::string got3 = slurp("io_raster_wrap.ppm");
    CHECK(got3.substr(got3.size() - 3) == std::string("\x1f\x77\xb4")); // palette entry 0

    CHECK_THROWS_AS(emit_raster(f, "/nonexistent_dir_zz/x.ppm"), IoError);
}

TEST_CASE("label field csv round trips bitwise") {
    LabelField f;
    f.grid = make_grid(-1.1, 2.7, 0.0, 1.0, 3, 2);
    f.labels = {1, 0, 2, 3, 4, 17};
    f.producer = Producer::FM_EPS;
    f.epsilon = 0.1;
    label_field_to_csv(f, "io_labels.csv");
    LabelField g = label_field_from_csv("io_labels.csv");
    CHECK(g.labels == f.labels);
    CHECK(g.producer == Producer::FM_EPS);
    CHECK(g.epsilon == 0.1);
    CHECK(g.grid.lo == f.grid.lo);
    CHECK(g.grid.hi == f.grid.hi);
    CHECK(g.grid.nx == 3);
    CHECK(g.grid.ny == 2);

    auto ls = lines_of(slurp("io_labels.csv"));
    REQUIRE(ls.size() >= 5);
    CHECK(ls[0] == "# labels v1");
    CHECK(ls[1].rfind("# producer FM_EPS epsilon ", 0) == 0);
    CHECK(ls[2].rfind("# grid ", 0) == 0);
    CHECK(ls[3] == "1,0,2");
    CHECK(ls[4] == "3,4,17");

    CHECK_THROWS_AS(label_field_from_csv("no_such_file.csv"), IoError);
}

TEST_CASE("trajectory csv layout") {
    AtomSet atoms = four_point_example();
    Trajectory tr = integrate_forward({0.2, 0.0}, atoms, FlowConfig{});
    REQUIRE(tr.capture.has_value());
    trajectory_to_csv(tr, "io_traj.csv");
    auto ls = lines_of(slurp("io_traj.csv"));
    REQUIRE(ls.size() == tr.times.size() + 1);
    CHECK(ls[0] == "t,x0,x1,captured");
    CHECK(ls[1] == "0,0.20000000000000001,0,0");
    // after the capture time the last column switches to the atom label
    CHECK(ls.back().substr(ls.back().size() - 2) == ",4");
}

TEST_CASE("weights and center curve csv layout") {
    LaguerreWeights w;
    w.psi = {0.0, 0.25};
    w.masses = {0.5, 0.5};
    weights_to_csv(w, "io_weights.csv");
    auto ls = lines_of(slurp("io_weights.csv"));
    REQUIRE(ls.size() == 3);
    CHECK(ls[0] == "k,psi_k,mass_k");
    CHECK(ls[1] == "1,0,0.5");
    CHECK(ls[2] == "2,0.25,0.5");

    AtomSet atoms = four_point_example();
    CenterCurve c = center_curve(4, atoms, FlowConfig{}, {0.5, 0.75});
    center_curves_to_csv({c}, "io_centers.csv");
    auto cl = lines_of(slurp("io_centers.csv"));
    REQUIRE(cl.size() == 4); // header + two samples + limit
    CHECK(cl[0] == "k,t,x0,x1");
    CHECK(cl[1].rfind("4,0.5,", 0) == 0);
    CHECK(cl[2].rfind("4,0.75,", 0) == 0);
    CHECK(cl[3].rfind("4,limit,", 0) == 0);
}

TEST_CASE("run reports serialize with bit exact doubles") {
    RunReport r;
    r.command = "unit";
    r.config["grid"] = "-2 2 -2 2 50 50";
    CheckResult c;
    c.name = "deep inner product";
    c.passed = true;
    c.measured = {-8.0, 3.0303e-2, 5e-324, 0.1};
    c.threshold = 1e-6;
    c.relation = "<";
    c.details = "quote \" backslash \\ newline \n tab \t done";
    r.checks.push_back(c);
    r.wall_time_sec = 1.25;

    RunReport s = RunReport::from_json(r.to_json());
    CHECK(s.command == r.command);
    CHECK(s.config == r.config);
    REQUIRE(s.checks.size() == 1);
    CHECK(s.checks[0].name == c.name);
    CHECK(s.checks[0].passed == c.passed);
    CHECK(s.checks[0].measured == c.measured);
    CHECK(s.checks[0].threshold == c.threshold);
    CHECK(s.checks[0].relation == c.relation);
    CHECK(s.checks[0].details == c.details);
    CHECK(s.wall_time_sec == 1.25);
    CHECK(s.all_passed());

    r.save("io_report.json");
    RunReport t = RunReport::load("io_report.json");
    CHECK(t.checks[0].measured == c.measured);

    CheckResult bad;
    bad.passed = false;
    r.checks.push_back(bad);
    CHECK(!r.all_passed());

    CHECK_THROWS_AS(RunReport::load("no_such_report.json"), IoError);
}

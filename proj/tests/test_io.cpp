#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bitrack/io.hpp"
#include "bitrack/fixtures.hpp"
#include "bitrack/presets.hpp"
#include "bitrack/sim_engine.hpp"

using namespace bitrack;
namespace fs = std::filesystem;

TEST_CASE("graph JSON round trip with 1-based indices") {
    Json j = {
        {"n", 3},
        {"edges", {{2, 1, -0.5}, {3, 2, 1.5}}},
        {"leader", {{1, 1.0}}},
    };
    SignedDigraph g = graph_from_json(j);
    CHECK(g.adj(1, 0) == -0.5);
    CHECK(g.adj(2, 1) == 1.5);
    CHECK(g.leader(0) == 1.0);
    SignedDigraph g2 = graph_from_json(graph_to_json(g));
    CHECK((g.adj - g2.adj).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g.leader - g2.leader).cwiseAbs().maxCoeff() == 0.0);

    Json bad = j;
    bad["edges"] = {{4, 1, 1.0}};
    CHECK_THROWS_AS(graph_from_json(bad), ConfigError);
    Json self = j;
    self["edges"] = {{2, 2, 1.0}};
    CHECK_THROWS_AS(graph_from_json(self), ConfigError);
}

TEST_CASE("matrix JSON matches the checked-in fixtures") {
    auto dir = preset_dir() / "matrices";
    CHECK((matrix_from_json(load_json_file(dir / "f_prime.json")) - fixtures::f_prime())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((matrix_from_json(load_json_file(dir / "f_star.json")) - fixtures::f_star())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((matrix_from_json(load_json_file(dir / "f_tilde.json")) - fixtures::f_tilde())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((matrix_from_json(load_json_file(dir / "f_bar.json")) - fixtures::f_bar())
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("spec JSON: round trip and unknown-key rejection") {
    for (const auto& name : preset_names()) {
        ScenarioSpec spec = load_preset(name);
        ScenarioSpec back = spec_from_json(spec_to_json(spec));
        CHECK(back.kind == spec.kind);
        CHECK(back.horizon == spec.horizon);
        CHECK(back.seed == spec.seed);
        // identical dynamics: digests of the traces agree on a short run
        spec.horizon = back.horizon = 50;
        auto a = run(spec), b = run(back);
        for (size_t i = 0; i < a.rows.size(); ++i)
            CHECK(a.rows[i].err_pos == b.rows[i].err_pos);
    }

    Json j = spec_to_json(load_preset("example-3.4"));
    j["surprise"] = 1;
    CHECK_THROWS_AS(spec_from_json(j), ConfigError);
    j.erase("surprise");
    j["gains"]["momentum"] = 0.9;
    CHECK_THROWS_AS(spec_from_json(j), ConfigError);
}

TEST_CASE("assert_constants trips on a transcription mismatch") {
    Json j = spec_to_json(load_preset("example-3.4"));
    j["assert_constants"] = {{"d_M", 3.0}};
    CHECK_THROWS_AS(spec_from_json(j), ConfigError);
    j["assert_constants"] = {{"d_M", 2.0}, {"P", 2}};
    CHECK_NOTHROW(spec_from_json(j));
}

TEST_CASE("schedule JSON replay is bit exact") {
    auto s = generate_async(4, 300, 3, 12);
    auto back = schedule_from_json(schedule_to_json(s));
    CHECK(back.instants == s.instants);
}

TEST_CASE("trace CSV has the documented column layout") {
    auto spec = load_preset("example-3.4");
    spec.horizon = 5;
    auto t = run(spec);
    std::ostringstream os;
    trace_to_csv(t, spec, os);
    std::istringstream in(os.str());
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "k,t,x0_1,v0_1,x1_1,x2_1,x3_1,x4_1,x5_1,x6_1,v1_1,v2_1,v3_1,v4_1,v5_1,v6_1,"
          "err_pos_inf,err_vel_inf");
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 6);
}

TEST_CASE("atomic write replaces the file completely") {
    auto dir = fs::temp_directory_path() / "bitrack_io_test";
    fs::create_directories(dir);
    auto path = dir / "out.json";
    atomic_write_file(path, "first");
    atomic_write_file(path, "second");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "second");
    CHECK_FALSE(fs::exists(dir / "out.json.tmp"));
    fs::remove_all(dir);
}

TEST_CASE("gate and verdict reports serialize to JSON") {
    auto spec = load_preset("example-3.4");
    auto grep = gate(spec);
    Json gj = gate_report_to_json(grep);
    CHECK(gj["overall"] == true);
    CHECK(gj["conditions"].size() == grep.conditions.size());

    auto t = run(spec);
    auto v = verdict(t, spec, spec.tail_fraction, spec.threshold);
    Json vj = verdict_to_json(v);
    CHECK(vj["tracked"] == true);
}

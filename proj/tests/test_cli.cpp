#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "latsch/io.hpp"

namespace fs = std::filesystem;
using latsch::json;

static std::string g_cli;

namespace {

int run(const std::string& args) {
    std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("latsch_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_config(const fs::path& dir, const json& j) {
    latsch::write_text_file((dir / "config.json").string(), j.dump(2));
}

}  // namespace

TEST_CASE("counterexample: default run passes and reports the staircase values") {
    fs::path dir = fresh_dir("ce");
    write_config(dir, {{"version", 1}, {"seed", 7}, {"steps", 3}});
    int rc = run("--config " + (dir / "config.json").string() + " --out " + dir.string() +
                 " counterexample");
    CHECK(rc == 0);
    json rep = json::parse(latsch::read_text_file((dir / "report.json").string()));
    CHECK(rep.at("all_pass").get<bool>());
    CHECK(rep.at("results").at("interior_residual").get<double>() == 0.0);
    CHECK(rep.at("results").at("boundary_max").get<double>() == 1.0);
    CHECK(fs::exists(dir / "counterexample_field.json"));
    CHECK(fs::exists(dir / "counterexample_domain.json"));
}

TEST_CASE("cone: default presets give the four expected verdicts") {
    fs::path dir = fresh_dir("cone");
    write_config(dir, {{"version", 1}, {"seed", 7}});
    int rc =
        run("--config " + (dir / "config.json").string() + " --out " + dir.string() + " cone");
    CHECK(rc == 0);
    std::string csv = latsch::read_text_file((dir / "cone_verdicts.csv").string());
    CHECK(csv.find("rectangle,true") != std::string::npos);
    CHECK(csv.find("rhombus,true") != std::string::npos);
    CHECK(csv.find("zigzag,true") != std::string::npos);
    CHECK(csv.find("figure2_staircase,false") != std::string::npos);
}

TEST_CASE("fermi: singular points land in the CSV, checks pass") {
    fs::path dir = fresh_dir("fermi");
    write_config(dir, {{"version", 1},
                       {"seed", 3},
                       {"dimension", 2},
                       {"lambda", 1.0},
                       {"resolution", 32},
                       {"identity_samples", 200}});
    int rc =
        run("--config " + (dir / "config.json").string() + " --out " + dir.string() + " fermi");
    CHECK(rc == 0);
    json rep = json::parse(latsch::read_text_file((dir / "report.json").string()));
    auto sing = rep.at("results").at("singular_points");
    REQUIRE(sing.size() == 2);
    std::string csv = latsch::read_text_file((dir / "fermi_points.csv").string());
    CHECK(csv.find(",1\n") != std::string::npos);   // an is_singular row exists
}

TEST_CASE("ucp: small certificate batch + rectangle propagation") {
    fs::path dir = fresh_dir("ucp");
    write_config(dir, {{"version", 1},
                       {"seed", 11},
                       {"count", 5},
                       {"support_radius", 3},
                       {"propagation",
                        {{"preset", "rectangle"},
                         {"params", {2, 1}},
                         {"bounding_radius", 12},
                         {"known_zero_radius", 8.0},
                         {"lambda", 1.3}}}});
    int rc = run("--config " + (dir / "config.json").string() + " --out " + dir.string() + " ucp");
    CHECK(rc == 0);
    json rep = json::parse(latsch::read_text_file((dir / "report.json").string()));
    CHECK(rep.at("all_pass").get<bool>());
    CHECK(rep.at("results").contains("sweep_trace"));
}

TEST_CASE("norms: power family verdicts and byte-identical reruns") {
    fs::path dir1 = fresh_dir("norms1");
    fs::path dir2 = fresh_dir("norms2");
    json cfg = {{"version", 1},        {"seed", 5},      {"family", "power"},
                {"exponent", -1.5},    {"r_min", 64.0},  {"r_max", 1024.0},
                {"expect_verdict", "satisfied"}};
    write_config(dir1, cfg);
    write_config(dir2, cfg);
    CHECK(run("--config " + (dir1 / "config.json").string() + " --out " + dir1.string() +
              " norms") == 0);
    CHECK(run("--config " + (dir2 / "config.json").string() + " --out " + dir2.string() +
              " norms") == 0);
    CHECK(latsch::read_text_file((dir1 / "report.json").string()) ==
          latsch::read_text_file((dir2 / "report.json").string()));
    CHECK(latsch::read_text_file((dir1 / "decay_curve.csv").string()) ==
          latsch::read_text_file((dir2 / "decay_curve.csv").string()));
}

TEST_CASE("spectrum: probe-only quick run") {
    fs::path dir = fresh_dir("spectrum");
    write_config(dir, {{"version", 1},
                       {"seed", 13},
                       {"probe", {{"box_sizes", {8, 12, 16}}}},
                       {"symmetry_check", {{"instances", 5}}}});
    int rc = run("--config " + (dir / "config.json").string() + " --out " + dir.string() +
                 " spectrum");
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "spectrum_bins.csv"));
}

TEST_CASE("usage errors exit 1; unknown config fields are rejected") {
    fs::path dir = fresh_dir("usage");
    CHECK(run("definitely-not-a-subcommand") == 1);

    write_config(dir, {{"version", 1}, {"seed", 1}, {"no_such_knob", true}});
    CHECK(run("--config " + (dir / "config.json").string() + " --out " + dir.string() +
              " cone") == 1);

    write_config(dir, {{"version", 2}});
    CHECK(run("--config " + (dir / "config.json").string() + " --out " + dir.string() +
              " cone") == 1);
}

TEST_CASE("failed assertion exits 2") {
    fs::path dir = fresh_dir("fail");
    // expect the staircase to satisfy the cone condition: it does not
    write_config(dir,
                 {{"version", 1},
                  {"seed", 1},
                  {"presets", json::array({{{"preset", "figure2_staircase"}, {"expect", true}}})}});
    CHECK(run("--config " + (dir / "config.json").string() + " --out " + dir.string() +
              " cone") == 2);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-latsch-binary>\n");
        return 2;
    }
    g_cli = argv[argc - 1];
    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv);
    return ctx.run();
}

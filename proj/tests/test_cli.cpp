#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "isodelta_cli.hpp"

using namespace isodelta;
namespace cli = isodelta::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "isodelta");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream os, es;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), os, es);
    return {code, os.str(), es.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("isodelta_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Format, ShortestRoundTripAndNan) {
    EXPECT_EQ(cli::format_number(0.25), "0.25");
    EXPECT_EQ(cli::format_number(-1.0), "-1");
    EXPECT_EQ(cli::format_number(NAN), "nan");
    EXPECT_EQ(cli::column_name(1.10001), "C=1.10001");
    EXPECT_EQ(std::stod(cli::format_number(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Family, DefaultsGiveFourCurves) {
    const auto r = run({"family", "--points", "101", "--xmin", "-5", "--xmax", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 102u);
    EXPECT_EQ(ls[0], "x,C=1e-05,C=0.10001,C=1.10001,C=5.10001");
}

TEST(Family, LargeConstantIsFlat) {
    cli::RunConfig cfg;
    cfg.C_list = {1e12};
    const auto out = cli::cmd_family(cfg);
    double worst = 0.0;
    for (const auto& l : lines(out.body)) {
        if (l[0] == 'x') continue;
        worst = std::max(worst, std::abs(std::stod(l.substr(l.find(',') + 1))));
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(Family, ForbiddenConstantExitsTwo) {
    const auto r = run({"family", "--C", "-0.9"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("ForbiddenBand"), std::string::npos);
}

TEST(Family, SingularSetWritesNanAndSidecar) {
    const auto dir = scratch("fig3");
    const auto out = (dir / "fig3.csv").string();
    const auto r = run({"family", "--C", "-1.4", "--C", "-0.9", "--C", "-0.6", "--C", "-0.3", "--allow-singular",
                        "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto body = slurp(out);
    EXPECT_EQ(lines(body)[0], "x,C=-1.4,C=-0.9,C=-0.6,C=-0.3");
    EXPECT_NE(body.find("nan"), std::string::npos);
    const auto side = lines(slurp(out + ".singularities.csv"));
    ASSERT_EQ(side.size(), 4u);  // header + poles for -0.9, -0.6, -0.3
    EXPECT_EQ(side[0], "C,x,half_line");
    EXPECT_EQ(side[1].rfind("-0.9,", 0), 0u);
}

TEST(Family, JsonUsesNullForPoles) {
    const auto r = run({"family", "--C", "-0.9", "--allow-singular", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["tool"], "isodelta");
    EXPECT_EQ(j["version"], cli::kVersion);
    EXPECT_EQ(j["config"]["g"], -1.0);
    EXPECT_EQ(j["grid"]["points"], 5001);
    const auto& col = j["data"]["C=-0.9"];
    const auto pole = Grid::symmetric(25.0, 5001).nearest(std::log(5.0));
    EXPECT_TRUE(col[pole].is_null());
    EXPECT_NEAR(j["singularities"][0]["x"].get<double>(), std::log(5.0), 1e-8);
}

TEST(Wavefunction, NormalizedNormIsOne) {
    cli::RunConfig cfg;
    cfg.C_list = {1.0};
    const auto ls = lines(cli::cmd_wavefunction(cfg).body);
    std::vector<double> v;
    for (std::size_t i = 1; i < ls.size(); ++i) v.push_back(std::stod(ls[i].substr(ls[i].find(',') + 1)));
    const auto psi = GridFunction(cfg.grid(), v);
    EXPECT_NEAR(integrate(psi * psi), 1.0, 1e-6);
}

TEST(Wavefunction, DistanceToGroundStateShrinksWithC) {
    cli::RunConfig cfg;
    const auto ls = lines(cli::cmd_wavefunction(cfg).body);
    const auto grid = cfg.grid();
    std::vector<double> dist(4, 0.0);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        std::istringstream row(ls[i]);
        std::string cell;
        std::getline(row, cell, ',');
        const double p0 = ground_state_delta(DeltaCoupling(-1.0), std::stod(cell));
        for (int c = 0; c < 4; ++c) {
            std::getline(row, cell, ',');
            dist[c] = std::max(dist[c], std::abs(std::abs(std::stod(cell)) - p0));
        }
    }
    for (int c = 1; c < 4; ++c) EXPECT_LT(dist[c], dist[c - 1]);
    (void)grid;
}

TEST(Wavefunction, UnnormalizedModeAddsGroundStateColumn) {
    const auto r = run({"wavefunction", "--unnormalized", "--allow-singular", "--C", "-1.4", "--C", "-0.9",
                        "--points", "21", "--xmin", "-2", "--xmax", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out)[0], "x,psi0,C=-1.4,C=-0.9");
    EXPECT_NE(r.err.find("singularities"), std::string::npos);
}

TEST(Wavefunction, NormalizingForbiddenConstantExitsTwo) {
    EXPECT_EQ(run({"wavefunction", "--C", "-0.9", "--allow-singular"}).code, 2);
}

TEST(Singularities, Examples) {
    auto r = run({"singularities", "--C", "-0.9"});
    ASSERT_EQ(r.code, 0);
    auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 2u);
    EXPECT_NEAR(std::stod(ls[1].substr(ls[1].find(',') + 1)), std::log(5.0), 1e-8);
    r = run({"singularities", "--C", "0.5"});
    EXPECT_EQ(lines(r.out).size(), 1u);
}

TEST(Singularities, SweepNonEmptyExactlyInsideForbiddenBand) {
    cli::RunConfig cfg;
    cfg.C_list.clear();
    for (int i = -200; i <= 100; ++i) cfg.C_list.push_back(i / 100.0);
    const auto rows = lines(cli::cmd_singularities(cfg).body);
    std::set<double> with_pole;
    for (std::size_t i = 1; i < rows.size(); ++i) with_pole.insert(std::stod(rows[i].substr(0, rows[i].find(','))));
    for (double C : cfg.C_list) EXPECT_EQ(with_pole.count(C) == 1, C > -1.0 && C < 0.0) << C;
}

TEST(Scatter, TransmissionTable) {
    const auto r = run({"scatter", "--C", "1", "--k", "0.5", "--k", "1", "--k", "2", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j["scattering"].size(), 6u);  // bare + C=1, three k each
    for (const auto& row : j["scattering"]) {
        EXPECT_NEAR(row["transmission"].get<double>(), row["transmission_delta"].get<double>(), 1e-3);
        EXPECT_NEAR(row["flux"].get<double>(), 1.0, 1e-6);
    }
}

TEST(Verify, ForbiddenConstantExitsTwo) {
    const auto r = run({"verify", "--C", "-0.9"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("ForbiddenBand"), std::string::npos);
}

TEST(Verify, ConfigErrorsExitTwo) {
    EXPECT_EQ(run({"verify", "--g", "1"}).code, 2);
    EXPECT_EQ(run({"verify", "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"verify", "--bogus"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
}

TEST(Verify, SchemaOnSmallRun) {
    const auto r = run({"verify", "--C", "1", "--k", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    ASSERT_FALSE(j["checks"].empty());
    for (const auto& c : j["checks"]) {
        EXPECT_TRUE(c.contains("name"));
        EXPECT_TRUE(c.contains("measured"));
        EXPECT_TRUE(c.contains("tolerance"));
        EXPECT_TRUE(c["pass"].get<bool>()) << c["name"];
    }
}

TEST(Config, FileValuesAndFlagOverride) {
    const auto dir = scratch("config");
    const auto path = dir / "run.conf";
    {
        std::ofstream f(path);
        f << "g = -2\nC = [0.5, 2]\npoints = 21\nxmin = -2\nxmax = 2\n";
    }
    auto r = run({"family", "--config", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto ls = lines(r.out);
    EXPECT_EQ(ls.size(), 22u);
    EXPECT_EQ(ls[0], "x,C=0.5,C=2");
    r = run({"family", "--config", path.string(), "--C", "3", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["config"]["g"], -2.0);
    EXPECT_EQ(j["columns"], nlohmann::json({"x", "C=3"}));
}

TEST(Figures, FourDatasetsDeterministic) {
    const auto a = scratch("figs_a"), b = scratch("figs_b");
    ASSERT_EQ(run({"figures", "--out", a.string(), "--gnuplot"}).code, 0);
    ASSERT_EQ(run({"figures", "--out", b.string(), "--gnuplot"}).code, 0);
    for (const char* name : {"fig1_potentials.csv", "fig2_wavefunctions.csv", "fig3_potentials.csv",
                             "fig4_wavefunctions.csv", "fig1_potentials.gp"}) {
        ASSERT_TRUE(fs::exists(a / name)) << name;
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
    EXPECT_EQ(lines(slurp(a / "fig1_potentials.csv"))[0], "x,C=1e-05,C=0.10001,C=1.10001,C=5.10001");
    EXPECT_EQ(lines(slurp(a / "fig2_wavefunctions.csv"))[0], "x,C=1e-05,C=0.10001,C=1.10001,C=5.10001");
    EXPECT_EQ(lines(slurp(a / "fig3_potentials.csv"))[0], "x,C=-1.4,C=-0.9,C=-0.6,C=-0.3");
    EXPECT_EQ(lines(slurp(a / "fig4_wavefunctions.csv"))[0], "x,psi0,C=-1.4,C=-0.9,C=-0.6,C=-0.3");
    EXPECT_TRUE(fs::exists(a / "fig3_potentials.singularities.csv"));
}

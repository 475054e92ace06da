#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mic/mic.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run micsim(const std::string& args) {
    const std::string cmd = std::string(MICSIM_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p)) r.out += buf;
    const int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("micsim_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

const std::vector<std::pair<std::string, std::string>> presets{
    {"capacity", ""},
    {"range", "--snr-threshold 0.02"},
    {"fading", "--varsigma 0.8 --snr-threshold 1"},
    {"ber", ""},
    {"crosstalk", ""},
    {"cmi-bw", ""},
    {"cmg", ""},
    {"ej", ""},
    {"nearfield", ""},
};

} // namespace

TEST(Cli, ExitCodes) {
    EXPECT_EQ(micsim("--help").code, 0);
    EXPECT_EQ(micsim("").code, 1);
    EXPECT_EQ(micsim("--no-such-flag link").code, 1);
    EXPECT_EQ(micsim("fig nosuch").code, 1);
    const auto d = scratch("codes");
    std::ofstream(d / "neg.json") << R"({"tx": {"radius": -1}})";
    const auto bad = micsim("--scenario " + (d / "neg.json").string() + " --out " + d.string() + " link");
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.out.find("tx.radius"), std::string::npos);
    std::ofstream(d / "unk.json") << R"({"medium": {"sigma": 1, "rho": 2}})";
    EXPECT_EQ(micsim("--scenario " + (d / "unk.json").string() + " link").code, 2);
    EXPECT_EQ(micsim("--out " + d.string() + " fig range").code, 2);
    EXPECT_EQ(micsim("--out " + d.string() + " fig fading --snr-threshold 1").code, 2);
}

TEST(Cli, PrintScenarioRoundTrips) {
    const auto r = micsim("--print-scenario");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(mic::emit_scenario(mic::parse_scenario_text(r.out)), mic::emit_scenario(mic::Scenario{}));
}

TEST(Cli, LinkReport) {
    const auto d = scratch("link");
    const auto r = micsim("--out " + d.string() + " link --snr-threshold 0.02");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto csv = slurp(d / "link.csv");
    for (const char* key : {"channel_gain", "bandwidth_numeric", "capacity_flat", "range"})
        EXPECT_NE(csv.find(key), std::string::npos) << key;
}

TEST(Cli, FadingReportsErgodicDrop) {
    const auto d = scratch("fading");
    const auto r = micsim("--out " + d.string() + " fading --sigma-d 0.6 --varsigma 0.8 --snr 10");
    ASSERT_EQ(r.code, 0) << r.out;
    std::istringstream is(slurp(d / "fading.csv"));
    std::string line;
    double ec = 0, ref = 0;
    while (std::getline(is, line)) {
        if (line.rfind("ergodic_capacity,", 0) == 0) ec = std::stod(line.substr(17));
        if (line.rfind("ergodic_capacity_no_fading,", 0) == 0) ref = std::stod(line.substr(27));
    }
    EXPECT_NEAR(ec, 2.7, 0.3);
    EXPECT_NEAR(ref, 3.46, 0.01);
}

TEST(Cli, CapacityPresetFamilies) {
    const auto d = scratch("cap");
    ASSERT_EQ(micsim("--out " + d.string() + " fig capacity").code, 0);
    const auto csv = slurp(d / "fig-capacity.csv");
    for (const char* m : {"\r\nair,", "\r\nsoil,", "\r\nseawater,"}) EXPECT_NE(csv.find(m), std::string::npos) << m;
    EXPECT_NE(csv.find(",1000,5,"), std::string::npos);
    EXPECT_NE(csv.find(",1000000,200,"), std::string::npos);
}

TEST(Cli, PresetsAreDeterministic) {
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    for (const auto& [name, extra] : presets) {
        const std::string tail = " --seed 17 --mc-samples 2000 fig " + name + " " + extra;
        ASSERT_EQ(micsim("--out " + a.string() + " --jobs 1" + tail).code, 0) << name;
        ASSERT_EQ(micsim("--out " + b.string() + " --jobs 1" + tail).code, 0) << name;
        ASSERT_EQ(micsim("--out " + c.string() + " --jobs 2" + tail).code, 0) << name;
    }
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const auto name = e.path().filename();
        EXPECT_EQ(slurp(e.path()), slurp(b / name)) << name;
        EXPECT_EQ(slurp(e.path()), slurp(c / name)) << name;
        ++files;
    }
    EXPECT_GE(files, 9);
}

TEST(Cli, SeedChangesMonteCarloPresets) {
    const auto a = scratch("seed_a"), b = scratch("seed_b");
    ASSERT_EQ(micsim("--out " + a.string() + " --seed 1 --mc-samples 2000 fig ej").code, 0);
    ASSERT_EQ(micsim("--out " + b.string() + " --seed 2 --mc-samples 2000 fig ej").code, 0);
    EXPECT_NE(slurp(a / "fig-ej.csv"), slurp(b / "fig-ej.csv"));
}

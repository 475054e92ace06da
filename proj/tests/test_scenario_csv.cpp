#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "mic/mic.hpp"

using namespace mic;

TEST(Scenario, EmptyTextGivesDefaults) {
    for (const char* text : {"", "  \n", "{}"}) {
        const Scenario s = parse_scenario_text(text);
        EXPECT_EQ(s.tx.radius, 0.6);
        EXPECT_EQ(s.tx.turns, 15);
        EXPECT_EQ(s.tx.tuned_frequency, 1e4);
        EXPECT_EQ(s.medium.sigma, 0.01);
        EXPECT_EQ(s.tx_power, 5.0);
        EXPECT_EQ(s.distance, 60.0);
        EXPECT_NEAR(s.noise_psd, dbm_per_band_to_psd(-103, 2000), 1e-30);
    }
}

TEST(Scenario, NegativeRadiusNamesField) {
    try {
        parse_scenario_text(R"({"rx": {"radius": -0.2}})");
        FAIL();
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("rx.radius"), std::string::npos) << e.what();
    }
}

TEST(Scenario, UnknownKeysRejectedWithPath) {
    try {
        parse_scenario_text(R"({"link": {"distanse": 3}})");
        FAIL();
    } catch (const config_error& e) {
        EXPECT_EQ(std::string(e.what()), "/link/distanse: unknown key");
    }
    EXPECT_THROW(parse_scenario_text(R"({"schema_version": 7})"), config_error);
    EXPECT_THROW(parse_scenario_text("{not json"), config_error);
    EXPECT_THROW(parse_scenario_text(R"({"link": {"distance": "far"}})"), config_error);
}

TEST(Scenario, NoiseInDbm) {
    const Scenario s = parse_scenario_text(R"({"link": {"noise_dbm": -100, "noise_bandwidth": 1000}})");
    EXPECT_NEAR(s.noise_psd, 1e-13 / 1000, 1e-25);
    EXPECT_THROW(parse_scenario_text(R"({"link": {"noise_dbm": -100, "noise_psd": 1e-17}})"), config_error);
}

TEST(Scenario, RoundTrip) {
    const auto a = emit_scenario(Scenario{});
    EXPECT_EQ(emit_scenario(parse_scenario_json(a)), a);
    const Scenario custom = parse_scenario_text(R"({
        "medium": {"sigma": 0.077, "epsilon": 2.5677e-10},
        "fading": {"model": "bcs", "sigma_d": 0.6},
        "snr_threshold": 0.5,
        "network": {"orientation": "optimal_rx",
                    "nodes": [{"id": 1, "position": [0, 0, 0]}, {"id": 2, "position": [20, 0, 0], "axis": [0, 1, 0]}]}
    })");
    const auto b = emit_scenario(custom);
    EXPECT_EQ(emit_scenario(parse_scenario_json(b)), b);
    EXPECT_EQ(custom.network.nodes.size(), 2u);
}

TEST(Scenario, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "mic_scenario_rt.json";
    {
        std::ofstream f(path);
        f << emit_scenario(Scenario{}).dump(2);
    }
    EXPECT_EQ(emit_scenario(parse_scenario(path.string())), emit_scenario(Scenario{}));
    std::filesystem::remove(path);
    EXPECT_THROW(parse_scenario("/nonexistent/scenario.json"), config_error);
}

TEST(Csv, CrlfAndQuoting) {
    CsvTable t({"name", "x", "n"});
    t.add({std::string("plain"), 0.1, 3LL});
    t.add({std::string("a,b \"q\""), -2.5, -1LL});
    EXPECT_EQ(t.str(), "name,x,n\r\nplain,0.10000000000000001,3\r\n\"a,b \"\"q\"\"\",-2.5,-1\r\n");
    EXPECT_THROW(t.add({1.0}), config_error);
}

TEST(Csv, DoublesRoundTrip) {
    for (double v : {0.1, 1.0 / 3, 6.02214076e23, -1e-310, 430.88783873045031})
        EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
}

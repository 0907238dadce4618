#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "femtoint/config.hpp"

using namespace femtoint;

namespace {

int error_line(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const config_error& e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST(Config, EmptyFileGivesReferenceScenario)
{
    const LoadedConfig c = parse_config("");
    const auto& s = c.scenario;
    EXPECT_EQ(s.grid.street_width, 20.0);
    EXPECT_EQ(s.grid.block_side, 50.0);
    EXPECT_EQ(s.grid.window_side, 2000.0);
    EXPECT_EQ(s.radio.pathloss_exponent, 4.0);
    EXPECT_DOUBLE_EQ(s.radio.tx_power_mw, 100.0);
    EXPECT_EQ(s.radio.wall_loss_db, 15.0);
    EXPECT_EQ(s.radio.attenuation_constant, 1e-3);
    EXPECT_EQ(s.radio.isolation_db, 0.0);
    EXPECT_EQ(s.traffic.density, 0.1);
    EXPECT_EQ(s.femto.nakagami_m, 1);
    EXPECT_DOUBLE_EQ(s.femto.mean_rx_power_mw, 1e-4);
    EXPECT_NEAR(linear_to_db(s.femto.sir_target), 15.0, 1e-12);
    EXPECT_EQ(c.pathloss.variant, PathlossVariant::NonSingular);
    EXPECT_FALSE(c.pathloss.include_horizontal);
}

TEST(Config, CommentsWhitespaceAndUnits)
{
    const LoadedConfig c = parse_config("# scenario\n\n  radio.tx_power_dbm = 23 \r\n"
                                        "femto.mean_rx_power_dbm=-50\nfemto.sir_target_db=10\n"
                                        "model.pathloss=singular\nmodel.include_horizontal=true\n"
                                        "femto.nakagami_m=3\n");
    EXPECT_NEAR(c.scenario.radio.tx_power_mw, 199.52623149688802, 1e-10);
    EXPECT_NEAR(c.scenario.femto.mean_rx_power_mw, 1e-5, 1e-19);
    EXPECT_NEAR(c.scenario.femto.sir_target, 10.0, 1e-13);
    EXPECT_EQ(c.pathloss.variant, PathlossVariant::Singular);
    EXPECT_TRUE(c.pathloss.include_horizontal);
    EXPECT_EQ(c.scenario.femto.nakagami_m, 3);
}

TEST(Config, IsolationShiftsGainByTwentyDecibels)
{
    const double z0 = parse_config("").scenario.composite_gain();
    const double z20 = parse_config("radio.isolation_db=20\n").scenario.composite_gain();
    EXPECT_NEAR(linear_to_db(z20) - linear_to_db(z0), -20.0, 1e-12);
}

TEST(Config, RejectsSmallPathlossExponentWithLine)
{
    EXPECT_EQ(error_line("traffic.lambda=0.2\nradio.alpha=2.5\n"), 2);
    try {
        parse_config("radio.alpha=2.5");
        FAIL();
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
    }
}

TEST(Config, SyntaxErrors)
{
    EXPECT_EQ(error_line("grid.block_side=50\nfoo.bar=1\n"), 2);
    EXPECT_EQ(error_line("\n\nradio.alpha\n"), 3);
    EXPECT_EQ(error_line("radio.alpha=4x\n"), 1);
    EXPECT_EQ(error_line("radio.alpha=4\nradio.alpha=5\n"), 2);
    EXPECT_EQ(error_line("radio.tx_power_mw=10\nradio.tx_power_dbm=10\n"), 2);
    EXPECT_EQ(error_line("femto.nakagami_m=1.5\n"), 1);
    EXPECT_EQ(error_line("femto.nakagami_m=0\n"), 1);
    EXPECT_EQ(error_line("model.pathloss=fancy\n"), 1);
    EXPECT_EQ(error_line("model.include_horizontal=maybe\n"), 1);
    EXPECT_EQ(error_line("traffic.lambda=-1\n"), 1);
    EXPECT_EQ(error_line("radio.alpha=1e999\n"), 1);
}

TEST(Config, RoundTripIsExact)
{
    const LoadedConfig c = parse_config("radio.tx_power_dbm=17.3\nfemto.sir_target_db=12.25\n"
                                        "traffic.lambda=0.0137\nmodel.include_horizontal=1\n"
                                        "radio.isolation_db=7.5\ngrid.window_side=3000\n");
    const std::string text = to_config_text(c);
    const LoadedConfig back = parse_config(text);
    EXPECT_EQ(to_config_text(back), text);
    EXPECT_EQ(back.scenario.radio.tx_power_mw, c.scenario.radio.tx_power_mw);
    EXPECT_EQ(back.scenario.femto.sir_target, c.scenario.femto.sir_target);
    EXPECT_EQ(back.scenario.composite_gain(), c.scenario.composite_gain());
    EXPECT_TRUE(back.pathloss.include_horizontal);
}

TEST(Config, LoadFromFile)
{
    const std::string path = ::testing::TempDir() + "femtoint_cfg_test.cfg";
    {
        std::ofstream f(path);
        f << "traffic.lambda=0.01\n";
    }
    EXPECT_EQ(load_config(path).scenario.traffic.density, 0.01);
    std::remove(path.c_str());
    EXPECT_THROW(load_config(path), config_error);
}

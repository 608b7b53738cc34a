#include <clocale>
#include <string>

#include <gtest/gtest.h>

#include <aoictl/emit.hpp>

using namespace aoictl;

TEST(Config, ParsesUnitsAndComments) {
    RunConfig cfg;
    apply_text(cfg,
               "# defaults\n"
               "tx_power = 40dBm\n"
               "noise_power = 2e-17 W   # trailing comment\n"
               "\n"
               "run_length=3\n"
               "cdf_mode = grid-rank\n"
               "virtual_block = first-block\n");
    EXPECT_NEAR(cfg.network.tx_power, 10.0, 1e-12);
    EXPECT_EQ(cfg.network.noise_power, 2e-17);
    EXPECT_EQ(cfg.run_length, 3u);
    EXPECT_EQ(cfg.optimizer.cdf_mode, CdfMode::kGridRank);
    EXPECT_EQ(cfg.optimizer.virtual_block, VirtualBlock::kFirstBlock);
}

TEST(Config, ErrorsNameTheLine) {
    RunConfig cfg;
    try {
        apply_text(cfg, "seed = 1\nhorizon = ten\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    EXPECT_THROW(apply_assignment(cfg, "bogus = 1"), ConfigError);
    EXPECT_THROW(apply_assignment(cfg, "tx_power = 40dB"), ConfigError);
    EXPECT_THROW(apply_assignment(cfg, "history = newest"), ConfigError);
    EXPECT_THROW(apply_assignment(cfg, "no equals sign"), ConfigError);
}

TEST(Config, LaterAssignmentsOverride) {
    RunConfig cfg;
    apply_text(cfg, "seed = 3\n");
    apply_assignment(cfg, "seed=8");
    EXPECT_EQ(cfg.seed, 8u);
}

TEST(Config, DescribeRoundTrips) {
    RunConfig cfg;
    apply_text(cfg, "tx_power = 33dBm\nrun_length = 4\nplant_g = 01111\ngrid_step = 0.1\n");
    RunConfig copy;
    for (const auto& [k, v] : describe(cfg)) apply_setting(copy, k, v);
    EXPECT_EQ(describe(copy), describe(cfg));
    EXPECT_EQ(copy.network.tx_power, cfg.network.tx_power);
}

TEST(Config, ThreadsDoNotAppearInDescription) {
    RunConfig a, b;
    b.optimizer.threads = 7;
    EXPECT_EQ(describe(a), describe(b));
}

TEST(Config, PlantMatrices) {
    const Matrix m = parse_matrix("plant_a", "1, 0.1; 0, 1");
    EXPECT_EQ(m.rows(), 2);
    EXPECT_EQ(m(0, 1), 0.1);
    EXPECT_THROW(parse_matrix("plant_a", "1,2;3"), ConfigError);
    EXPECT_EQ(parse_vector("x", "1;2;3").size(), 3);
    RunConfig cfg;
    EXPECT_NO_THROW(plant_model(cfg));
    cfg.plant_b = "1;0";
    cfg.plant_a = "1,0;0,1";
    EXPECT_THROW(plant_model(cfg), ConfigError);
}

TEST(Emit, SeventeenDigitsAndNoLocale) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(1e-17), "1.0000000000000001e-17");
    std::setlocale(LC_ALL, "de_DE.UTF-8");  // may be unavailable; must not matter either way
    EXPECT_EQ(format_double(2.5), "2.5");
    std::setlocale(LC_ALL, "C");
}

TEST(Emit, CsvHeaderDocumentsEveryColumn) {
    CsvTable t({{"k", "blocks", "index"}, {"x", "slots", "value"}});
    t.comment("demo");
    t.add_row({CsvTable::cell(std::size_t{1}), CsvTable::cell(0.5)});
    EXPECT_EQ(t.str(), "# demo\n# k [blocks]: index\n# x [slots]: value\nk,x\n1,0.5\n");
    EXPECT_THROW(t.add_row({"1"}), std::logic_error);
}

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "isar/cli.hpp"
#include "isar/dataset.hpp"
#include "test_support.hpp"

using namespace isar;
using nlohmann::json;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_cross(const fs::path& dir, const std::string& name = "cross.stl") {
    const auto path = dir / name;
    save_stl_file(testing_support::corner_cross(), path.string());
    return path.string();
}

std::string write_config(const fs::path& dir, const json& j) {
    const auto path = dir / "dataset.json";
    std::ofstream(path) << j.dump(2);
    return path.string();
}

json small_config() {
    return {{"version", 1},
            {"targets", {{{"name", "F15"}, {"model", "cross.stl"}}, {{"name", "MIG29"}, {"model", "cross.stl"}}}},
            {"radar_count", 8},
            {"elevations_deg", {15.0}},
            {"noise_levels_db", {200.0, 100.0}},
            {"master_seed", 3},
            {"ray", {{"rays_per_axis", 16}}}};
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
    const auto help = run({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("simulate"), std::string::npos);
    EXPECT_NE(help.out.find("validate-slicy"), std::string::npos);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    const auto missing = run({"simulate", "--out", "x"});
    EXPECT_EQ(missing.code, 2);
    EXPECT_NE(missing.err.find("usage error"), std::string::npos);
    EXPECT_EQ(run({"simulate", "--model", "m.stl", "--out", "x", "--radars", "four"}).code, 2);
    EXPECT_EQ(run({"dataset", "--config", "c.json", "--out", "x", "--workers", "0"}).code, 2);
}

TEST(Cli, SimulateWritesSampleAndPngs) {
    TempDir dir("cli");
    const auto model = write_cross(dir.path());
    const auto out = dir.path() / "sim";
    const auto r = run({"simulate", "--model", model, "--target", "J15", "--radars", "4", "--offset", "10",
                        "--elevation", "30", "--snr", "150", "--seed", "9", "--rays", "12", "--png", "--out",
                        out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["channels"], 4);
    EXPECT_EQ(j["azimuths_deg"], json({10.0, 100.0, 190.0, 280.0}));
    for (int k = 0; k < 4; ++k) EXPECT_TRUE(fs::exists(out / ("stack_ch" + std::to_string(k) + ".png")));
    const auto loaded = read_dataset(out);
    ASSERT_EQ(loaded.stacks.size(), 1u);
    EXPECT_EQ(loaded.stacks[0].label, 3);
    EXPECT_EQ(loaded.stacks[0].meta.snr_db, 150.0);
    EXPECT_EQ(loaded.stacks[0].channels.size(), 4u);

    // Same arguments, same bytes.
    const auto again = dir.path() / "sim2";
    ASSERT_EQ(run({"simulate", "--model", model, "--target", "J15", "--radars", "4", "--offset", "10", "--elevation",
                   "30", "--snr", "150", "--seed", "9", "--rays", "12", "--out", again.string()})
                  .code,
              0);
    EXPECT_EQ(testing_support::read_bytes(out / "dataset.bin"), testing_support::read_bytes(again / "dataset.bin"));
}

TEST(Cli, SimulateRejectsBadInputsWithoutOutput) {
    TempDir dir("cli");
    const auto model = write_cross(dir.path());
    const auto out = dir.path() / "sim";
    auto r = run({"simulate", "--model", model, "--radars", "4", "--offset", "90", "--out", out.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("offset"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(out / "dataset.bin"));

    r = run({"simulate", "--model", (dir.path() / "none.stl").string(), "--out", out.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(fs::exists(out / "dataset.bin"));

    r = run({"simulate", "--model", model, "--target", "B2", "--out", out.string()});
    EXPECT_EQ(r.code, 1);
    r = run({"simulate", "--model", model, "--snr", "300", "--out", out.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(fs::exists(out / "dataset.bin"));
}

TEST(Cli, DatasetDryRunCounts) {
    TempDir dir("cli");
    json all = {{"version", 1}, {"radar_count", 1}, {"targets", json::array()}};
    for (auto name : class_table()) all["targets"].push_back({{"name", name}, {"model", "x.stl"}});
    const auto config = write_config(dir.path(), all);
    auto r = run({"dataset", "--config", config, "--out", (dir.path() / "o").string(), "--dry-run"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("15120 samples"), std::string::npos);
    EXPECT_EQ(json::parse(r.out)["sample_count"], 15120);

    json two = {{"version", 1},
                {"radar_count", 2},
                {"elevations_deg", {15.0}},
                {"noise_levels_db", {150.0}},
                {"targets", {{{"name", "F15"}, {"model", "x.stl"}}, {{"name", "F16"}, {"model", "x.stl"}}}}};
    r = run({"dataset", "--config", write_config(dir.path(), two), "--out", "o", "--dry-run"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("360 samples"), std::string::npos);
    r = run({"dataset", "--config", write_config(dir.path(), two), "--out", "o", "--dry-run", "--radars", "4"});
    EXPECT_NE(r.err.find("180 samples"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir.path() / "o"));
}

TEST(Cli, DatasetConfigErrors) {
    TempDir dir("cli");
    const auto out = (dir.path() / "o").string();
    auto c = small_config();
    c.erase("radar_count");
    auto r = run({"dataset", "--config", write_config(dir.path(), c), "--out", out});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("missing field 'radar_count'"), std::string::npos) << r.err;

    c = small_config();
    c["radar_count"] = "eight";
    r = run({"dataset", "--config", write_config(dir.path(), c), "--out", out});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("field 'radar_count' has the wrong type"), std::string::npos) << r.err;

    c = small_config();
    c["version"] = 2;
    EXPECT_EQ(run({"dataset", "--config", write_config(dir.path(), c), "--out", out}).code, 1);

    std::ofstream(dir.path() / "broken.json") << "{ not json";
    EXPECT_EQ(run({"dataset", "--config", (dir.path() / "broken.json").string(), "--out", out}).code, 1);
    EXPECT_EQ(run({"dataset", "--config", (dir.path() / "absent.json").string(), "--out", out}).code, 1);

    // Model file missing: nothing may be left behind.
    r = run({"dataset", "--config", write_config(dir.path(), small_config()), "--out", out});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(fs::exists(fs::path(out) / "dataset.bin"));
    EXPECT_FALSE(fs::exists(fs::path(out) / "manifest.json"));
}

TEST(Cli, DatasetRenderInfo) {
    TempDir dir("cli");
    write_cross(dir.path());
    const auto out = dir.path() / "ds";
    auto r = run({"dataset", "--config", write_config(dir.path(), small_config()), "--out", out.string(),
                  "--workers", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["sample_count"], 2 * 45 * 2);
    EXPECT_EQ(j["verified"], 2 * 45 * 2);

    r = run({"info", "--dataset", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto info = json::parse(r.out);
    EXPECT_EQ(info["sample_count"], 180);
    EXPECT_EQ(info["radar_count"], 8);
    EXPECT_EQ(info["samples_per_noise_level"]["100"], 90);
    int fold_total = 0;
    for (const auto& n : info["samples_per_fold"]) fold_total += n.get<int>();
    EXPECT_EQ(fold_total, 180);

    const auto pngs = dir.path() / "png";
    r = run({"render", "--dataset", out.string(), "--sample", "7", "--out", pngs.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (int k = 0; k < 8; ++k) EXPECT_TRUE(fs::exists(pngs / ("sample7_ch" + std::to_string(k) + ".png")));
    EXPECT_EQ(run({"render", "--dataset", out.string(), "--sample", "180", "--out", pngs.string()}).code, 1);
}

TEST(Cli, InfoModel) {
    TempDir dir("cli");
    const auto model = write_cross(dir.path());
    auto r = run({"info", "--model", model});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["triangles"], 16);
    EXPECT_EQ(j["format"], "binary");
    EXPECT_NEAR(j["surface_area_m2"].get<double>(), 4.0 + 2.0 + 2.0, 1e-5);
    EXPECT_EQ(run({"info"}).code, 1);
    EXPECT_EQ(run({"info", "--model", model, "--dataset", "x"}).code, 1);
}

TEST(Cli, ValidateSlicySingleElevation) {
    TempDir dir("cli");
    const auto model = (dir.path() / "slicy.stl").string();
    save_stl_file(shapes::slicy(), model);
    const auto out = dir.path() / "v";
    const auto r = run({"validate-slicy", "--model", model, "--out", out.string(), "--elevations", "30"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j["passed"].get<bool>()) << r.out;
    int pngs = 0;
    for (const auto& e : fs::directory_iterator(out)) pngs += e.path().extension() == ".png";
    EXPECT_EQ(pngs, 8);
    EXPECT_TRUE(fs::exists(out / "report.json"));
}

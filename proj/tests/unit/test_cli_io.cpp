#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "darcywave/cli.hpp"
#include "darcywave/io.hpp"

using namespace darcywave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("darcywave_cli_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path small_config(const fs::path& dir, const std::string& preset_name, double up_max = 0.06) {
    json j{{"preset", preset_name}, {"continuation", {{"n", 32}, {"m_z", 16}, {"upkappa_max", up_max}}}};
    const auto path = dir / (preset_name + ".json");
    write_text(path, j.dump(2));
    return path;
}

int run_tool(const std::string& args) {
    const std::string cmd = std::string(DARCYWAVE_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(ConfigIo, RunConfigRoundTrip) {
    RunConfig rc;
    rc.preset = "bulk-forced";
    rc.forcing = preset("bulk-forced").forcing;
    rc.params = PhysicalParams{0.5, -1.0, 2.0};
    rc.continuation.sobolev_max = 12.5;
    rc.continuation.n = 64;
    rc.seed = 42;
    const auto back = run_config_from_json(json::parse(to_json(rc).dump()));
    EXPECT_EQ(back.forcing, rc.forcing);
    EXPECT_EQ(back.params.c, -1.0);
    EXPECT_EQ(back.continuation.sobolev_max, 12.5);
    EXPECT_TRUE(std::isinf(back.continuation.holder_max));
    EXPECT_EQ(back.continuation.n, 64);
    EXPECT_EQ(back.seed, 42u);
}

TEST(ConfigIo, RejectsMalformedConfigs) {
    EXPECT_THROW(run_config_from_json(json{{"preset", "nope"}}), ConfigError);
    EXPECT_THROW(run_config_from_json(json{{"preset", "gravity-cosine"}, {"bogus", 1}}), ConfigError);
    EXPECT_THROW(run_config_from_json(json::object()), ConfigError);
    EXPECT_THROW(run_config_from_json(json{{"preset", "gravity-cosine"}, {"continuation", {{"n", 31}}}}), ConfigError);
    json deg{{"forcing", {{"terms", {{{"target", "phi"}, {"amp", 1.0}, {"m", 1}, {"z", {1, 2, 3, 4, 5, 6}}}}}}}};
    EXPECT_THROW(run_config_from_json(deg), ConfigError);
}

TEST(ConfigIo, ShippedConfigsLoad) {
    for (const auto& e : fs::directory_iterator(DARCYWAVE_CONFIGS)) {
        if (e.path().extension() != ".json") continue;
        EXPECT_NO_THROW(load_run_config(e.path())) << e.path();
    }
}

TEST(SpectralIo, DumpRoundTripIsBitExact) {
    SpectralField f(16);
    for (int xi = 1; xi < 8; ++xi) f.set_coeff(xi, cplx(1.0 / (3.0 * xi), -std::sqrt(2.0) / xi));
    std::stringstream s;
    write_spectral(s, f);
    const auto g = read_spectral(s);
    EXPECT_EQ(f, g);

    std::stringstream bad("{\"format\":\"other\"}\n");
    EXPECT_THROW(read_spectral(bad), ConfigError);
    std::stringstream truncated;
    write_spectral(truncated, f);
    std::string text = truncated.str();
    text.resize(text.size() - 5);
    std::stringstream t2(text);
    EXPECT_THROW(read_spectral(t2), ConfigError);
}

TEST(Cli, ContinueVerifyAndMonitors) {
    const auto dir = scratch("continue");
    const auto cfg = small_config(dir, "gravity-cosine");
    std::ostringstream log, err;
    ASSERT_EQ(cli::cmd_continue(cfg, dir / "out", false, log, err), cli::ok) << err.str();
    const auto lb = load_branch(dir / "out");
    ASSERT_GE(lb.records.size(), 3u);
    EXPECT_EQ(lb.termination.at("reason"), "upkappa_max");
    EXPECT_EQ(lb.termination.at("tripped"), "upkappa");
    EXPECT_TRUE(fs::exists(dir / "out" / "summary.json"));

    cli::VerifyOptions opt;
    EXPECT_EQ(cli::cmd_verify(dir / "out", 2, opt, log, err), cli::ok) << err.str();
    EXPECT_EQ(cli::cmd_verify(dir / "out", 999, opt, log, err), cli::usage);
    opt.refine = true;
    std::ostringstream rlog;
    EXPECT_EQ(cli::cmd_verify(dir / "out", 2, opt, rlog, err), cli::ok) << err.str();
    EXPECT_NE(rlog.str().find("drift_psi"), std::string::npos);

    std::ostringstream mlog;
    EXPECT_EQ(cli::cmd_monitors(dir / "out", mlog, err), cli::ok);
    EXPECT_NE(mlog.str().find("# termination"), std::string::npos);
}

TEST(Cli, TamperedPointFailsVerification) {
    const auto dir = scratch("tamper");
    std::ostringstream log, err;
    ASSERT_EQ(cli::cmd_continue(small_config(dir, "gravity-cosine"), dir / "out", false, log, err), cli::ok);
    const auto file = dir / "out" / point_file_name(2);
    auto psi = load_spectral(file);
    psi.set_coeff(3, psi.coeff(3) + 1e-3);
    save_spectral(file, psi);
    EXPECT_EQ(cli::cmd_verify(dir / "out", 2, {}, log, err), cli::failure);
}

TEST(Cli, UncertifiedConfigIsRefusedUnlessAllowed) {
    const auto dir = scratch("uncertified");
    json j{{"params", {{"g", 1.0}, {"c", 0.0}, {"h", 1.0}}},
           {"forcing", {{"terms", {{{"target", "phi"}, {"amp", -2.0}, {"kind", "cos"}, {"m", 0}, {"z", {0.0, 1.0}}}}}}},
           {"continuation", {{"n", 16}, {"m_z", 12}, {"upkappa_max", 0.02}}}};
    write_text(dir / "u.json", j.dump());
    std::ostringstream log, err;
    EXPECT_EQ(cli::cmd_continue(dir / "u.json", dir / "out", false, log, err), cli::uncertified);
    EXPECT_FALSE(fs::exists(dir / "out" / "branch.jsonl"));
    EXPECT_EQ(cli::cmd_continue(dir / "missing.json", dir / "out", false, log, err), cli::usage);
}

TEST(Cli, ExitStatusesOfTheTool) {
    const auto dir = scratch("tool");
    const auto cfg = small_config(dir, "speed-mode", 0.04);
    EXPECT_EQ(run_tool("continue --config " + cfg.string() + " --out " + (dir / "out").string()), 0);
    EXPECT_EQ(run_tool("verify " + (dir / "out").string() + " --point 1"), 0);
    EXPECT_EQ(run_tool("verify " + (dir / "out").string() + " --point 77"), 2);
    EXPECT_EQ(run_tool("monitors " + (dir / "out").string()), 0);
    EXPECT_EQ(run_tool("continue"), 2);
    EXPECT_EQ(run_tool("frobnicate"), 2);
}

TEST(Cli, SelftestDetectsSignMutation) {
    EXPECT_EQ(run_tool("selftest --suite decomposition"), 0);
    EXPECT_NE(run_tool("selftest --suite decomposition --mutate-sdown"), 0);
    EXPECT_EQ(run_tool("selftest --suite nosuch"), 2);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    const auto dir = scratch("repeat");
    const auto cfg = small_config(dir, "bulk-forced");
    std::ostringstream log, err;
    ASSERT_EQ(cli::cmd_continue(cfg, dir / "a", false, log, err), cli::ok);
    ASSERT_EQ(cli::cmd_continue(cfg, dir / "b", false, log, err), cli::ok);
    EXPECT_EQ(slurp(dir / "a" / "branch.jsonl"), slurp(dir / "b" / "branch.jsonl"));
    EXPECT_EQ(slurp(dir / "a" / point_file_name(3)), slurp(dir / "b" / point_file_name(3)));
}

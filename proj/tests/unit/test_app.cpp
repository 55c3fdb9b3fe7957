#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <doctest.h>

#include "combnoise/app/commands.hpp"
#include "combnoise/app/config.hpp"
#include "combnoise/app/output.hpp"
#include "combnoise/csv.hpp"

namespace fs = std::filesystem;
using namespace combnoise::app;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("combnoise_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Every file of a against the same name in b.
bool same_tree(const fs::path& a, const fs::path& b)
{
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const auto other = b / e.path().filename();
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) return false;
        ++files;
    }
    for (const auto& e : fs::directory_iterator(b)) {
        if (!fs::exists(a / e.path().filename())) return false;
    }
    return files > 0;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(COMBNOISE_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

RunConfig quick_config()
{
    RunConfig cfg;
    cfg.ofd_sweep.points = 6;
    cfg.dcs_advantage.depth_points = 7;
    cfg.cyclo_trace.gains = {3.0};
    cfg.cyclo_trace.trace_duration_s = 2e-4;
    cfg.cyclo_trace.mc_duration_s = 0.05;
    cfg.validate.oracle_instances = 30;
    cfg.validate.mc_configs = 2;
    cfg.validate.mc_duration_s = 0.01;
    cfg.validate.cyclo_mc_duration_s = 0.01;
    return cfg;
}

} // namespace

TEST_CASE("number formatting")
{
    CHECK(combnoise::io::format_number(1.0) == "1.000000000000000e+00");
    CHECK(combnoise::io::format_number(-2.5e-7) == "-2.500000000000000e-07");
}

TEST_CASE("config defaults survive a json round trip")
{
    const RunConfig cfg;
    const auto back = config_from_json(to_json(cfg));
    CHECK(to_json(back) == to_json(cfg));
    CHECK(to_json(cfg)["schema_version"] == kSchemaVersion);
}

TEST_CASE("config rejects unknown keys, bad types and bad schema")
{
    CHECK_THROWS_AS(config_from_json(json{{"sed", 1}}), UsageError);
    CHECK_THROWS_AS(config_from_json(json{{"ofd_sweep", {{"points", "many"}}}}), UsageError);
    CHECK_THROWS_AS(config_from_json(json{{"schema_version", 2}}), UsageError);
    CHECK_THROWS_AS(config_from_json(json{{"ofd_sweep", {{"shapes", json::array()}}}}), UsageError);
    CHECK_THROWS_AS(config_from_json(json{{"cyclo_trace", {{"power_w", 1.0}}}}), UsageError);
    CHECK_NOTHROW(config_from_json(json{{"cyclo_trace", {{"preset", "none"}, {"power_w", 1.0}}}}));
}

TEST_CASE("table output in both formats")
{
    Table t{{"a", "b"}, {{std::string("x"), 1.5}, {std::string("y"), 2LL}}};
    CHECK(table_csv(t) == "a,b\nx,1.500000000000000e+00\ny,2\n");
    const auto j = table_json(t);
    CHECK(j["columns"] == json{"a", "b"});
    CHECK(j["rows"].size() == 2);
}

TEST_CASE("ofd-sweep output and manifest")
{
    const auto dir = scratch("ofd");
    CommandOptions opt;
    opt.out_dir = dir;
    const auto r = run_ofd_sweep(quick_config(), opt);
    CHECK(r.exit_code == exit_ok);
    REQUIRE(fs::exists(dir / "sweep.csv"));
    REQUIRE(fs::exists(dir / "manifest.json"));
    const auto csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind("shape,param,M_rms,R,eta,policy\n", 0) == 0);
    const auto manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["command"] == "ofd-sweep");
    CHECK(manifest["schema_version"] == kSchemaVersion);
    CHECK(manifest["outputs"].size() >= 1);
}

TEST_CASE("manifest is accepted as a config and reproduces the run")
{
    auto cfg = quick_config();
    cfg.seed = 4242;
    const auto a = scratch("manifest_a");
    const auto b = scratch("manifest_b");
    CommandOptions opt;
    opt.out_dir = a;
    run_dcs_advantage(cfg, opt);
    const auto reloaded = load_config((a / "manifest.json").string());
    CHECK(to_json(reloaded) == to_json(cfg));
    opt.out_dir = b;
    run_dcs_advantage(reloaded, opt);
    CHECK(same_tree(a, b));
}

TEST_CASE("figure commands are byte identical across runs and thread counts")
{
    const auto cfg = quick_config();
    for (const std::string cmd : {"ofd-sweep", "dcs-advantage", "cyclo-trace", "validate"}) {
        CAPTURE(cmd);
        const auto a = scratch(cmd + "_a");
        const auto b = scratch(cmd + "_b");
        const auto c = scratch(cmd + "_c");
        CommandOptions opt;
        opt.out_dir = a;
        CHECK(run_command(cmd, cfg, opt) == exit_ok);
        opt.out_dir = b;
        CHECK(run_command(cmd, cfg, opt) == exit_ok);
        opt.out_dir = c;
        opt.threads = 4;
        CHECK(run_command(cmd, cfg, opt) == exit_ok);
        CHECK(same_tree(a, b));
        CHECK(same_tree(a, c));
    }
}

TEST_CASE("json output format")
{
    auto cfg = quick_config();
    cfg.format = "json";
    const auto dir = scratch("json");
    CommandOptions opt;
    opt.out_dir = dir;
    run_ofd_sweep(cfg, opt);
    REQUIRE(fs::exists(dir / "sweep.json"));
    const auto j = json::parse(slurp(dir / "sweep.json"));
    CHECK(j["rows"].size() == 18);
}

TEST_CASE("the sign-flip canary makes validation fail")
{
    auto cfg = quick_config();
    cfg.validate.oracle_instances = 200;
    ValidationOptions v;
    v.inject_epr_sign_flip = true;
    const auto report = run_validation(cfg, v);
    REQUIRE(report.find("ofd_oracle_equivalence") != nullptr);
    CHECK_FALSE(report.find("ofd_oracle_equivalence")->pass);
    CHECK_FALSE(report.all_pass());

    const auto dir = scratch("canary");
    CommandOptions opt;
    opt.out_dir = dir;
    opt.validation = v;
    CHECK(run_command("validate", cfg, opt) == exit_validation);
    CHECK(fs::exists(dir / "validation_report.json"));

    v.inject_epr_sign_flip = false;
    CHECK(run_validation(cfg, v).all_pass());
}

TEST_CASE("CLI exit codes")
{
    const auto dir = scratch("cli");
    CHECK(run_cli("ofd-sweep --out " + dir.string() + " --config " + (dir / "missing.json").string()) == exit_usage);
    CHECK(run_cli("") == exit_usage);
    CHECK(run_cli("frobnicate") == exit_usage);
    CHECK(run_cli("ofd-sweep --format xml") == exit_usage);

    write_file(dir / "empty_shapes.json", R"({"ofd_sweep": {"shapes": []}})");
    CHECK(run_cli("ofd-sweep --out " + dir.string() + " --config " + (dir / "empty_shapes.json").string()) == exit_usage);
    write_file(dir / "broken.json", "{ not json");
    CHECK(run_cli("ofd-sweep --out " + dir.string() + " --config " + (dir / "broken.json").string()) == exit_usage);

    write_file(dir / "aliased.json",
               R"({"cyclo_trace": {"sample_rate_hz": 150000, "mc_duration_s": 0.01, "gains": [2]}})");
    CHECK(run_cli("cyclo-trace --out " + dir.string() + " --config " + (dir / "aliased.json").string()) ==
          exit_usage);
    write_file(dir / "huge.json", R"({"ofd_sweep": {"m_rms_min": 1e7, "m_rms_max": 1e8, "points": 2}})");
    CHECK(run_cli("ofd-sweep --out " + dir.string() + " --config " + (dir / "huge.json").string()) == exit_numeric);

    write_file(dir / "blocker", "");
    CHECK(run_cli("dcs-advantage --out " + (dir / "blocker" / "sub").string()) == exit_io);

    write_file(dir / "small.json", R"({"ofd_sweep": {"points": 5}})");
    const auto out = dir / "ok";
    CHECK(run_cli("ofd-sweep --threads 0 --seed 5 --out " + out.string() + " --config " + (dir / "small.json").string()) ==
          exit_ok);
    CHECK(fs::exists(out / "sweep.csv"));
    CHECK(json::parse(slurp(out / "manifest.json"))["resolved_config"]["seed"] == 5);
}

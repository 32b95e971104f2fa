#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / "rfe_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(RFE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json tiny_iid_config(const fs::path& out) {
    return {{"model", {{"type", "iid"}, {"alpha", 1.0}, {"scale", 1.0}, {"dim", 1}}},
            {"index_set", {{"type", "hyperrectangle"}, {"extents", {1024}}}},
            {"census", {{"p", {1, 2}}}},
            {"simulate", {{"realizations", 3}}},
            {"theta",
             {{"variants", {"block", "u_index"}}, {"realizations", 60}, {"budget", 2000}}},
            {"ac", {{"realizations", 3000}}},
            {"frechet", {{"realizations", 200}, {"theta", 1.0}}},
            {"seed", 5},
            {"out", out.string()}};
}

}  // namespace

TEST_CASE("point-list ingestion: happy path, duplicates, malformed lines") {
    auto dir = scratch() / "ingest";
    fs::create_directories(dir);
    write_file(dir / "pts.txt", "k=2\n0 0\n1 4\n1 4\n");  // duplicate point
    json cfg = {{"index_set", {{"type", "file"}, {"path", (dir / "pts.txt").string()}}},
                {"census", {{"p", {1}}}},
                {"out", (dir / "out").string()}};
    write_file(dir / "cfg.json", cfg.dump());
    CHECK(run_cli("census --config " + (dir / "cfg.json").string()) == 0);
    auto rep = json::parse(slurp(dir / "out" / "census.json"));
    CHECK(rep["lambda_size"] == 2);  // dedup with warning

    write_file(dir / "bad.txt", "k=2\n0 0\n1\n");  // wrong arity on line 3
    cfg["index_set"]["path"] = (dir / "bad.txt").string();
    write_file(dir / "cfg_bad.json", cfg.dump());
    CHECK(run_cli("census --config " + (dir / "cfg_bad.json").string()) == 2);

    write_file(dir / "nohdr.txt", "0 0\n");  // missing k= header
    cfg["index_set"]["path"] = (dir / "nohdr.txt").string();
    write_file(cfg["out"].get<std::string>() + "_", "");  // keep out dir distinct
    write_file(dir / "cfg_nohdr.json", cfg.dump());
    CHECK(run_cli("census --config " + (dir / "cfg_nohdr.json").string()) == 2);
}

TEST_CASE("config validation: unknown keys and missing config rejected") {
    auto dir = scratch() / "schema";
    fs::create_directories(dir);
    json cfg = tiny_iid_config(dir / "out");
    cfg["not_a_section"] = 1;
    write_file(dir / "cfg.json", cfg.dump());
    CHECK(run_cli("run --config " + (dir / "cfg.json").string()) == 2);

    json cfg2 = tiny_iid_config(dir / "out");
    cfg2["theta"]["bogus"] = true;
    write_file(dir / "cfg2.json", cfg2.dump());
    CHECK(run_cli("theta --config " + (dir / "cfg2.json").string()) == 2);

    CHECK(run_cli("run --config " + (dir / "missing.json").string()) == 2);
}

TEST_CASE("run executes configured steps and writes a complete manifest") {
    auto dir = scratch() / "run";
    fs::create_directories(dir);
    auto cfg = tiny_iid_config(dir / "out");
    write_file(dir / "cfg.json", cfg.dump());
    CHECK(run_cli("run --config " + (dir / "cfg.json").string()) == 0);

    auto man = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(man["steps"].size() == 5);  // census simulate theta ac frechet
    for (const auto& step : man["steps"])
        for (const auto& f : step["outputs"]) {
            CAPTURE(f.get<std::string>());
            CHECK(fs::exists(f.get<std::string>()));
            CHECK(fs::file_size(f.get<std::string>()) > 0);
        }

    // iid ground truth flows through the report
    auto theta = json::parse(slurp(dir / "out" / "theta.json"));
    for (const auto& e : theta["entries"]) {
        if (e.contains("error")) continue;
        CHECK(e["value"].get<double>() > 0.8);
        CHECK(e["value"].get<double>() < 1.2);
    }
    auto fre = json::parse(slurp(dir / "out" / "frechet.json"));
    CHECK(fre["pass"].get<bool>());
}

TEST_CASE("reports are byte-identical across reruns and thread counts") {
    auto dir = scratch() / "det";
    fs::create_directories(dir);
    auto cfg = tiny_iid_config(dir / "out_a");
    write_file(dir / "cfg.json", cfg.dump());
    CHECK(run_cli("run --config " + (dir / "cfg.json").string()) == 0);
    CHECK(run_cli("run --config " + (dir / "cfg.json").string() + " --out " +
                  (dir / "out_b").string() + " --threads 3") == 0);
    for (const auto& entry : fs::directory_iterator(dir / "out_a")) {
        auto name = entry.path().filename().string();
        if (name == "manifest.json") continue;  // records out dir and wall clock
        CAPTURE(name);
        CHECK(slurp(entry.path()) == slurp(dir / "out_b" / name));
    }
}

TEST_CASE("step failures exit with code 3") {
    auto dir = scratch() / "fail";
    fs::create_directories(dir);
    auto cfg = tiny_iid_config(dir / "out");
    cfg["tailfield"] = {{"realizations", 3}, {"u", 1e18}};  // no exceedance possible
    write_file(dir / "cfg.json", cfg.dump());
    CHECK(run_cli("tailfield --config " + (dir / "cfg.json").string()) == 3);
    CHECK(run_cli("run --config " + (dir / "cfg.json").string()) == 3);
}

TEST_CASE("config hash ignores key order") {
    auto dir = scratch() / "hash";
    fs::create_directories(dir);
    json cfg = tiny_iid_config(dir / "out");
    cfg["run"] = {{"steps", {"census"}}};
    // same logical config, keys emitted in two different textual orders
    std::string sorted = cfg.dump();
    std::string reversed = "{";
    bool first = true;
    for (auto it = cfg.rbegin(); it != cfg.rend(); ++it) {
        if (!first) reversed += ",";
        first = false;
        reversed += json(it.key()).dump() + ":" + it.value().dump();
    }
    reversed += "}";
    REQUIRE(json::parse(reversed) == json::parse(sorted));
    write_file(dir / "a.json", sorted);
    write_file(dir / "b.json", reversed);
    CHECK(run_cli("run --config " + (dir / "a.json").string() + " --out " +
                  (dir / "oa").string()) == 0);
    CHECK(run_cli("run --config " + (dir / "b.json").string() + " --out " +
                  (dir / "ob").string()) == 0);
    auto ha = json::parse(slurp(dir / "oa" / "manifest.json"))["config_hash"];
    auto hb = json::parse(slurp(dir / "ob" / "manifest.json"))["config_hash"];
    CHECK(ha == hb);
}

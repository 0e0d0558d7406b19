#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef TSQA_CLI_PATH
#define TSQA_CLI_PATH "tsqa"
#endif

namespace {

const std::string kDir = "/tmp/tsqa_cli_test";

int run(const std::string& args, const std::string& log = "log.txt") {
    std::string cmd = std::string(TSQA_CLI_PATH) + " " + args + " > " + kDir + "/" + log + " 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_config(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

struct Fixture {
    Fixture() {
        std::filesystem::remove_all(kDir);
        std::filesystem::create_directories(kDir);
    }
};

} // namespace

TEST_CASE("cli surface end to end") {
    Fixture fx;
    std::string cfg = kDir + "/gen.ini";
    write_config(cfg, "[corpus]\nstage = alignment\nuts = 8\nmts_shape = 2\nmts_local = 2\n"
                      "max_length = 128\n");

    SUBCASE("unknown config keys exit 2 and name the key") {
        write_config(kDir + "/bad.ini", "[corpus]\nuts = 4\nbananas = 7\n");
        CHECK(run("--config " + kDir + "/bad.ini generate", "bad.txt") == 2);
        auto log = slurp(kDir + "/bad.txt");
        CHECK(log.find("corpus.bananas") != std::string::npos);
    }

    SUBCASE("generate is byte-deterministic and evolve/eval/plot chain off it") {
        REQUIRE(run("--config " + cfg + " --seed 5 --out " + kDir + "/a generate") == 0);
        REQUIRE(run("--config " + cfg + " --seed 5 --out " + kDir + "/b generate") == 0);
        CHECK(slurp(kDir + "/a/alignment.jsonl") == slurp(kDir + "/b/alignment.jsonl"));
        CHECK(slurp(kDir + "/a/alignment.jsonl") != "");

        // evolve with the offline mock generator, twice, identical bytes
        REQUIRE(run("--seed 9 --mock --out " + kDir + "/e1 evolve " + kDir +
                    "/a/alignment.jsonl --rounds 2") == 0);
        REQUIRE(run("--seed 9 --mock --out " + kDir + "/e2 evolve " + kDir +
                    "/a/alignment.jsonl --rounds 2") == 0);
        CHECK(slurp(kDir + "/e1/evolved.jsonl") == slurp(kDir + "/e2/evolved.jsonl"));
        auto evolve_log = slurp(kDir + "/log.txt");
        CHECK(evolve_log.find("acceptance rate") != std::string::npos);

        // eval both offline targets
        CHECK(run("--out " + kDir + "/a eval " + kDir + "/a/alignment.jsonl --oracle") == 0);
        CHECK(run("--seed 4 --out " + kDir + "/a eval " + kDir +
                  "/a/alignment.jsonl --tools acc=0.9") == 0);
        CHECK(std::filesystem::exists(kDir + "/a/report-oracle.json"));
        CHECK(std::filesystem::exists(kDir + "/a/report-tools.csv"));

        // plot a record with a known id; the SVG must carry a polyline
        CHECK(run("--out " + kDir + "/a plot " + kDir + "/a/alignment.jsonl a-uts-000001") == 0);
        auto svg = slurp(kDir + "/a/a-uts-000001.svg");
        CHECK(svg.find("<polyline") != std::string::npos);
    }

    SUBCASE("missing seed corpus exits 3") {
        CHECK(run("--mock --out " + kDir + " evolve " + kDir + "/nope.jsonl") == 3);
    }

    SUBCASE("unknown plot id exits 3") {
        REQUIRE(run("--config " + cfg + " --seed 5 --out " + kDir + "/p generate") == 0);
        CHECK(run("--out " + kDir + "/p plot " + kDir + "/p/alignment.jsonl no-such-id") == 3);
    }

    SUBCASE("evolve without endpoint and without --mock exits 5") {
        REQUIRE(run("--config " + cfg + " --seed 5 --out " + kDir + "/q generate") == 0);
        CHECK(run("--out " + kDir + "/q evolve " + kDir + "/q/alignment.jsonl") == 5);
    }
}

TEST_CASE("plot shades fluctuation windows from pool truth") {
    Fixture fx;
    std::string cfg = kDir + "/gen.ini";
    // Spiky corpus: sample until a record whose pool has a fluctuation.
    write_config(cfg, "[corpus]\nstage = alignment\nuts = 20\nmax_length = 128\n");
    REQUIRE(run("--config " + cfg + " --seed 21 --out " + kDir + " generate") == 0);

    std::ifstream in(kDir + "/alignment.jsonl");
    std::string line, target_id, expect_kind;
    std::size_t expect_pos = 0;
    while (std::getline(in, line)) {
        auto kpos = line.find("\"fluctuations\":[{\"kind\":\"");
        if (kpos == std::string::npos) continue;
        auto idpos = line.find("\"id\":\"");
        target_id = line.substr(idpos + 6, line.find('"', idpos + 6) - idpos - 6);
        kpos += 25;
        expect_kind = line.substr(kpos, line.find('"', kpos) - kpos);
        auto ppos = line.find("\"position\":", kpos);
        expect_pos = std::strtoull(line.c_str() + ppos + 11, nullptr, 10);
        break;
    }
    REQUIRE_FALSE(target_id.empty());
    REQUIRE(run("--out " + kDir + " plot " + kDir + "/alignment.jsonl " + target_id) == 0);
    auto svg = slurp(kDir + "/" + target_id + ".svg");
    CHECK(svg.find("<rect") != std::string::npos);
    CHECK(svg.find(expect_kind + " @ " + std::to_string(expect_pos)) != std::string::npos);
}

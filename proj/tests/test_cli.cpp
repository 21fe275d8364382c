#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "semico/cli.hpp"

using namespace semico;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "semico-cli");
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string cfg(const std::string& name) { return std::string(SEMICO_CONFIG_DIR) + "/" + name; }

std::string scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("semico-cli-test-" + name);
    fs::remove_all(p);
    return p.string();
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("ladder subcommand")
{
    std::string dir = scratch("ladder");
    auto r = run({"ladder", "--config", cfg("odometer_ladder.json"), "--out", dir});
    CHECK(r.code == 0);
    CHECK(fs::exists(fs::path(dir) / "ladder.json"));
    auto rep = read_json_file((fs::path(dir) / "ladder_report.json").string());
    CHECK(rep["valid"] == true);
}

TEST_CASE("binary word over a window")
{
    std::string dir = scratch("word");
    auto r = run({"word", "--config", cfg("nontame_odometer_binary.json"), "--out", dir, "--window", "-100:100"});
    REQUIRE(r.code == 0);
    std::istringstream csv(slurp(fs::path(dir) / "word.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "g,value");
    std::size_t rows = 0;
    long long expect = -100;
    while (std::getline(csv, line)) {
        auto comma = line.find(',');
        CHECK(std::stoll(line.substr(0, comma)) == expect++);
        std::string v = line.substr(comma + 1);
        CHECK((v == "0" || v == "1"));
        ++rows;
    }
    CHECK(rows == 201);
}

TEST_CASE("certify, tamper, verify")
{
    std::string dir = scratch("cert");
    REQUIRE(run({"build", "--config", cfg("tame_odometer.json"), "--out", dir}).code == 0);
    std::string inst = (fs::path(dir) / "instance.json").string();
    REQUIRE(run({"certify-nonnull", "--instance", inst, "--out", dir}).code == 0);
    std::string good = (fs::path(dir) / "certificate_nonnull_s2.json").string();
    auto ok = run({"verify", "--instance", inst, "--cert", good, "--out", dir});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("certificate valid") != std::string::npos);

    json c = read_json_file(good);
    c["witnesses"]["10"] = c["witnesses"]["01"];
    std::string bad = (fs::path(dir) / "tampered.json").string();
    write_text_file(bad, dump_json(c));
    auto r = run({"verify", "--instance", inst, "--cert", bad, "--out", dir});
    CHECK(r.code == 1);
    CHECK(r.out.find("FAIL pattern 10 position 1") != std::string::npos);
    CHECK(r.out.find("FAIL pattern 10 position 2") != std::string::npos);
}

TEST_CASE("malformed configs exit 2 with a location")
{
    std::string dir = scratch("bad");
    fs::create_directories(dir);
    std::string p = (fs::path(dir) / "bad.json").string();
    write_text_file(p, R"({"ladder": {"depth": "deep"}})");
    auto r = run({"ladder", "--config", p, "--out", dir});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("error: " + p + "#/ladder/depth: ", 0) == 0);

    write_text_file(p, "{\"ladder\": [1,}\n");
    r = run({"ladder", "--config", p, "--out", dir});
    CHECK(r.code == 2);
    CHECK(r.err.find(p + ":1:") != std::string::npos);

    CHECK(run({"ladder", "--window", "5"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"ladder", "--depth", "many"}).code == 2);
}

TEST_CASE("module errors exit 1 with the message verbatim")
{
    std::string dir = scratch("modfail");
    auto r = run({"toeplitz", "--config", cfg("nontame_rotation.json"), "--out", dir});
    CHECK(r.code == 1);
    CHECK(r.err == "Toeplitz verification needs a binary odometer instance\n");
    r = run({"certify-nontame", "--config", cfg("nontame_rotation.json"), "--out", dir, "--bound", "3"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("no witness within bound 3", 0) == 0);
}

TEST_CASE("repeated runs are byte-identical")
{
    std::string a = scratch("det-a"), b = scratch("det-b");
    for (const auto& d : {a, b}) {
        REQUIRE(run({"build", "--config", cfg("nontame_rotation.json"), "--out", d, "--seed", "7"}).code == 0);
        REQUIRE(run({"word", "--config", cfg("nontame_rotation.json"), "--out", d}).code == 0);
        REQUIRE(run({"plot", "--config", cfg("default_rotation.json"), "--out", d, "--depth", "3"}).code == 0);
    }
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        CHECK(slurp(e.path()) == slurp(fs::path(b) / e.path().filename()));
        ++files;
    }
    CHECK(files >= 5);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nint.h"

namespace fs = std::filesystem;

namespace {

const std::string kFixtures = NINT_FIXTURES;

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / "capi_tmp" / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

int run1(const char* cmd, const std::string& config) {
    return nint_run(cmd, config.c_str(), nullptr, nullptr, 0);
}

}  // namespace

TEST_CASE("version and subcommand table") {
    CHECK(nint_version() != nullptr);
    const char* const* names = nint_subcommands();
    int n = 0;
    bool saw_validate = false, saw_cost = false;
    for (; names[n]; ++n) {
        if (std::strcmp(names[n], "validate") == 0) saw_validate = true;
        if (std::strcmp(names[n], "cost-report") == 0) saw_cost = true;
    }
    CHECK(n == 13);
    CHECK(saw_validate);
    CHECK(saw_cost);
}

TEST_CASE("corpus handle lifecycle") {
    nint_corpus* c = nullptr;
    REQUIRE(nint_corpus_open((kFixtures + "/corpus10.jsonl").c_str(), &c) == NINT_OK);
    REQUIRE(c != nullptr);
    size_t n = 0;
    CHECK(nint_corpus_size(c, &n) == NINT_OK);
    CHECK(n == 10);
    char buf[32];
    CHECK(nint_corpus_article_id(c, 0, buf, sizeof buf) == NINT_OK);
    CHECK(std::string(buf) == "art00");
    CHECK(nint_corpus_article_id(c, 99, buf, sizeof buf) == NINT_ERR_INVALID_ARG);
    nint_corpus_free(c);
}

TEST_CASE("opening a missing corpus reports an error") {
    nint_corpus* c = nullptr;
    CHECK(nint_corpus_open("/no/such/file.jsonl", &c) != NINT_OK);
    CHECK(c == nullptr);
    CHECK(std::string(nint_last_error_code()) != "");
    CHECK(std::string(nint_last_error()) != "");
}

TEST_CASE("fleiss kappa matches the hand-worked table") {
    const long counts[] = {3, 0, 3, 0, 2, 1, 0, 3};
    double kappa = 0.0;
    int degenerate = -1;
    REQUIRE(nint_fleiss_kappa(counts, 4, 2, &kappa, &degenerate) == NINT_OK);
    CHECK(kappa == doctest::Approx(0.625).epsilon(1e-12));
    CHECK(degenerate == 0);
}

TEST_CASE("fleiss kappa flags the degenerate single-category table") {
    const long counts[] = {3, 0, 3, 0};
    double kappa = 0.0;
    int degenerate = -1;
    REQUIRE(nint_fleiss_kappa(counts, 2, 2, &kappa, &degenerate) == NINT_OK);
    CHECK(kappa == 1.0);
    CHECK(degenerate == 1);
}

TEST_CASE("null arguments are rejected without crashing") {
    CHECK(nint_run(nullptr, "{}", nullptr, nullptr, 0) == NINT_ERR_INVALID_ARG);
    CHECK(nint_fleiss_kappa(nullptr, 1, 1, nullptr, nullptr) == NINT_ERR_INVALID_ARG);
    CHECK(nint_corpus_open(nullptr, nullptr) == NINT_ERR_INVALID_ARG);
}

TEST_CASE("run validate writes its artifacts and manifest") {
    TempDir tmp("validate");
    std::string config = "{\"corpus\": \"" + kFixtures + "/corpus10.jsonl\", "
                         "\"output_dir\": \"" + tmp.path.string() + "\"}";
    REQUIRE(run1("validate", config) == NINT_OK);
    CHECK(fs::exists(tmp.path / "validation.json"));
    std::string manifest = slurp(tmp.path / "manifest.json");
    CHECK(manifest.find("\"command\": \"validate\"") != std::string::npos);
    CHECK(manifest.find("timestamp") != std::string::npos);
    CHECK(manifest.find("corpus10.jsonl") != std::string::npos);
}

TEST_CASE("run agree reproduces the kappa from the ratings file") {
    TempDir tmp("agree");
    std::string config = "{\"ratings\": \"" + kFixtures + "/ratings.csv\", "
                         "\"output_dir\": \"" + tmp.path.string() + "\"}";
    REQUIRE(run1("agree", config) == NINT_OK);
    std::string report = slurp(tmp.path / "agreement.json");
    CHECK(report.find("0.625") != std::string::npos);
    CHECK(report.find("interpretation") != std::string::npos);
}

TEST_CASE("unknown config keys fail with a config error") {
    CHECK(run1("validate", "{\"corpsu\": \"x\"}") == NINT_ERR_CONFIG);
    CHECK(std::string(nint_last_error_code()) == "ConfigError");
    CHECK(std::string(nint_last_error()).find("corpsu") != std::string::npos);
}

TEST_CASE("unknown subcommand fails") {
    CHECK(run1("frobnicate", "{}") == NINT_ERR_RUNTIME);
    CHECK(std::string(nint_last_error_code()) == "UnknownCommand");
}

TEST_CASE("overrides are applied and validated") {
    TempDir tmp("override");
    const char* keys[] = {"output", "seed"};
    std::string out = tmp.path.string();
    std::string config = "{\"corpus\": \"" + kFixtures + "/corpus10.jsonl\"}";
    const char* values[] = {out.c_str(), "99"};
    REQUIRE(nint_run("split", config.c_str(), keys, values, 2) == NINT_OK);
    CHECK(fs::exists(tmp.path / "train.jsonl"));
    CHECK(slurp(tmp.path / "manifest.json").find("\"seed\": 99") != std::string::npos);

    const char* bad_keys[] = {"seed"};
    const char* bad_values[] = {"not-a-number"};
    CHECK(nint_run("split", config.c_str(), bad_keys, bad_values, 1) == NINT_ERR_CONFIG);
}

// Shells out to the built binary and checks the documented command
// contracts: artifacts, exit codes, idempotent reruns.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mlad/manifest.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = MLAD_CLI_PATH;
const fs::path kDir = "/tmp/mlad_cli_test";

int run_cmd(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream is(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) ++n;
    return n;
}

struct Fixture {
    Fixture() {
        fs::remove_all(kDir);
        fs::create_directories(kDir);
    }
};

} // namespace

TEST_CASE("pipeline round trip on a synthetic corpus") {
    Fixture fx;
    const std::string d = kDir.string();

    REQUIRE(run_cmd("prepare --synthetic --out " + d + "/syn --windows 160 --anomaly-rate 0.1 "
                    "--anomaly-lines 3 --seed 3 --system A") == 0);
    CHECK(fs::exists(kDir / "syn/corpus.log"));
    CHECK(fs::exists(kDir / "syn/labels.txt"));
    CHECK(count_lines(kDir / "syn/corpus.log") == 160 * 20);

    REQUIRE(run_cmd("parse --input " + d + "/syn/corpus.log --out " + d + "/p") == 0);
    CHECK(fs::exists(kDir / "p.templates"));
    CHECK(count_lines(kDir / "p.keys") == 160 * 20);

    REQUIRE(run_cmd("prepare --keys " + d + "/p.keys --templates " + d +
                    "/p.templates --labels " + d + "/syn/labels.txt --origin A --out " + d +
                    "/A --window 20 --split --seed 3") == 0);
    CHECK(fs::exists(kDir / "A.windows"));
    CHECK(fs::exists(kDir / "A.train.windows"));
    CHECK(fs::exists(kDir / "A.test.windows"));

    REQUIRE(run_cmd("train --windows " + d + "/A.train.windows --templates " + d +
                    "/A.templates --out " + d + "/model.ckpt --d 24 --d-h 8 --d-ff 48 --k 2 "
                    "--dropout 0 --epochs 2 --batch 32 --seed 3") == 0);
    CHECK(fs::exists(kDir / "model.ckpt"));
    CHECK(fs::exists(kDir / "model.ckpt.manifest.json"));

    REQUIRE(run_cmd("score --model " + d + "/model.ckpt --windows " + d +
                    "/A.test.windows --templates " + d + "/A.templates --out " + d +
                    "/scores.csv --policy contamination --rho auto") == 0);
    CHECK(fs::exists(kDir / "scores.csv"));
    CHECK(count_lines(kDir / "scores.csv") > 1);

    REQUIRE(run_cmd("eval --kind single --dataset A=" + d + "/A --train A --out " + d +
                    "/report.csv --d 24 --d-h 8 --d-ff 48 --k 2 --dropout 0 --epochs 2 "
                    "--batch 32 --seed 3") == 0);
    const std::string report = slurp(kDir / "report.csv");
    CHECK(report.find("single,A,A,") != std::string::npos);
}

TEST_CASE("prepare --window 20 on a 45-record corpus yields 3 windows") {
    Fixture fx;
    const std::string d = kDir.string();
    {
        std::ofstream corpus(kDir / "small.log");
        std::ofstream labels(kDir / "small.labels");
        for (int i = 0; i < 45; ++i) {
            corpus << "event number " << i << " ok\n";
            labels << "0\n";
        }
    }
    REQUIRE(run_cmd("parse --input " + d + "/small.log --out " + d + "/s") == 0);
    REQUIRE(run_cmd("prepare --keys " + d + "/s.keys --templates " + d +
                    "/s.templates --labels " + d + "/small.labels --out " + d +
                    "/S --window 20") == 0);
    // Header + 3 windows (20, 20, 5).
    CHECK(count_lines(kDir / "S.windows") == 4);
}

TEST_CASE("missing inputs produce nonzero exits naming the path") {
    Fixture fx;
    const std::string d = kDir.string();
    CHECK(run_cmd("parse --input " + d + "/nope.log --out " + d + "/x") == 2);
    CHECK(run_cmd("parse --out " + d + "/x") == 106); // CLI11 required-option failure
    {
        std::ofstream corpus(kDir / "c.log");
        corpus << "a b\nc d\n";
    }
    REQUIRE(run_cmd("parse --input " + d + "/c.log --out " + d + "/c") == 0);
    // prepare without --labels
    CHECK(run_cmd("prepare --keys " + d + "/c.keys --templates " + d + "/c.templates --out " +
                  d + "/c2 --window 2") == 2);
}

TEST_CASE("identical reruns produce identical artifact digests") {
    Fixture fx;
    const std::string d = kDir.string();
    REQUIRE(run_cmd("prepare --synthetic --out " + d + "/s1 --windows 40 --seed 9") == 0);
    REQUIRE(run_cmd("prepare --synthetic --out " + d + "/s2 --windows 40 --seed 9") == 0);
    CHECK(mlad::file_digest(d + "/s1/corpus.log") == mlad::file_digest(d + "/s2/corpus.log"));
    CHECK(slurp(kDir / "s1/prepare.manifest.json") != "");

    REQUIRE(run_cmd("parse --input " + d + "/s1/corpus.log --out " + d + "/p1") == 0);
    REQUIRE(run_cmd("parse --input " + d + "/s1/corpus.log --out " + d + "/p2") == 0);
    CHECK(slurp(kDir / "p1.templates") == slurp(kDir / "p2.templates"));
    CHECK(slurp(kDir / "p1.keys") == slurp(kDir / "p2.keys"));
}

TEST_CASE("eval ablation and sweep emit the expected rows") {
    Fixture fx;
    const std::string d = kDir.string();
    REQUIRE(run_cmd("prepare --synthetic --out " + d + "/syn --windows 160 --anomaly-rate 0.1 "
                    "--anomaly-lines 3 --seed 4 --system A") == 0);
    REQUIRE(run_cmd("parse --input " + d + "/syn/corpus.log --out " + d + "/p") == 0);
    REQUIRE(run_cmd("prepare --keys " + d + "/p.keys --templates " + d +
                    "/p.templates --labels " + d + "/syn/labels.txt --origin A --out " + d +
                    "/A --window 20") == 0);

    const std::string flags = " --d 24 --d-h 8 --d-ff 48 --k 2 --dropout 0 --epochs 2 "
                              "--batch 32 --seed 4";
    REQUIRE(run_cmd("eval --kind ablation --ablate no_gmm --dataset A=" + d +
                    "/A --train A --out " + d + "/ab.csv" + flags) == 0);
    const std::string ab = slurp(kDir / "ab.csv");
    CHECK(ab.find("no_gmm") != std::string::npos);

    REQUIRE(run_cmd("eval --kind alpha_sweep --alpha-sweep 1,1.2,1.5 --dataset A=" + d +
                    "/A --train A --out " + d + "/sweep.csv" + flags) == 0);
    CHECK(count_lines(kDir / "sweep.csv") == 4); // header + 3 rows
}

TEST_CASE("fuse merges prepared datasets") {
    Fixture fx;
    const std::string d = kDir.string();
    for (const char* sys : {"A", "B"}) {
        const std::string s(sys);
        REQUIRE(run_cmd("prepare --synthetic --out " + d + "/raw" + s +
                        " --windows 40 --seed 5 --system " + s) == 0);
        REQUIRE(run_cmd("parse --input " + d + "/raw" + s + "/corpus.log --out " + d + "/p" +
                        s) == 0);
        REQUIRE(run_cmd("prepare --keys " + d + "/p" + s + ".keys --templates " + d + "/p" +
                        s + ".templates --labels " + d + "/raw" + s +
                        "/labels.txt --origin " + s + " --out " + d + "/" + s +
                        " --window 20") == 0);
    }
    REQUIRE(run_cmd("prepare --fuse " + d + "/A " + d + "/B --out " + d + "/AB --seed 5") == 0);
    CHECK(count_lines(kDir / "AB.windows") == 81); // header + 40 + 40
    const std::string windows = slurp(kDir / "AB.windows");
    CHECK(windows.find("A\t") != std::string::npos);
    CHECK(windows.find("B\t") != std::string::npos);
}

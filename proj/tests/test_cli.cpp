#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

#include "glyphrun/exports.hpp"
#include "glyphrun/sha256.hpp"
#include "glyphrun/textio.hpp"

using namespace glyphrun;
namespace fs = std::filesystem;

namespace {

const std::string kCli = GLYPHRUN_CLI_PATH;
const fs::path kData = fs::path(GLYPHRUN_DATA_DIR);

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("glyphrun-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int runCli(const std::string& args, const std::string& envPrefix = "") {
    std::string cmd = envPrefix + kCli + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string fileDigest(const fs::path& p) { return Sha256::hexDigest(readFile(p)); }

void writeText(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string dataArgs() { return " --tables " + q(kData / "tables") + " "; }

} // namespace

TEST_CASE("synth writes the corpus layout and is seed-deterministic") {
    TempDir tmp;
    auto corpusA = tmp.path / "a";
    auto corpusB = tmp.path / "b";
    std::string models = " --models " + q(kData / "models");

    CHECK(runCli("synth --out " + q(corpusA) + " --seed 5" + models) == 0);
    CHECK(runCli("synth --out " + q(corpusB) + " --seed 5" + models) == 0);

    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(corpusA))
        if (entry.is_regular_file() && entry.path().extension() == ".txt") ++files;
    CHECK(files == 115);
    for (const char* dir : {"train/cyrillic", "train/latin", "train/glagolitic",
                            "test/cyrillic", "test/latin", "test/glagolitic"})
        CHECK(fs::is_directory(corpusA / dir));

    CHECK(fileDigest(corpusA / "manifest.csv") == fileDigest(corpusB / "manifest.csv"));

    // non-empty target needs --force
    CHECK(runCli("synth --out " + q(corpusA) + " --seed 5" + models) == 2);
    CHECK(runCli("synth --out " + q(corpusA) + " --seed 5 --force" + models) == 0);

    // per-script counts honor flags
    auto corpusC = tmp.path / "c";
    CHECK(runCli("synth --out " + q(corpusC) + " --seed 5 --train-counts 2,3,4 --test-per-script 1" +
                 models) == 0);
    std::size_t small = 0;
    for (const auto& entry : fs::recursive_directory_iterator(corpusC))
        if (entry.is_regular_file() && entry.path().extension() == ".txt") ++small;
    CHECK(small == 12);
}

TEST_CASE("encode emits one line per document, deterministically") {
    TempDir tmp;
    auto corpus = tmp.path / "corpus";
    writeText(corpus / "train" / "latin" / "a.txt", "bob");
    writeText(corpus / "train" / "latin" / "b.txt", "pop");
    writeText(corpus / "test" / "cyrillic" / "c.txt", "боб");

    auto out = tmp.path / "coded.tsv";
    CHECK(runCli("encode --corpus " + q(corpus) + dataArgs() + "--out " + q(out)) == 0);
    auto lines = splitLines(readFile(out));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "a\t101");
    CHECK(lines[1] == "b\t202");
    CHECK(lines[2] == "c\t101");

    auto digest = fileDigest(out);
    CHECK(runCli("encode --corpus " + q(corpus) + dataArgs() + "--out " + q(out)) == 0);
    CHECK(fileDigest(out) == digest);

    // split filter
    CHECK(runCli("encode --corpus " + q(corpus) + dataArgs() + "--split test --out " + q(out)) == 0);
    CHECK(splitLines(readFile(out)).size() == 1);
}

TEST_CASE("encode maps bad trees and bad flags to the right exit codes") {
    TempDir tmp;
    auto corpus = tmp.path / "corpus";
    writeText(corpus / "train" / "klingon" / "a.txt", "x");
    auto out = tmp.path / "coded.tsv";
    CHECK(runCli("encode --corpus " + q(corpus) + dataArgs() + "--out " + q(out)) == 2);
    CHECK(runCli("encode --corpus " + q(tmp.path / "missing") + dataArgs() + "--out " + q(out)) == 1);
    CHECK(runCli("encode --corpus " + q(corpus) + dataArgs() + "--split nope --out " + q(out)) == 2);
    CHECK(runCli("encode --no-such-flag") == 2);
    CHECK(runCli("--help") == 0);
}

TEST_CASE("features produces the CSV, summary and plots") {
    TempDir tmp;
    auto corpus = tmp.path / "corpus";
    REQUIRE(runCli("synth --out " + q(corpus) + " --seed 11 --models " + q(kData / "models")) == 0);

    auto out = tmp.path / "features.csv";
    auto summary = tmp.path / "summary.csv";
    auto plots = tmp.path / "plots";
    CHECK(runCli("features --corpus " + q(corpus) + dataArgs() + "--split test --out " + q(out) +
                 " --summary " + q(summary) + " --plot " + q(plots)) == 0);

    auto csv = parseFeatureCsv(readFile(out));
    CHECK(csv.features.size() == 15);
    CHECK(csv.scripts.size() == 15);

    // the summary brackets every value in the CSV
    auto summaryLines = splitLines(readFile(summary));
    REQUIRE(summaryLines.size() == 16);
    CHECK(summaryLines[0] == "script,feature,min,max");
    for (std::size_t i = 1; i < summaryLines.size(); ++i) {
        auto fields = splitOn(summaryLines[i], ',');
        REQUIRE(fields.size() == 4);
        auto script = scriptFromName(fields[0]);
        auto feature = featureFromName(fields[1]);
        REQUIRE(script.has_value());
        REQUIRE(feature.has_value());
        double lo = std::stod(fields[2]), hi = std::stod(fields[3]);
        CHECK(lo <= hi);
        for (const auto& f : csv.features) {
            if (csv.scripts.at(f.docId) != *script) continue;
            double v = featureValue(f, *feature);
            CHECK(v >= lo);
            CHECK(v <= hi);
        }
    }

    for (const char* name : {"sre.svg", "lre.svg", "rp.svg"}) {
        auto svg = readFile(plots / name);
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK(svg.find("data-min=") != std::string::npos);
        CHECK(svg.find("data-max=") != std::string::npos);
    }
    // the plot directory also carries the min/max table
    CHECK(readFile(plots / "summary.csv") == readFile(summary));

    // deterministic rerun
    auto digest = fileDigest(out);
    CHECK(runCli("features --corpus " + q(corpus) + dataArgs() + "--split test --out " + q(out)) == 0);
    CHECK(fileDigest(out) == digest);
}

TEST_CASE("classify and evaluate complete the pipeline") {
    TempDir tmp;
    auto corpus = tmp.path / "corpus";
    REQUIRE(runCli("synth --out " + q(corpus) + " --seed 13 --models " + q(kData / "models")) == 0);
    auto features = tmp.path / "features.csv";
    REQUIRE(runCli("features --corpus " + q(corpus) + dataArgs() + "--split test --out " +
                   q(features)) == 0);

    auto partition = tmp.path / "partition.csv";
    CHECK(runCli("classify --features " + q(features) + " --method gaicda --seed 42 --out " +
                 q(partition)) == 0);
    auto parsed = parsePartitionCsv(readFile(partition));
    CHECK(parsed.k == 3);
    CHECK(fs::exists(tmp.path / "partition.csv.params"));

    // byte-identical rerun
    auto digest = fileDigest(partition);
    CHECK(runCli("classify --features " + q(features) + " --method gaicda --seed 42 --out " +
                 q(partition)) == 0);
    CHECK(fileDigest(partition) == digest);

    // evaluation of one run: perfect metrics on this corpus
    auto report = tmp.path / "report.txt";
    CHECK(runCli("evaluate --partition " + q(partition) + " --truth " +
                 q(corpus / "manifest.csv") + " --out " + q(report)) == 0);
    auto text = readFile(report);
    CHECK(text.find("macro.precision: 1\n") != std::string::npos);
    CHECK(text.find("macro.recall: 1\n") != std::string::npos);
    CHECK(fs::exists(tmp.path / "report.txt.confusion.csv"));

    // multi-run EM produces per-run files, an aggregate and a params record
    auto runsDir = tmp.path / "runs";
    fs::create_directories(runsDir);
    CHECK(runCli("classify --features " + q(features) + " --method em --seed 1 --runs 5 --out " +
                 q(runsDir / "em.csv")) == 0);
    for (int i = 0; i < 5; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "em_run%03d.csv", i);
        CHECK(fs::exists(runsDir / name));
    }
    CHECK(fs::exists(runsDir / "em_runs.csv"));

    auto aggReport = tmp.path / "agg.txt";
    CHECK(runCli("evaluate --partitions-dir " + q(runsDir) + " --truth " +
                 q(corpus / "manifest.csv") + " --out " + q(aggReport)) == 0);
    auto aggText = readFile(aggReport);
    CHECK(aggText.find("runs: 5") != std::string::npos);
    CHECK(aggText.find(" (") != std::string::npos); // mean (std) shape

    // hierarchical method also runs
    CHECK(runCli("classify --features " + q(features) + " --method hierarchical --out " +
                 q(tmp.path / "hc.csv")) == 0);
    CHECK(runCli("classify --features " + q(features) + " --method nonsense --out " +
                 q(tmp.path / "x.csv")) == 2);
}

TEST_CASE("evaluate rejects partitions whose docIds lack truth") {
    TempDir tmp;
    Partition p;
    p.assignment = {{"mystery", 0}, {"other", 1}};
    p.k = 2;
    p.provenance.method = Method::EM;
    auto part = tmp.path / "p.csv";
    writeText(part, formatPartitionCsv(p));
    writeText(tmp.path / "truth.csv", "docId,script\nmystery,Latin\n");
    CHECK(runCli("evaluate --partition " + q(part) + " --truth " + q(tmp.path / "truth.csv") +
                 " --out " + q(tmp.path / "r.txt")) == 2);
}

TEST_CASE("flags beat environment beats config file") {
    TempDir tmp;
    std::string models = " --models " + q(kData / "models");

    auto reference = [&](std::uint64_t seed, const fs::path& dir) {
        REQUIRE(runCli("synth --out " + q(dir) + " --seed " + std::to_string(seed) + models) == 0);
        return fileDigest(dir / "manifest.csv");
    };
    auto ref5 = reference(5, tmp.path / "ref5");
    auto ref7 = reference(7, tmp.path / "ref7");
    auto ref9 = reference(9, tmp.path / "ref9");

    // environment applies when the flag is absent
    CHECK(runCli("synth --out " + q(tmp.path / "env") + models, "GLYPHRUN_SEED=5 ") == 0);
    CHECK(fileDigest(tmp.path / "env" / "manifest.csv") == ref5);

    // an explicit flag wins over the environment
    CHECK(runCli("synth --out " + q(tmp.path / "flag") + " --seed 7" + models,
                 "GLYPHRUN_SEED=5 ") == 0);
    CHECK(fileDigest(tmp.path / "flag" / "manifest.csv") == ref7);

    // config supplies defaults when neither flag nor environment is present
    writeText(tmp.path / "cfg.json", "{\"seed\": 9}");
    CHECK(runCli("synth --out " + q(tmp.path / "cfg") + " --config " + q(tmp.path / "cfg.json") +
                 models) == 0);
    CHECK(fileDigest(tmp.path / "cfg" / "manifest.csv") == ref9);

    // environment wins over config
    CHECK(runCli("synth --out " + q(tmp.path / "envcfg") + " --config " +
                 q(tmp.path / "cfg.json") + models, "GLYPHRUN_SEED=5 ") == 0);
    CHECK(fileDigest(tmp.path / "envcfg" / "manifest.csv") == ref5);

    // malformed config is a validation error
    writeText(tmp.path / "bad.json", "{nope");
    CHECK(runCli("synth --out " + q(tmp.path / "bad") + " --config " + q(tmp.path / "bad.json") +
                 models) == 2);
}

TEST_CASE("break-runs-at-space changes run statistics through the CLI") {
    TempDir tmp;
    auto corpus = tmp.path / "corpus";
    writeText(corpus / "test" / "latin" / "a.txt", "oo oo");
    writeText(corpus / "test" / "latin" / "b.txt", "nn nn");

    auto continuous = tmp.path / "cont.csv";
    auto broken = tmp.path / "broken.csv";
    CHECK(runCli("features --corpus " + q(corpus) + dataArgs() + "--out " + q(continuous)) == 0);
    CHECK(runCli("features --corpus " + q(corpus) + dataArgs() + "--break-runs-at-space --out " +
                 q(broken)) == 0);

    auto contCsv = parseFeatureCsv(readFile(continuous));
    auto brokenCsv = parseFeatureCsv(readFile(broken));
    CHECK(contCsv.features[0].lre == 16.0);  // one run of four
    CHECK(brokenCsv.features[0].lre == 4.0); // two runs of two
}

// End-to-end tests of the installed CLI binary via subprocesses.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

using nlohmann::json;

namespace {

const std::string kCli = GEOADAPT_CLI_PATH;
const std::string kDataDir = GEOADAPT_TEST_DATA_DIR;

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::path("/tmp") /
               ("geoadapt_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

int run(const std::string& args, const std::string& stdout_path = "") {
    std::string cmd = kCli + " " + args;
    if (!stdout_path.empty()) cmd += " > " + stdout_path;
    cmd += " 2> /dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("score subcommand succeeds and reruns byte-identically") {
    TempDir tmp;
    const std::string out = tmp.file("scored.jsonl");
    const std::string args =
        "score --in " + kDataDir + "/dataset_12.jsonl --out " + out;
    REQUIRE(run(args) == 0);
    const std::string first = slurp(out);
    CHECK_FALSE(first.empty());
    REQUIRE(run(args) == 0);
    CHECK(slurp(out) == first);
}

TEST_CASE("strict mode aborts on bad input, lenient logs and proceeds") {
    TempDir tmp;
    const std::string out = tmp.file("scored.jsonl");
    CHECK(run("score --in " + kDataDir + "/dataset_bad.jsonl --out " + out) !=
          0);
    const std::string summary_path = tmp.file("summary.out");
    REQUIRE(run("--lenient score --in " + kDataDir +
                    "/dataset_bad.jsonl --out " + out,
                summary_path) == 0);
    const auto summary = json::parse(slurp(summary_path));
    CHECK(summary["accepted"] == 2);
    CHECK(summary["rejected"].size() == 3);
}

TEST_CASE("config file, environment fallback and flag precedence") {
    TempDir tmp;
    const std::string conf = tmp.file("run.conf");
    {
        std::ofstream f(conf);
        f << "dataset_in = " << kDataDir << "/dataset_12.jsonl\n";
        f << "tau_margin = 1000\n";  // largest fixture gap is 600
    }
    const std::string out = tmp.file("out.jsonl");
    const std::string summary_path = tmp.file("summary.out");

    // config file: tau 500 makes every record Standard
    REQUIRE(run("--config " + conf + " stratify --standard-out " + out +
                    " --rag-superior-out " + tmp.file("rs.jsonl"),
                summary_path) == 0);
    auto summary = json::parse(slurp(summary_path));
    CHECK(summary["standard"] == 12);
    CHECK(summary["rag_superior"] == 0);

    // flag overrides the file value back to the default 50
    REQUIRE(run("--config " + conf + " --tau-margin 50 stratify "
                "--standard-out " +
                    out + " --rag-superior-out " + tmp.file("rs2.jsonl"),
                summary_path) == 0);
    summary = json::parse(slurp(summary_path));
    CHECK(summary["standard"] == 5);
    CHECK(summary["rag_superior"] == 7);

    // GEOADAPT_CONFIG is the fallback when --config is absent
    REQUIRE(setenv("GEOADAPT_CONFIG", conf.c_str(), 1) == 0);
    REQUIRE(run("stratify --standard-out " + out + " --rag-superior-out " +
                    tmp.file("rs3.jsonl"),
                summary_path) == 0);
    summary = json::parse(slurp(summary_path));
    CHECK(summary["standard"] == 12);
    REQUIRE(unsetenv("GEOADAPT_CONFIG") == 0);
}

TEST_CASE("--set overrides arbitrary keys") {
    TempDir tmp;
    const std::string summary_path = tmp.file("summary.out");
    REQUIRE(run("--set tau_margin=1000 stratify --in " + kDataDir +
                    "/dataset_12.jsonl --standard-out " + tmp.file("s.jsonl") +
                    " --rag-superior-out " + tmp.file("r.jsonl"),
                summary_path) == 0);
    const auto summary = json::parse(slurp(summary_path));
    CHECK(summary["standard"] == 12);

    CHECK(run("--set nonsense=1 stratify --in " + kDataDir +
              "/dataset_12.jsonl --standard-out " + tmp.file("s2.jsonl") +
              " --rag-superior-out " + tmp.file("r2.jsonl")) != 0);
}

TEST_CASE("eval prints the report and rejects unknown formats") {
    TempDir tmp;
    const std::string stdout_path = tmp.file("report.json");
    REQUIRE(run("eval --predictions " + kDataDir +
                    "/eval_4.jsonl --format json",
                stdout_path) == 0);
    const auto report = json::parse(slurp(stdout_path));
    CHECK(report["acc_1km"] == 25.0);
    CHECK(report["acc_2500km"] == 100.0);
    CHECK(report["city_name_acc"] == 50.0);
    CHECK(report["country_name_acc"] == 75.0);

    CHECK(run("eval --predictions " + kDataDir +
              "/eval_4.jsonl --format xml") != 0);
}

TEST_CASE("report re-emits a saved json report as a table") {
    TempDir tmp;
    const std::string report_json = tmp.file("report.json");
    REQUIRE(run("eval --predictions " + kDataDir +
                    "/eval_4.jsonl --format json --report-out " + report_json,
                tmp.file("ignored.out")) == 0);
    const std::string table_path = tmp.file("table.txt");
    REQUIRE(run("report --in " + report_json + " --format table",
                table_path) == 0);
    const std::string table = slurp(table_path);
    CHECK(table.find("Street") != std::string::npos);
    CHECK(table.find("Continent") != std::string::npos);
    CHECK(table.find("City Name Acc") != std::string::npos);
}

TEST_CASE("train-toy runs the curriculum deterministically") {
    TempDir tmp;
    const std::string trace = tmp.file("trace.jsonl");
    const std::string policy = tmp.file("policy.txt");
    const std::string args = "--seed 42 --set world_images=60 train-toy "
                             "--trace-out " +
                             trace + " --policy-out " + policy;
    REQUIRE(run(args) == 0);
    const std::string trace1 = slurp(trace);
    const std::string policy1 = slurp(policy);
    CHECK_FALSE(trace1.empty());
    CHECK(policy1.rfind("geoadapt-toy-policy v1", 0) == 0);
    REQUIRE(run(args) == 0);
    CHECK(slurp(trace) == trace1);
    CHECK(slurp(policy) == policy1);
}

TEST_CASE("curate emits plots when asked") {
    TempDir tmp;
    const std::string svg = tmp.file("hist.svg");
    REQUIRE(run("--plot curate --in " + kDataDir +
                "/dataset_12.jsonl --standard-out " + tmp.file("s.jsonl") +
                " --rag-superior-out " + tmp.file("r.jsonl") +
                " --plot-out " + svg) == 0);
    CHECK(slurp(svg).rfind("<svg", 0) == 0);
}

TEST_CASE("reward subcommand produces the breakdown file") {
    TempDir tmp;
    const std::string out = tmp.file("rewards.jsonl");
    const std::string summary_path = tmp.file("summary.out");
    REQUIRE(run("reward --dataset " + kDataDir +
                    "/reward_dataset.jsonl --predictions " + kDataDir +
                    "/reward_predictions.jsonl --grounding-table " + kDataDir +
                    "/grounding.tsv --alias-table " + kDataDir +
                    "/aliases.tsv --out " + out,
                summary_path) == 0);
    const auto summary = json::parse(slurp(summary_path));
    CHECK(summary["scored"] == 3);
    std::istringstream lines(slurp(out));
    std::string line;
    REQUIRE(std::getline(lines, line));
    const auto first = json::parse(line);
    CHECK(first["image_id"] == "p1");
    CHECK(first["r_geo"] == 1.0);
    CHECK(first["r_stage1"] == 0.725);
}

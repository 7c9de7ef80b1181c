#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cnm/checkpoint.hpp"
#include "cnm/evaluation.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int exit_code = -1;
    std::string output;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(CNM_BIN) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe) != nullptr) r.output += buf;
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("cnm_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string fixture(const char* name) { return std::string(CNM_FIXTURES) + "/" + name; }

const std::string kSmall = " --embedding-dim 6 --measurements 4 --windows 1,2 --dropout 0 ";

}  // namespace

TEST_CASE("missing paths exit with code 2 and name the path", "[cli]") {
    const auto out = scratch("missing");
    const auto r = run("train --dataset /definitely/not/here.tsv --out " + out.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("/definitely/not/here.tsv") != std::string::npos);

    const auto e = run("eval --dataset " + fixture("trec_like.tsv") + " --checkpoint /no/ckpt.txt --out " + out.string());
    CHECK(e.exit_code == 2);
    CHECK(e.output.find("/no/ckpt.txt") != std::string::npos);

    CHECK(run("train --no-such-flag").exit_code == 2);
    CHECK(run("").exit_code == 2);
}

TEST_CASE("data errors exit with code 3", "[cli]") {
    const auto out = scratch("bad_data");
    const auto r = run("train --dataset " + fixture("malformed.tsv") + " --out " + out.string());
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("3") != std::string::npos);
    CHECK(run("train --dataset " + fixture("all_negative.tsv") + " --out " + out.string()).exit_code == 3);
}

TEST_CASE("train writes a checkpoint and one log record per epoch", "[cli]") {
    const auto data = scratch("data");
    REQUIRE(run("synth --questions 20 --dev-questions 10 --seed 2 --out " + data.string()).exit_code == 0);
    const auto train_path = (data / "train.tsv").string();
    const auto dev_path = (data / "dev.tsv").string();

    const auto a = scratch("train_a");
    const auto ra = run("train --dataset " + train_path + " --dev " + dev_path + " --epochs 3 --seed 5" + kSmall +
                        "--out " + a.string());
    INFO(ra.output);
    REQUIRE(ra.exit_code == 0);
    REQUIRE(fs::exists(a / "checkpoint.txt"));
    std::ifstream log(a / "train_log.jsonl");
    std::string line;
    int records = 0;
    while (std::getline(log, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["epoch"] == records + 1);
        CHECK(j["dev_map"].is_number());
        ++records;
    }
    CHECK(records == 3);

    // Same seed, byte-identical checkpoint; another seed differs.
    const auto b = scratch("train_b");
    REQUIRE(run("train --dataset " + train_path + " --dev " + dev_path + " --epochs 3 --seed 5" + kSmall + "--out " +
                b.string())
                .exit_code == 0);
    CHECK(slurp(a / "checkpoint.txt") == slurp(b / "checkpoint.txt"));
    const auto c = scratch("train_c");
    REQUIRE(run("train --dataset " + train_path + " --dev " + dev_path + " --epochs 3 --seed 6" + kSmall + "--out " +
                c.string())
                .exit_code == 0);
    CHECK(slurp(a / "checkpoint.txt") != slurp(c / "checkpoint.txt"));

    // eval: report parses back to the same numbers as an in-process evaluation.
    const auto e = scratch("eval");
    const auto re = run("eval --dataset " + dev_path + " --checkpoint " + (a / "checkpoint.txt").string() + " --out " +
                        e.string());
    INFO(re.output);
    REQUIRE(re.exit_code == 0);
    std::ifstream report_in(e / "report.jsonl");
    const auto report = cnm::read_report_jsonl(report_in);
    const auto ckpt = cnm::load_checkpoint(a / "checkpoint.txt");
    const auto dev = cnm::load_tsv(dev_path, cnm::FormatDescriptor::canonical(), "dev");
    const auto direct = cnm::evaluate(ckpt.params, ckpt.model, cnm::encode(dev, ckpt.vocab, ckpt.model.max_length));
    CHECK(report.map == direct.map);
    CHECK(report.mrr == direct.mrr);
    CHECK(report.per_question.size() == dev.questions.size());
    CHECK(fs::exists(e / "report.tsv"));

    // Inspection commands.
    const auto i = scratch("inspect");
    const std::string ck = " --checkpoint " + (a / "checkpoint.txt").string() + " --out " + i.string();
    REQUIRE(run("inspect-words --top-n 5" + ck).exit_code == 0);
    CHECK(std::count(std::istreambuf_iterator<char>(*std::make_unique<std::ifstream>(i / "words.tsv")), {}, '\n') == 6);
    REQUIRE(run("inspect-measurements --top-n 3" + ck).exit_code == 0);
    CHECK(fs::exists(i / "measurements.tsv"));
    const auto im = run("inspect-match --question \"what is t1w2\" --answer \"t1w2 is here\"" + ck);
    INFO(im.output);
    REQUIRE(im.exit_code == 0);
    CHECK(fs::exists(i / "match.tsv"));
    CHECK(run("inspect-match --question \"?!\" --answer x" + ck).exit_code != 0);
}

TEST_CASE("config files provide defaults that flags override", "[cli]") {
    const auto data = scratch("cfg_data");
    REQUIRE(run("synth --questions 10 --dev-questions 5 --seed 3 --out " + data.string()).exit_code == 0);
    const auto cfg = scratch("cfg") ;
    fs::create_directories(cfg);
    {
        std::ofstream f(cfg / "run.ini");
        f << "[train]\nepochs = 4\nembedding-dim = 6\nmeasurements = 4\nwindows = 1,2\ndropout = 0\n";
    }
    const auto out1 = cfg / "a";
    REQUIRE(run("--config " + (cfg / "run.ini").string() + " train --dataset " + (data / "train.tsv").string() +
                " --out " + out1.string())
                .exit_code == 0);
    const auto ckpt = cnm::load_checkpoint(out1 / "checkpoint.txt");
    CHECK(ckpt.model.embedding_dim == 6);
    std::ifstream log(out1 / "train_log.jsonl");
    CHECK(std::count(std::istreambuf_iterator<char>(log), {}, '\n') == 4);

    const auto out2 = cfg / "b";
    REQUIRE(run("--config " + (cfg / "run.ini").string() + " train --epochs 2 --dataset " +
                (data / "train.tsv").string() + " --out " + out2.string())
                .exit_code == 0);
    std::ifstream log2(out2 / "train_log.jsonl");
    CHECK(std::count(std::istreambuf_iterator<char>(log2), {}, '\n') == 2);
}

TEST_CASE("dataset format descriptors are honoured", "[cli]") {
    const auto out = scratch("format");
    const auto r = run("train --dataset " + fixture("wikiqa_like.tsv") + " --format " + fixture("wikiqa.format") +
                       " --epochs 1" + kSmall + "--out " + out.string());
    INFO(r.output);
    CHECK(r.exit_code == 0);
}

TEST_CASE("audit writes the comparison table", "[cli]") {
    const auto out = scratch("audit");
    const auto r = run("audit --trials 200 --dims 2,3 --seed 4 --out " + out.string());
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    const auto table = slurp(out / "audit.tsv");
    CHECK(table.rfind("metric\tnon-negativity\tidentity\tsymmetry\ttriangle inequality", 0) == 0);
    CHECK(table.find("trace inner product\t-\t-\t+\t-") != std::string::npos);
    CHECK(table.find("VN divergence\t+\t+\t-\t") != std::string::npos);
    CHECK(fs::exists(out / "counterexamples.tsv"));
    CHECK(slurp(out / "audit.tsv") == r.output);
}

TEST_CASE("grid search over a small pool", "[cli]") {
    const auto data = scratch("grid_data");
    REQUIRE(run("synth --questions 12 --dev-questions 6 --seed 4 --out " + data.string()).exit_code == 0);
    const auto out = scratch("grid");
    const auto r = run("grid --dataset " + (data / "train.tsv").string() + " --dev " + (data / "dev.tsv").string() +
                       " --lr-pool 0.01,0.1 --l2-pool 1e-6 --batch-pool 8 --k-pool 4 --epochs 1" +
                       " --embedding-dim 6 --windows 1 --dropout 0 --out " + out.string());
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    const auto table = slurp(out / "grid.tsv");
    CHECK(std::count(table.begin(), table.end(), '\n') == 3);
    CHECK(std::count(table.begin(), table.end(), '*') == 1);
}

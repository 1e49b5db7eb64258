#include "fsols/corpus.hpp"
#include "fsols/eval.hpp"

#include "support/scratch.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run cli(const std::string& args) {
    const std::string cmd = std::string(FSOLS_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

const std::filesystem::path kFixtures = FSOLS_FIXTURES;

}  // namespace

TEST(Cli, UsageErrors) {
    auto r = cli("--no-such-flag");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("Usage"), std::string::npos) << r.out;
    EXPECT_EQ(cli("").code, 1);
    EXPECT_EQ(cli("train --bogus 3").code, 1);
    EXPECT_EQ(cli("--model xgboost synth --out /tmp/x.jsonl").code, 1);
    EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, DataErrorExitsTwo) {
    Scratch dir;
    spit(dir / "bad.jsonl", "{\"fsols_manifest\":\"1\",\"seed\":0}\n{\"id\":\"a\",\"label\":7}\n");
    const auto r = cli("featurize --in " + q(dir / "bad.jsonl") + " --out " + q(dir / "v.json"));
    EXPECT_EQ(r.code, 2) << r.out;
    EXPECT_NE(r.out.find("label"), std::string::npos) << r.out;
    spit(dir / "model.json", "{\"fsols_model\": 1}");
    const std::string out = " --out " + q(dir / "r.json");
    EXPECT_EQ(cli("evaluate --artifact " + q(dir / "model.json") + " --manifest " + q(dir / "bad.jsonl") + out).code, 2);
    // A missing input file is caught by argument validation.
    EXPECT_EQ(cli("evaluate --artifact " + q(dir / "missing.json") + " --manifest " + q(dir / "bad.jsonl") + out).code, 1);
}

TEST(Cli, ConfigFileRejectsUnknownKeys) {
    Scratch dir;
    spit(dir / "cfg.json", R"({"seed": 3, "colour": "blue"})");
    const auto r = cli("--config " + q(dir / "cfg.json") + " synth --out " + q(dir / "m.jsonl") + " --per-cell 1");
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.out.find("colour"), std::string::npos) << r.out;
    spit(dir / "ok.json", R"({"seed": 3, "model": "logreg"})");
    EXPECT_EQ(cli("--config " + q(dir / "ok.json") + " synth --out " + q(dir / "m.jsonl") + " --per-cell 1").code, 0);
}

TEST(Cli, ServiceErrorExitsThree) {
    Scratch dir;
    spit(dir / "pmids.txt", "55555\n");
    unsetenv("NCBI_API_KEY");
    const auto r = cli("--fixtures " + q(kFixtures / "biblio") + " enrich --pmids " + q(dir / "pmids.txt") + " --out " +
                       q(dir / "c.jsonl"));
    EXPECT_EQ(r.code, 3) << r.out;
}

TEST(Cli, EnrichFromFixtures) {
    Scratch dir;
    unsetenv("NCBI_API_KEY");
    const auto r = cli("--fixtures " + q(kFixtures / "biblio") + " enrich --pmids " + q(kFixtures / "biblio" / "pmids.txt") +
                       " --out " + q(dir / "c.jsonl") + " --fetched-at 2024-01-01 --top-decile");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto lines = slurp(dir / "c.jsonl");
    EXPECT_NE(lines.find("10.1000/demo.1"), std::string::npos);
}

TEST(Cli, IngestCleanPipeline) {
    Scratch dir;
    const auto ingest = cli("ingest --registry " + q(std::filesystem::path(FSOLS_DATA) / "sources.json") +
                            " --source intl-journal-homoeopathic-sciences --input " + q(kFixtures / "local" / "pmc") +
                            " --out " + q(dir / "raw.jsonl") + " --retrieved-at 2024-01-01");
    ASSERT_EQ(ingest.code, 0) << ingest.out;
    const auto raw = fsols::load_manifest(dir / "raw.jsonl");
    ASSERT_EQ(raw.documents.size(), 3u);
    EXPECT_EQ(raw.documents[0].label, fsols::ClassLabel::AlternativeScientific);
    // Ingestion is byte-for-byte reproducible.
    ASSERT_EQ(cli("ingest --registry " + q(std::filesystem::path(FSOLS_DATA) / "sources.json") +
                  " --source intl-journal-homoeopathic-sciences --input " + q(kFixtures / "local" / "pmc") + " --out " +
                  q(dir / "raw2.jsonl") + " --retrieved-at 2024-01-01")
                  .code,
              0);
    EXPECT_EQ(slurp(dir / "raw.jsonl"), slurp(dir / "raw2.jsonl"));

    const auto clean = cli("clean --in " + q(dir / "raw.jsonl") + " --out " + q(dir / "clean.jsonl"));
    ASSERT_EQ(clean.code, 0) << clean.out;
    for (const auto& d : fsols::load_manifest(dir / "clean.jsonl").documents) EXPECT_TRUE(d.clean_text.has_value());
}

TEST(Cli, FetcherIngestUsesFixtures) {
    Scratch dir;
    const auto src = kFixtures / "fetchers" / "webmd";
    const auto r = cli("--fixtures " + q(src) + " ingest --registry " + q(std::filesystem::path(FSOLS_DATA) / "sources.json") +
                       " --source webmd --input " + q(src / "urls.txt") + " --out " + q(dir / "w.jsonl"));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(fsols::load_manifest(dir / "w.jsonl").documents.size(), 2u);
}

TEST(Cli, TrainEvaluateClassifyExplain) {
    Scratch dir;
    ASSERT_EQ(cli("--seed 5 synth --out " + q(dir / "m.jsonl") + " --per-cell 8").code, 0);
    const auto train = cli("--seed 5 --model svc train --in " + q(dir / "m.jsonl") + " --out " + q(dir / "model.json") +
                           " --ratio 0.75 --calibration-folds 3");
    ASSERT_EQ(train.code, 0) << train.out;

    const auto eval = cli("evaluate --artifact " + q(dir / "model.json") + " --manifest " + q(dir / "m.jsonl") + " --out " +
                          q(dir / "metrics.json") + " --markdown " + q(dir / "metrics.md"));
    ASSERT_EQ(eval.code, 0) << eval.out;
    const auto report = fsols::metrics_from_json(slurp(dir / "metrics.json"));
    EXPECT_GT(report.n, 0);
    EXPECT_GT(report.weighted_f1, 0.5);
    EXPECT_NE(slurp(dir / "metrics.md").find("weighted"), std::string::npos);

    // A scientific-style document: sentences built from the scientific markers.
    const auto m = fsols::load_manifest(dir / "m.jsonl");
    std::string sci;
    for (const auto& d : m.documents)
        if (d.label == fsols::ClassLabel::Scientific) sci += d.text() + "\n";
    spit(dir / "sci.txt", sci);
    const auto cls = cli("--threshold 0.5 classify --artifact " + q(dir / "model.json") + " " + q(dir / "sci.txt"));
    ASSERT_EQ(cls.code, 0) << cls.out;
    const auto j = nlohmann::json::parse(cls.out.substr(0, cls.out.find('\n')));
    EXPECT_EQ(j["argmax"], "scientific");
    EXPECT_EQ(j["scores"].size(), 4u);
    for (const auto& [name, v] : j["scores"].items()) {
        EXPECT_GE(v.get<double>(), 0.0);
        EXPECT_LE(v.get<double>(), 1.0);
    }

    const auto explain = cli("explain --artifact " + q(dir / "model.json") + " --k 5 --out " + q(dir / "explain.json"));
    ASSERT_EQ(explain.code, 0) << explain.out;
    EXPECT_TRUE(nlohmann::json::accept(slurp(dir / "explain.json")));

    // Same inputs and seed, same artifact.
    ASSERT_EQ(cli("--seed 5 --model svc train --in " + q(dir / "m.jsonl") + " --out " + q(dir / "model2.json") +
                  " --ratio 0.75 --calibration-folds 3")
                  .code,
              0);
    EXPECT_EQ(slurp(dir / "model.json"), slurp(dir / "model2.json"));
}

TEST(Cli, ForestExplainAndFeaturize) {
    Scratch dir;
    ASSERT_EQ(cli("synth --out " + q(dir / "m.jsonl") + " --per-cell 5").code, 0);
    const auto train = cli("--model rf train --in " + q(dir / "m.jsonl") + " --out " + q(dir / "rf.json") +
                           " --n-trees 10 --no-calibrate");
    ASSERT_EQ(train.code, 0) << train.out;
    const auto explain = cli("explain --artifact " + q(dir / "rf.json") + " --k 3 --out " + q(dir / "e.json") +
                             " --markdown " + q(dir / "e.md"));
    ASSERT_EQ(explain.code, 0) << explain.out;
    EXPECT_NE(slurp(dir / "e.md").find("| rank | term | count | direction |"), std::string::npos);

    const auto feat = cli("featurize --in " + q(dir / "m.jsonl") + " --out " + q(dir / "v.json") + " --characterize 5 --markdown " +
                          q(dir / "c.md"));
    ASSERT_EQ(feat.code, 0) << feat.out;
    EXPECT_NE(slurp(dir / "c.md").find("## vernacular"), std::string::npos);
}

TEST(Cli, BalanceAndCluster) {
    Scratch dir;
    ASSERT_EQ(cli("synth --out " + q(dir / "m.jsonl") + " --per-cell 3").code, 0);
    const auto bal = cli("--seed 2 balance --in " + q(dir / "m.jsonl") + " --out " + q(dir / "b.jsonl"));
    ASSERT_EQ(bal.code, 0) << bal.out;
    EXPECT_EQ(fsols::load_manifest(dir / "b.jsonl").documents.size(), 120u);

    std::string emb;
    for (int i = 0; i < 40; ++i) {
        const int c = i % 4;
        emb += "{\"id\":\"d" + std::to_string(i) + "\",\"vector\":[" + (c == 0 ? "1" : "0") + "," + (c == 1 ? "1" : "0") +
               "," + (c == 2 ? "1" : "0") + "," + (c == 3 ? "1" : "0") + "]}\n";
    }
    spit(dir / "e.jsonl", emb);
    const auto r = cli("cluster --embeddings " + q(dir / "e.jsonl") + " --k 4 --out " + q(dir / "c.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(nlohmann::json::accept(slurp(dir / "c.json")));
    EXPECT_NE(cli("cluster --embeddings " + q(dir / "e.jsonl") + " --k 50 --out " + q(dir / "c.json")).code, 0);
}

#include "strad/cli.hpp"
#include "strad/config.hpp"
#include "strad/timeseries.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <sstream>

using namespace strad;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path small_config(const fs::path& dir) {
    const auto doc = nlohmann::json::parse(R"({
      "datasets": [{"name": "toy", "synth": {
          "generator": {"length": 600, "noise_sigma": 0.1, "channels": [{"frequency": 0.05}]},
          "anomalies": [{"kind": "shapelet_pattern", "start": 40, "length": 30, "magnitude": 1.0},
                        {"kind": "global_point", "start": 200, "length": 1, "magnitude": 6.0}]}}],
      "window": 16,
      "hidden_layers": [8, 4, 8],
      "train": {"epochs": 3}
    })");
    return test::write_text(dir / "cfg.json", doc.dump(2));
}

std::string first_line(const fs::path& p) {
    const auto text = test::read_text(p);
    return text.substr(0, text.find('\n'));
}

} // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(cli({}).code == exit_usage);
    CHECK(cli({"bogus"}).code == exit_usage);
    CHECK(cli({"train"}).code == exit_usage);
    CHECK(cli({"train", "--config", "/nonexistent/cfg.json"}).code == exit_usage);
    CHECK(cli({"gradcheck", "--perturb", "nothing"}).code == exit_usage);
    CHECK(cli({"--help"}).code == exit_ok);
}

TEST_CASE("synth, train, detect and eval chain together") {
    const auto dir = test::scratch_dir("cli_chain");
    const auto cfg = small_config(dir);
    const auto out = (dir / "out").string();

    REQUIRE(cli({"synth", "--config", cfg.string(), "--out", out}).code == exit_ok);
    CHECK(fs::exists(dir / "out" / "toy_train.csv"));
    CHECK(fs::exists(dir / "out" / "toy_test.csv"));
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    const auto parsed = load_config(cfg);
    CHECK(first_line(dir / "out" / "toy_test.csv") ==
          "# strad synth config_hash=" + hex64(config_hash(parsed)) + " seed=0");

    // re-running from the manifest reproduces the CSVs byte for byte
    const auto again = (dir / "again").string();
    REQUIRE(cli({"synth", "--config", (dir / "out" / "manifest.json").string(), "--out", again}).code == exit_ok);
    CHECK(test::read_text(dir / "again" / "toy_test.csv") == test::read_text(dir / "out" / "toy_test.csv"));
    CHECK(test::read_text(dir / "again" / "toy_train.csv") == test::read_text(dir / "out" / "toy_train.csv"));

    REQUIRE(cli({"train", "--config", cfg.string(), "--out", out}).code == exit_ok);
    const auto history = test::read_text(dir / "out" / "toy_history.csv");
    CHECK(history.find("epoch,total,trend,seasonality,shape\n") != std::string::npos);
    CHECK(std::count(history.begin(), history.end(), '\n') == 2 + 3);

    REQUIRE(cli({"detect", "--config", cfg.string(), "--out", out}).code == exit_ok);
    const auto scores = load_csv(dir / "out" / "toy_scores.csv", {"score"});
    CHECK(scores.length() == 300);

    // predicted segments are re-derivable from scores and the stated threshold
    const auto seg_text = test::read_text(dir / "out" / "toy_segments.csv");
    const auto tpos = seg_text.find("# threshold=");
    REQUIRE(tpos != std::string::npos);
    const double threshold = std::stod(seg_text.substr(tpos + 12));
    Labels preds(300);
    for (Index i = 0; i < 300; ++i) preds[static_cast<std::size_t>(i)] = scores.values(i, 0) >= threshold;
    std::string expected;
    for (const auto& s : segments_from_labels(preds)) {
        expected += std::to_string(s.start) + "," + std::to_string(s.end) + "\n";
    }
    CHECK(seg_text.substr(seg_text.find("start,end\n") + 10) == expected);

    const auto eval = cli({"eval", "--scores", (dir / "out" / "toy_scores.csv").string(), "--labels",
                           (dir / "out" / "toy_test.csv").string(), "--out", out});
    REQUIRE(eval.code == exit_ok);
    CHECK(eval.out.find("entire") != std::string::npos);
    const auto report = test::read_text(dir / "out" / "eval_report.csv");
    CHECK(report.find("dataset,segments,rpa_f1,pa_f1\n") != std::string::npos);
    CHECK(report.find("\ntoy,2,") != std::string::npos);

    CHECK(cli({"eval", "--scores", (dir / "out" / "toy_scores.csv").string(), "--labels",
               (dir / "out" / "toy_train.csv").string(), "--out", out})
              .code == exit_runtime);
}

TEST_CASE("quantile detection never reads test labels") {
    const auto dir = test::scratch_dir("cli_quantile");
    const auto cfg = small_config(dir);
    const auto out = (dir / "out").string();
    REQUIRE(cli({"train", "--config", cfg.string(), "--out", out}).code == exit_ok);

    // same test values under two different label vectors: outputs must not differ
    REQUIRE(cli({"synth", "--config", cfg.string(), "--out", out}).code == exit_ok);
    auto test_series = load_csv(dir / "out" / "toy_test.csv", {"value"}, std::string("label"));
    const Labels real = *test_series.labels;
    auto doc = nlohmann::json::parse(test::read_text(cfg));
    doc["datasets"][0] = {{"name", "toy"}, {"csv", {{"train", "out/toy_train.csv"}, {"test", "relabeled.csv"}}}};
    doc["threshold"] = {{"mode", "quantile"}, {"quantile", 0.95}};
    test::write_text(dir / "q.json", doc.dump());

    test_series.labels = Labels(real.size(), 0);
    write_csv(test_series, dir / "relabeled.csv", {"value"});
    const auto zeros = cli({"detect", "--config", (dir / "q.json").string(), "--out", (dir / "qa").string(),
                            "--checkpoint", (dir / "out" / "toy.ckpt").string()});
    REQUIRE(zeros.code == exit_ok);

    test_series.labels = real;
    write_csv(test_series, dir / "relabeled.csv", {"value"});
    REQUIRE(cli({"detect", "--config", (dir / "q.json").string(), "--out", (dir / "qb").string(), "--checkpoint",
                 (dir / "out" / "toy.ckpt").string()})
                .code == exit_ok);
    CHECK(test::read_text(dir / "qa" / "toy_segments.csv") == test::read_text(dir / "qb" / "toy_segments.csv"));
    CHECK(test::read_text(dir / "qa" / "toy_scores.csv") == test::read_text(dir / "qb" / "toy_scores.csv"));
}

TEST_CASE("detect rejects an incompatible checkpoint") {
    const auto dir = test::scratch_dir("cli_ckpt");
    const auto cfg = small_config(dir);
    REQUIRE(cli({"train", "--config", cfg.string(), "--out", (dir / "a").string()}).code == exit_ok);
    const auto r = cli({"detect", "--config", cfg.string(), "--set", "window=20", "--checkpoint",
                        (dir / "a" / "toy.ckpt").string(), "--out", (dir / "b").string()});
    CHECK(r.code == exit_runtime);
    CHECK(r.err.find("checkpoint") != std::string::npos);
}

TEST_CASE("compare and ablate table shapes") {
    const auto dir = test::scratch_dir("cli_compare");
    const auto cfg = small_config(dir);
    const auto c = cli({"compare", "--config", cfg.string(), "--out", (dir / "c").string()});
    REQUIRE(c.code == exit_ok);
    const auto table = test::read_text(dir / "c" / "compare.csv");
    CHECK(std::count(table.begin(), table.end(), '\n') == 2 + 2);

    CHECK(cli({"compare", "--config", cfg.string(), "--set", R"(compare_losses=["strad","mse_plus_strad"])", "--out",
               (dir / "d").string()})
              .code == exit_usage);

    const auto a = cli({"ablate", "--config", cfg.string(), "--out", (dir / "a").string()});
    REQUIRE(a.code == exit_ok);
    const auto abl = test::read_text(dir / "a" / "ablation.csv");
    CHECK(std::count(abl.begin(), abl.end(), '\n') == 2 + 7);
    CHECK(abl.find("trend,seasonality,shape,entire_rpa_f1,entire_pa_f1,toy_rpa_f1,toy_pa_f1\n") != std::string::npos);
}

TEST_CASE("gradcheck exit codes") {
    const auto dir = test::scratch_dir("cli_gradcheck");
    const auto ok = cli({"gradcheck", "--windows", "10", "--models", "2", "--out", dir.string()});
    CHECK(ok.code == exit_ok);
    CHECK(fs::exists(dir / "gradcheck.txt"));
    const auto bad = cli({"gradcheck", "--windows", "10", "--models", "2", "--perturb", "shape"});
    CHECK(bad.code == exit_gradcheck);
    CHECK(bad.out.find("shape") != std::string::npos);
}

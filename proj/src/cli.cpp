#include "strad/cli.hpp"

#include "strad/errors.hpp"
#include "strad/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace strad {

namespace {

struct ConfigArgs {
    std::string config;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> jobs;

    void attach(CLI::App* app, bool with_jobs) {
        app->add_option("--config", config, "experiment config (JSON)")->required();
        app->add_option("--set", overrides, "override a config value, e.g. --set train.epochs=5")
            ->take_all()
            ->allow_extra_args(false);
        app->add_option("--seed", seed, "experiment seed");
        app->add_option("--out", out, "output directory");
        if (with_jobs) app->add_option("--jobs", jobs, "parallel training jobs")->check(CLI::PositiveNumber);
    }

    ExperimentConfig load() const {
        auto all = overrides;
        if (seed) all.push_back("seed=" + std::to_string(*seed));
        if (jobs) all.push_back("jobs=" + std::to_string(*jobs));
        auto cfg = load_config(config, all);
        if (out) cfg.output_dir = *out;
        return cfg;
    }
};

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"strad: structural-loss autoencoder anomaly detection"};
    app.require_subcommand(1);

    ConfigArgs synth_args, train_args, detect_args, compare_args, ablate_args;
    auto* synth = app.add_subcommand("synth", "generate synthetic benchmark CSVs");
    synth_args.attach(synth, false);

    auto* train = app.add_subcommand("train", "train one autoencoder per dataset");
    train_args.attach(train, false);

    auto* detect = app.add_subcommand("detect", "score test series and emit anomaly segments");
    detect_args.attach(detect, false);
    std::optional<std::string> checkpoint;
    detect->add_option("--checkpoint", checkpoint, "checkpoint to use (single-dataset configs)");

    auto* eval = app.add_subcommand("eval", "score F1 metrics from score and label files");
    EvalOptions eval_opts;
    std::vector<std::string> score_files, label_files;
    std::string metric = "both", rpa_fp = "per_run", eval_out = "out";
    std::optional<double> threshold;
    eval->add_option("--scores", score_files, "score CSVs (index,score)")->required();
    eval->add_option("--labels", label_files, "label CSVs, one per score file")->required();
    eval->add_option("--label-column", eval_opts.label_column, "label column name");
    eval->add_option("--metric", metric, "rpa, pa or both");
    eval->add_option("--threshold", threshold, "fixed threshold instead of best-F1 search");
    eval->add_option("--rpa-fp", rpa_fp, "RPA false positives: per_run or per_point");
    eval->add_option("--out", eval_out, "output directory");

    auto* compare = app.add_subcommand("compare", "train every configured loss and compare F1");
    compare_args.attach(compare, true);

    auto* ablate = app.add_subcommand("ablate", "train every non-empty subset of loss terms");
    ablate_args.attach(ablate, true);

    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every analytic gradient");
    GradcheckOptions gc;
    std::optional<std::string> perturb, gc_out;
    gradcheck->add_option("--seed", gc.seed, "random seed");
    gradcheck->add_option("--windows", gc.windows, "random windows per loss component")->check(CLI::PositiveNumber);
    gradcheck->add_option("--models", gc.models, "random models per end-to-end check")->check(CLI::PositiveNumber);
    gradcheck->add_option("--perturb", perturb, "corrupt one component's gradient (self-test)");
    gradcheck->add_option("--out", gc_out, "directory for gradcheck.txt");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (*synth) {
            const auto r = cmd_synth(synth_args.load());
            for (const auto& f : r.csv_files) out << "wrote " << f.string() << '\n';
            out << "wrote " << r.manifest.string() << '\n';
        } else if (*train) {
            const auto r = cmd_train(train_args.load());
            for (const auto& f : r.checkpoints) out << "wrote " << f.string() << '\n';
        } else if (*detect) {
            const auto cfg = detect_args.load();
            std::optional<std::filesystem::path> ckpt;
            if (checkpoint) ckpt = *checkpoint;
            const auto r = cmd_detect(cfg, ckpt);
            for (std::size_t i = 0; i < r.score_files.size(); ++i) {
                out << cfg.datasets[i].name << ": threshold " << format_number(r.thresholds[i]) << ", wrote "
                    << r.segment_files[i].string() << '\n';
            }
        } else if (*eval) {
            for (const auto& s : score_files) eval_opts.score_files.emplace_back(s);
            for (const auto& s : label_files) eval_opts.label_files.emplace_back(s);
            eval_opts.metric = parse_metric_selection(metric);
            eval_opts.rpa_false_positives = parse_rpa_false_positives(rpa_fp);
            eval_opts.threshold = threshold;
            eval_opts.output_dir = eval_out;
            const auto r = cmd_eval(eval_opts);
            std::ifstream txt(r.text_file);
            out << txt.rdbuf();
        } else if (*compare) {
            const auto r = cmd_compare(compare_args.load());
            std::ifstream txt(r.table_file.parent_path() / "compare.txt");
            out << txt.rdbuf();
            for (const auto& w : r.warnings) err << "warning: " << w << '\n';
        } else if (*ablate) {
            const auto r = cmd_ablate(ablate_args.load());
            std::ifstream txt(r.table_file.parent_path() / "ablation.txt");
            out << txt.rdbuf();
        } else if (*gradcheck) {
            if (perturb) {
                gc.perturb = parse_grad_component(*perturb);
                if (!gc.perturb) throw ConfigError("unknown gradient component: " + *perturb);
            }
            std::optional<std::filesystem::path> dir;
            if (gc_out) dir = *gc_out;
            const auto r = cmd_gradcheck(gc, dir);
            out << r.report.to_text();
            return r.report.passed() ? exit_ok : exit_gradcheck;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_ok;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace strad

#include "strad/experiment.hpp"

#include "strad/errors.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace strad {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFileError(path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fixed4(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << v;
    return out.str();
}

// "<name>_scores" -> "<name>"
std::string dataset_name_from(const fs::path& scores) {
    std::string stem = scores.stem().string();
    const std::string suffix = "_scores";
    if (stem.size() > suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
        stem.erase(stem.size() - suffix.size());
    }
    return stem;
}

std::vector<std::string> eval_header(MetricSelection metric) {
    std::vector<std::string> h{"dataset", "segments"};
    if (metric != MetricSelection::pa) h.push_back("rpa_f1");
    if (metric != MetricSelection::rpa) h.push_back("pa_f1");
    return h;
}

std::vector<std::vector<std::string>> eval_rows(const EvalReport& report,
                                                MetricSelection metric,
                                                const std::function<std::string(double)>& fmt) {
    std::vector<std::vector<std::string>> rows;
    std::int64_t total = 0;
    for (const auto& d : report.datasets) {
        std::vector<std::string> row{d.name, std::to_string(d.segments)};
        if (metric != MetricSelection::pa) row.push_back(fmt(d.rpa_f1));
        if (metric != MetricSelection::rpa) row.push_back(fmt(d.pa_f1));
        rows.push_back(row);
        total += d.segments;
    }
    std::vector<std::string> entire{"entire", std::to_string(total)};
    if (metric != MetricSelection::pa) entire.push_back(fmt(report.entire_rpa_f1));
    if (metric != MetricSelection::rpa) entire.push_back(fmt(report.entire_pa_f1));
    rows.push_back(entire);
    return rows;
}

void write_csv_table(const fs::path& path,
                     const std::string& comment,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    auto out = open_output(path);
    out << comment << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

std::vector<PreparedData> prepare_all(const ExperimentConfig& cfg) {
    std::vector<PreparedData> out;
    out.reserve(cfg.datasets.size());
    for (const auto& d : cfg.datasets) out.push_back(prepare(d));
    return out;
}

void require_window_fits(const ExperimentConfig& cfg, const PreparedData& data) {
    if (cfg.window > data.train.length() || cfg.window > data.test.length()) {
        throw InvalidArgumentError("window " + std::to_string(cfg.window) + " is longer than a split of dataset '" +
                                   data.name + "'");
    }
}

Labels require_labels(const TimeSeries& series, const std::string& name) {
    if (!series.labels) throw InvalidArgumentError("dataset '" + name + "' has no test labels");
    return *series.labels;
}

} // namespace

std::vector<std::string> channel_names(Index channels) {
    if (channels == 1) return {"value"};
    std::vector<std::string> names;
    for (Index c = 0; c < channels; ++c) names.push_back("value" + std::to_string(c));
    return names;
}

std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string provenance(const std::string& command, std::uint64_t hash, std::uint64_t seed) {
    return "# strad " + command + " config_hash=" + hex64(hash) + " seed=" + std::to_string(seed);
}

std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths(header.size(), 0);
    for (std::size_t i = 0; i < header.size(); ++i) widths[i] = header[i].size();
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(widths[i])) << cells[i];
        }
        out << '\n';
    };
    line(header);
    std::size_t total = 0;
    for (auto w : widths) total += w;
    out << std::string(total + 2 * (widths.empty() ? 0 : widths.size() - 1), '-') << '\n';
    for (const auto& row : rows) line(row);
    return out.str();
}

void run_parallel(int jobs, std::size_t count, const std::function<void(std::size_t)>& job) {
    std::vector<std::exception_ptr> errors(count);
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

Benchmark generate_synth(const SynthSource& src) {
    return make_benchmark(src.generator, src.anomalies, src.train_fraction);
}

PreparedData prepare(const DatasetConfig& dataset) {
    PreparedData data;
    data.name = dataset.name;
    TimeSeries train;
    TimeSeries test;
    if (dataset.csv) {
        data.value_columns = dataset.csv->value_columns;
        train = load_csv(dataset.csv->train, dataset.csv->value_columns);
        test = load_csv(dataset.csv->test, dataset.csv->value_columns, dataset.csv->label_column);
    } else {
        auto bench = generate_synth(*dataset.synth);
        train = std::move(bench.train);
        test = std::move(bench.test);
        data.value_columns = channel_names(train.channels());
    }
    if (train.channels() != test.channels()) throw ShapeMismatchError("train and test channel counts differ");
    data.stats = fit_normalization(train);
    data.train = apply_normalization(train, data.stats);
    data.test = apply_normalization(test, data.stats);
    data.train.name = dataset.name + "_train";
    data.test.name = dataset.name + "_test";
    return data;
}

TrainResult train_model(const ExperimentConfig& cfg, const PreparedData& data, LossKind loss, const LossWeights& train_weights) {
    require_window_fits(cfg, data);
    const auto windows = sliding_windows(data.train, cfg.window, cfg.effective_train_stride());
    auto model = init_model<double>(cfg.layer_sizes(data.train.channels()), cfg.seed);
    TrainConfig tc = cfg.train;
    tc.loss = loss;
    tc.weights = train_weights;
    tc.seed = cfg.seed;
    return train(std::move(model), windows, tc);
}

Detection detect(const ExperimentConfig& cfg, const Autoencoder& model, const PreparedData& data) {
    require_window_fits(cfg, data);
    if (model.input_size() != cfg.window * data.test.channels()) {
        throw ShapeMismatchError("checkpoint expects " + std::to_string(model.input_size()) +
                                 " inputs, config needs " + std::to_string(cfg.window * data.test.channels()));
    }
    const auto& w = cfg.train.weights;
    Detection det;
    det.test_scores = score(model, data.test, cfg.window, cfg.score_stride, w, cfg.score_mode);
    if (cfg.threshold_mode == ThresholdMode::quantile) {
        const auto train_scores = score(model, data.train, cfg.window, cfg.score_stride, w, cfg.score_mode);
        det.quantile_threshold = threshold_quantile(train_scores.scores, cfg.quantile);
    }
    return det;
}

DatasetEval evaluate_scores(const std::string& name,
                            const VectorXd& scores,
                            const Labels& labels,
                            RpaFalsePositives fp_mode,
                            std::optional<double> fixed_threshold) {
    if (static_cast<Index>(labels.size()) != scores.size()) {
        throw ShapeMismatchError("dataset '" + name + "': " + std::to_string(scores.size()) + " scores but " +
                                 std::to_string(labels.size()) + " labels");
    }
    DatasetEval e;
    e.name = name;
    e.segments = static_cast<std::int64_t>(segments_from_labels(labels).size());
    if (fixed_threshold) {
        const auto preds = predict(scores, *fixed_threshold);
        e.rpa = metric_counts(preds, labels, Metric::rpa, fp_mode);
        e.pa = metric_counts(preds, labels, Metric::pa, fp_mode);
        e.rpa_threshold = e.pa_threshold = *fixed_threshold;
    } else {
        const auto rpa = threshold_best_f1(scores, labels, Metric::rpa, fp_mode);
        const auto pa = threshold_best_f1(scores, labels, Metric::pa, fp_mode);
        e.rpa = rpa.counts;
        e.pa = pa.counts;
        e.rpa_threshold = rpa.threshold;
        e.pa_threshold = pa.threshold;
    }
    e.rpa_f1 = e.rpa.f1();
    e.pa_f1 = e.pa.f1();
    return e;
}

DatasetEval run_pipeline(const ExperimentConfig& cfg, const PreparedData& data, LossKind loss, const LossWeights& train_weights) {
    const auto trained = train_model(cfg, data, loss, train_weights);
    const auto det = detect(cfg, trained.model, data);
    return evaluate_scores(data.name, det.test_scores.scores, require_labels(data.test, data.name),
                           cfg.rpa_false_positives, det.quantile_threshold);
}

SynthOutput cmd_synth(const ExperimentConfig& cfg) {
    const auto hash = config_hash(cfg);
    const auto comment = provenance("synth", hash, cfg.seed).substr(2);
    SynthOutput out;
    json manifest;
    manifest["strad_manifest"] = 1;
    manifest["config_hash"] = hex64(hash);
    manifest["seed"] = cfg.seed;
    manifest["config"] = to_json(cfg);
    manifest["config"].erase("output_dir");
    manifest["outputs"] = json::array();
    for (const auto& d : cfg.datasets) {
        if (!d.synth) continue;
        const auto bench = generate_synth(*d.synth);
        const auto names = channel_names(bench.train.channels());
        const auto train_path = cfg.output_dir / (d.name + "_train.csv");
        const auto test_path = cfg.output_dir / (d.name + "_test.csv");
        fs::create_directories(cfg.output_dir);
        write_csv(bench.train, train_path, names, "label", {comment});
        write_csv(bench.test, test_path, names, "label", {comment});
        out.csv_files.push_back(train_path);
        out.csv_files.push_back(test_path);
        std::int64_t anomalous = 0;
        for (auto l : *bench.test.labels) anomalous += l;
        manifest["outputs"].push_back({{"dataset", d.name},
                                       {"train", train_path.filename().string()},
                                       {"test", test_path.filename().string()},
                                       {"generator_seed", d.synth->generator.seed},
                                       {"test_seed", d.synth->generator.seed + kTestSeedOffset},
                                       {"test_anomaly_rate", static_cast<double>(anomalous) /
                                                                 static_cast<double>(bench.test.length())}});
    }
    if (out.csv_files.empty()) throw ConfigError("synth: config has no synthetic datasets");
    out.manifest = cfg.output_dir / "manifest.json";
    auto f = open_output(out.manifest);
    f << manifest.dump(2) << '\n';
    return out;
}

TrainOutput cmd_train(const ExperimentConfig& cfg) {
    const auto hash = config_hash(cfg);
    TrainOutput out;
    for (const auto& d : cfg.datasets) {
        const auto data = prepare(d);
        const auto trained = train_model(cfg, data, cfg.train.loss, cfg.train.weights);
        const auto ckpt = cfg.output_dir / (d.name + ".ckpt");
        fs::create_directories(cfg.output_dir);
        save_checkpoint(trained.model, ckpt, {provenance("train", hash, cfg.seed).substr(2)});

        std::vector<std::string> header{"epoch", "total"};
        const bool breakdown = cfg.train.loss != LossKind::mse;
        if (breakdown) header.insert(header.end(), {"trend", "seasonality", "shape"});
        std::vector<std::vector<std::string>> rows;
        for (std::size_t e = 0; e < trained.history.size(); ++e) {
            const auto& rec = trained.history[e];
            std::vector<std::string> row{std::to_string(e + 1), format_number(rec.total)};
            if (breakdown) {
                row.push_back(format_number(rec.breakdown->trend));
                row.push_back(format_number(rec.breakdown->seasonality));
                row.push_back(format_number(rec.breakdown->shape));
            }
            rows.push_back(row);
        }
        const auto history = cfg.output_dir / (d.name + "_history.csv");
        write_csv_table(history, provenance("train", hash, cfg.seed), header, rows);
        out.checkpoints.push_back(ckpt);
        out.histories.push_back(history);
    }
    return out;
}

DetectOutput cmd_detect(const ExperimentConfig& cfg, const std::optional<fs::path>& checkpoint) {
    if (checkpoint && cfg.datasets.size() != 1) {
        throw ConfigError("--checkpoint needs a config with exactly one dataset");
    }
    const auto hash = config_hash(cfg);
    const auto comment = provenance("detect", hash, cfg.seed);
    DetectOutput out;
    for (const auto& d : cfg.datasets) {
        const auto data = prepare(d);
        const auto model = load_checkpoint(checkpoint ? *checkpoint : cfg.output_dir / (d.name + ".ckpt"));
        const auto det = detect(cfg, model, data);
        double threshold = 0.0;
        if (det.quantile_threshold) {
            threshold = *det.quantile_threshold;
        } else {
            const auto labels = require_labels(data.test, d.name);
            const auto metric = cfg.metric == MetricSelection::pa ? Metric::pa : Metric::rpa;
            threshold = threshold_best_f1(det.test_scores.scores, labels, metric, cfg.rpa_false_positives).threshold;
        }
        const auto& scores = det.test_scores.scores;
        std::vector<std::vector<std::string>> rows;
        rows.reserve(static_cast<std::size_t>(scores.size()));
        for (Index i = 0; i < scores.size(); ++i) rows.push_back({std::to_string(i), format_number(scores(i))});
        const auto score_path = cfg.output_dir / (d.name + "_scores.csv");
        write_csv_table(score_path, comment, {"index", "score"}, rows);

        rows.clear();
        for (const auto& s : segments_from_labels(predict(scores, threshold))) {
            rows.push_back({std::to_string(s.start), std::to_string(s.end)});
        }
        const auto seg_path = cfg.output_dir / (d.name + "_segments.csv");
        write_csv_table(seg_path, comment + "\n# threshold=" + format_number(threshold), {"start", "end"}, rows);
        out.score_files.push_back(score_path);
        out.segment_files.push_back(seg_path);
        out.thresholds.push_back(threshold);
    }
    return out;
}

EvalOutput cmd_eval(const EvalOptions& options) {
    if (options.score_files.empty()) throw ConfigError("eval needs at least one --scores file");
    if (options.score_files.size() != options.label_files.size()) {
        throw ConfigError("eval needs one --labels file per --scores file");
    }
    std::string digest_input = to_string(options.metric) + "|" + to_string(options.rpa_false_positives) + "|" +
                               options.label_column + "|" +
                               (options.threshold ? format_number(*options.threshold) : std::string("best_f1"));
    EvalOutput out;
    for (std::size_t i = 0; i < options.score_files.size(); ++i) {
        digest_input += "|" + read_file(options.score_files[i]) + "|" + read_file(options.label_files[i]);
        const auto scores = load_csv(options.score_files[i], {"score"});
        const auto labels = load_labels(options.label_files[i], options.label_column);
        out.report.datasets.push_back(evaluate_scores(dataset_name_from(options.score_files[i]), scores.values.col(0),
                                                      labels, options.rpa_false_positives, options.threshold));
    }
    finalize(out.report);

    const auto comment = "# strad eval inputs_hash=" + hex64(fnv1a64(digest_input));
    out.csv_file = options.output_dir / "eval_report.csv";
    write_csv_table(out.csv_file, comment, eval_header(options.metric),
                    eval_rows(out.report, options.metric, format_number));
    out.text_file = options.output_dir / "eval_report.txt";
    auto txt = open_output(out.text_file);
    txt << comment << "\n\n" << render_table(eval_header(options.metric), eval_rows(out.report, options.metric, fixed4));
    return out;
}

CompareOutput cmd_compare(const ExperimentConfig& cfg) {
    if (cfg.compare_losses.size() < 2) throw ConfigError("compare needs at least two losses");
    const auto baseline_it = std::find(cfg.compare_losses.begin(), cfg.compare_losses.end(), LossKind::mse);
    if (baseline_it == cfg.compare_losses.end()) throw ConfigError("compare needs mse among compare_losses");
    const auto baseline = static_cast<std::size_t>(baseline_it - cfg.compare_losses.begin());

    std::vector<std::string> labels;
    for (std::size_t i = 0; i < cfg.compare_losses.size(); ++i) {
        const auto base = to_string(cfg.compare_losses[i]);
        const auto dupes = std::count(cfg.compare_losses.begin(), cfg.compare_losses.begin() + static_cast<long>(i),
                                      cfg.compare_losses[i]);
        labels.push_back(dupes == 0 ? base : base + "_" + std::to_string(dupes + 1));
    }

    const auto data = prepare_all(cfg);
    const std::size_t nd = data.size();
    std::vector<DatasetEval> evals(cfg.compare_losses.size() * nd);
    run_parallel(cfg.jobs, evals.size(), [&](std::size_t k) {
        evals[k] = run_pipeline(cfg, data[k % nd], cfg.compare_losses[k / nd], cfg.train.weights);
    });

    CompareOutput out;
    std::vector<std::vector<double>> rpa(cfg.compare_losses.size());
    std::vector<std::vector<double>> pa(cfg.compare_losses.size());
    for (std::size_t l = 0; l < cfg.compare_losses.size(); ++l) {
        EvalReport report;
        for (std::size_t d = 0; d < nd; ++d) {
            const auto& e = evals[l * nd + d];
            out.rows.push_back({labels[l], e.name, e.rpa_f1, e.pa_f1});
            rpa[l].push_back(e.rpa_f1);
            pa[l].push_back(e.pa_f1);
            report.datasets.push_back(e);
        }
        finalize(report);
        out.reports.emplace_back(labels[l], std::move(report));
    }
    for (std::size_t l = 0; l < cfg.compare_losses.size(); ++l) {
        if (l == baseline) continue;
        for (const auto& [metric, f1] : {std::pair{"rpa", &rpa}, std::pair{"pa", &pa}}) {
            ImprovementRow row{labels[l], metric, avg_improved((*f1)[l], (*f1)[baseline]), std::nullopt};
            try {
                const auto a = air((*f1)[l], (*f1)[baseline]);
                row.air = a.value;
                for (auto idx : a.dropped) {
                    out.warnings.push_back(std::string("A.I.R. (") + metric + ") for " + labels[l] + ": dropped dataset '" +
                                           data[idx].name + "' with zero MSE baseline");
                }
            } catch (const InvalidArgumentError&) {
                out.warnings.push_back(std::string("A.I.R. (") + metric + ") for " + labels[l] +
                                       " undefined: every MSE baseline is zero");
            }
            out.improvements.push_back(row);
        }
    }

    const auto hash = config_hash(cfg);
    const auto comment = provenance("compare", hash, cfg.seed);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<std::string>> text_rows;
    for (const auto& r : out.rows) {
        rows.push_back({r.loss, r.dataset, format_number(r.rpa_f1), format_number(r.pa_f1)});
        text_rows.push_back({r.loss, r.dataset, fixed4(r.rpa_f1), fixed4(r.pa_f1)});
    }
    out.table_file = cfg.output_dir / "compare.csv";
    write_csv_table(out.table_file, comment, {"loss", "dataset", "rpa_f1", "pa_f1"}, rows);

    std::vector<std::vector<std::string>> imp_rows;
    std::vector<std::vector<std::string>> imp_text;
    for (const auto& r : out.improvements) {
        imp_rows.push_back({r.loss, r.metric, format_number(r.avg_improved), r.air ? format_number(*r.air) : "NA"});
        imp_text.push_back({r.loss, r.metric, fixed4(r.avg_improved), r.air ? fixed4(*r.air) : "NA"});
    }
    out.improvement_file = cfg.output_dir / "compare_improvement.csv";
    write_csv_table(out.improvement_file, comment, {"loss", "metric", "avg_improved", "air"}, imp_rows);

    std::vector<std::vector<std::string>> entire_rows;
    std::vector<std::vector<std::string>> entire_text;
    for (const auto& [label, report] : out.reports) {
        entire_rows.push_back({label, format_number(report.entire_rpa_f1), format_number(report.entire_pa_f1)});
        entire_text.push_back({label, fixed4(report.entire_rpa_f1), fixed4(report.entire_pa_f1)});
    }
    out.entire_file = cfg.output_dir / "compare_entire.csv";
    write_csv_table(out.entire_file, comment, {"loss", "entire_rpa_f1", "entire_pa_f1"}, entire_rows);

    auto txt = open_output(cfg.output_dir / "compare.txt");
    txt << comment << "\n\n"
        << render_table({"loss", "dataset", "rpa_f1", "pa_f1"}, text_rows) << '\n'
        << render_table({"loss", "entire_rpa_f1", "entire_pa_f1"}, entire_text) << '\n'
        << render_table({"loss", "metric", "avg_improved", "air"}, imp_text);
    for (const auto& w : out.warnings) txt << "warning: " << w << '\n';
    return out;
}

AblationOutput cmd_ablate(const ExperimentConfig& cfg) {
    if (cfg.train.loss == LossKind::mse) throw ConfigError("ablate needs a StrAD-based training loss");
    // Same row order as the usual ablation table: singles, pairs, full.
    static const std::array<std::array<bool, 3>, 7> subsets{{
        {true, false, false},
        {false, true, false},
        {false, false, true},
        {true, true, false},
        {true, false, true},
        {false, true, true},
        {true, true, true},
    }};
    const auto& base = cfg.train.weights;
    for (const auto& s : subsets) {
        if ((s[0] && base.lambda1 == 0.0) || (s[1] && base.lambda2 == 0.0) || (s[2] && base.lambda3 == 0.0)) {
            throw ConfigError("ablate needs every configured lambda to be positive");
        }
    }

    const auto data = prepare_all(cfg);
    const std::size_t nd = data.size();
    std::vector<DatasetEval> evals(subsets.size() * nd);
    run_parallel(cfg.jobs, evals.size(), [&](std::size_t k) {
        const auto& s = subsets[k / nd];
        LossWeights w = base;
        if (!s[0]) w.lambda1 = 0.0;
        if (!s[1]) w.lambda2 = 0.0;
        if (!s[2]) w.lambda3 = 0.0;
        evals[k] = run_pipeline(cfg, data[k % nd], cfg.train.loss, w);
    });

    AblationOutput out;
    std::vector<std::string> header{"trend", "seasonality", "shape", "entire_rpa_f1", "entire_pa_f1"};
    for (const auto& d : data) {
        header.push_back(d.name + "_rpa_f1");
        header.push_back(d.name + "_pa_f1");
    }
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<std::string>> text_rows;
    auto mark = [](bool b) { return std::string(b ? "1" : "0"); };
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        AblationRow row{subsets[i][0], subsets[i][1], subsets[i][2], {}};
        for (std::size_t d = 0; d < nd; ++d) row.report.datasets.push_back(evals[i * nd + d]);
        finalize(row.report);
        std::vector<std::string> csv{mark(row.trend), mark(row.seasonality), mark(row.shape),
                                     format_number(row.report.entire_rpa_f1), format_number(row.report.entire_pa_f1)};
        std::vector<std::string> txt{mark(row.trend), mark(row.seasonality), mark(row.shape),
                                     fixed4(row.report.entire_rpa_f1), fixed4(row.report.entire_pa_f1)};
        for (const auto& e : row.report.datasets) {
            csv.push_back(format_number(e.rpa_f1));
            csv.push_back(format_number(e.pa_f1));
            txt.push_back(fixed4(e.rpa_f1));
            txt.push_back(fixed4(e.pa_f1));
        }
        rows.push_back(csv);
        text_rows.push_back(txt);
        out.rows.push_back(std::move(row));
    }
    const auto comment = provenance("ablate", config_hash(cfg), cfg.seed);
    out.table_file = cfg.output_dir / "ablation.csv";
    write_csv_table(out.table_file, comment, header, rows);
    auto txt = open_output(cfg.output_dir / "ablation.txt");
    txt << comment << "\n\n" << render_table(header, text_rows);
    return out;
}

GradcheckOutput cmd_gradcheck(const GradcheckOptions& options, const std::optional<fs::path>& output_dir) {
    GradcheckOutput out;
    out.report = run_gradcheck(options);
    if (output_dir) {
        out.report_file = *output_dir / "gradcheck.txt";
        auto f = open_output(*out.report_file);
        f << "# strad gradcheck seed=" << options.seed << "\n" << out.report.to_text();
    }
    return out;
}

} // namespace strad

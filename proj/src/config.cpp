#include "strad/config.hpp"

#include "strad/errors.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace strad {

using nlohmann::json;

namespace {

// Visits an object, rejecting keys that no handler claims.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (!obj_.contains(key)) return;
        try {
            out = obj_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where_ + "." + key + ": " + e.what());
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        return obj_.contains(key) ? &obj_.at(key) : nullptr;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
        }
    }

private:
    const json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

template <typename Enum>
Enum parse_enum(const std::string& s, std::initializer_list<Enum> values, const std::string& what) {
    for (Enum v : values) {
        if (to_string(v) == s) return v;
    }
    throw ConfigError("unknown " + what + " '" + s + "'");
}

Shapelet parse_shapelet(const std::string& s) {
    return parse_enum(s, {Shapelet::sine, Shapelet::square, Shapelet::sawtooth}, "shapelet");
}

AnomalyKind parse_anomaly_kind(const std::string& s) {
    return parse_enum(s,
                      {AnomalyKind::global_point, AnomalyKind::contextual_point, AnomalyKind::shapelet_pattern,
                       AnomalyKind::seasonal_pattern, AnomalyKind::trend_pattern},
                      "anomaly kind");
}

GeneratorConfig parse_generator(const json& j, const std::string& where, bool& explicit_seed) {
    ObjectReader r(j, where);
    GeneratorConfig g;
    r.read("length", g.length);
    r.read("noise_sigma", g.noise_sigma);
    explicit_seed = j.contains("seed");
    r.read("seed", g.seed);
    if (const auto* chans = r.child("channels")) {
        if (!chans->is_array() || chans->empty()) throw ConfigError(where + ".channels: expected a non-empty array");
        g.channels.clear();
        for (std::size_t i = 0; i < chans->size(); ++i) {
            ObjectReader cr((*chans)[i], where + ".channels[" + std::to_string(i) + "]");
            ChannelConfig ch;
            std::string shapelet = to_string(ch.shapelet);
            cr.read("frequency", ch.frequency);
            cr.read("amplitude", ch.amplitude);
            cr.read("phase", ch.phase);
            cr.read("slope", ch.slope);
            cr.read("shapelet", shapelet);
            cr.finish();
            ch.shapelet = parse_shapelet(shapelet);
            g.channels.push_back(ch);
        }
    }
    r.finish();
    return g;
}

AnomalySpec parse_anomaly(const json& j, const std::string& where) {
    ObjectReader r(j, where);
    AnomalySpec a;
    std::string kind;
    r.read("kind", kind);
    r.read("start", a.start);
    r.read("length", a.length);
    r.read("magnitude", a.magnitude);
    r.read("channel", a.channel);
    r.finish();
    if (kind.empty()) throw ConfigError(where + ": missing kind");
    a.kind = parse_anomaly_kind(kind);
    return a;
}

DatasetConfig parse_dataset(const json& j, const std::string& where, const std::filesystem::path& base_dir) {
    ObjectReader r(j, where);
    DatasetConfig ds;
    r.read("name", ds.name);
    if (const auto* c = r.child("csv")) {
        ObjectReader cr(*c, where + ".csv");
        CsvSource src;
        std::string train;
        std::string test;
        cr.read("train", train);
        cr.read("test", test);
        cr.read("value_columns", src.value_columns);
        cr.read("label_column", src.label_column);
        cr.finish();
        if (train.empty() || test.empty()) throw ConfigError(where + ".csv: train and test paths are required");
        src.train = std::filesystem::path(train).is_absolute() ? std::filesystem::path(train) : base_dir / train;
        src.test = std::filesystem::path(test).is_absolute() ? std::filesystem::path(test) : base_dir / test;
        ds.csv = std::move(src);
    }
    if (const auto* s = r.child("synth")) {
        ObjectReader sr(*s, where + ".synth");
        SynthSource src;
        if (const auto* g = sr.child("generator")) src.generator = parse_generator(*g, where + ".synth.generator", src.explicit_seed);
        if (const auto* a = sr.child("anomalies")) {
            if (!a->is_array()) throw ConfigError(where + ".synth.anomalies: expected an array");
            for (std::size_t i = 0; i < a->size(); ++i) {
                src.anomalies.push_back(parse_anomaly((*a)[i], where + ".synth.anomalies[" + std::to_string(i) + "]"));
            }
        }
        sr.read("train_fraction", src.train_fraction);
        sr.finish();
        ds.synth = std::move(src);
    }
    r.finish();
    if (ds.name.empty()) throw ConfigError(where + ": dataset name is required");
    if (ds.csv.has_value() == ds.synth.has_value()) throw ConfigError(where + ": exactly one of csv or synth is required");
    return ds;
}

void parse_weights(const json& j, LossWeights& w) {
    ObjectReader r(j, "weights");
    std::string variant = to_string(w.trend_variant);
    std::string norm = to_string(w.spectral_norm);
    r.read("lambda1", w.lambda1);
    r.read("lambda2", w.lambda2);
    r.read("lambda3", w.lambda3);
    r.read("epsilon", w.epsilon);
    r.read("trend_variant", variant);
    r.read("spectral_norm", norm);
    r.finish();
    w.trend_variant = parse_enum(variant, {TrendVariant::paper, TrendVariant::monotone}, "trend variant");
    w.spectral_norm = parse_enum(norm, {SpectralNorm::modulus, SpectralNorm::real_imag}, "spectral norm");
}

void set_dotted(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    json* node = &doc;
    std::size_t pos = 0;
    while (true) {
        const auto dot = key.find('.', pos);
        const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        pos = dot + 1;
    }
}

} // namespace

std::string to_string(LossKind kind) {
    switch (kind) {
    case LossKind::mse: return "mse";
    case LossKind::strad: return "strad";
    case LossKind::mse_plus_strad: return "mse_plus_strad";
    }
    return "unknown";
}

std::string to_string(ScoreMode mode) { return mode == ScoreMode::shape_only ? "shape_only" : "strad_broadcast"; }
std::string to_string(TrendVariant v) { return v == TrendVariant::paper ? "paper" : "monotone"; }
std::string to_string(SpectralNorm n) { return n == SpectralNorm::modulus ? "modulus" : "real_imag"; }
std::string to_string(ThresholdMode m) { return m == ThresholdMode::best_f1 ? "best_f1" : "quantile"; }
std::string to_string(RpaFalsePositives m) { return m == RpaFalsePositives::per_run ? "per_run" : "per_point"; }

std::string to_string(MetricSelection m) {
    switch (m) {
    case MetricSelection::rpa: return "rpa";
    case MetricSelection::pa: return "pa";
    case MetricSelection::both: return "both";
    }
    return "unknown";
}

LossKind parse_loss_kind(const std::string& s) {
    return parse_enum(s, {LossKind::mse, LossKind::strad, LossKind::mse_plus_strad}, "loss");
}

MetricSelection parse_metric_selection(const std::string& s) {
    return parse_enum(s, {MetricSelection::rpa, MetricSelection::pa, MetricSelection::both}, "metric");
}

RpaFalsePositives parse_rpa_false_positives(const std::string& s) {
    return parse_enum(s, {RpaFalsePositives::per_run, RpaFalsePositives::per_point}, "rpa_false_positives mode");
}

std::vector<Index> ExperimentConfig::layer_sizes(Index channels) const {
    std::vector<Index> sizes{window * channels};
    sizes.insert(sizes.end(), hidden_layers.begin(), hidden_layers.end());
    sizes.push_back(window * channels);
    return sizes;
}

void ExperimentConfig::validate() const {
    if (datasets.empty()) throw ConfigError("config lists no datasets");
    std::set<std::string> names;
    for (const auto& d : datasets) {
        if (!names.insert(d.name).second) throw ConfigError("duplicate dataset name '" + d.name + "'");
        if (d.name.find_first_of("/\\ ") != std::string::npos) {
            throw ConfigError("dataset name '" + d.name + "' must not contain spaces or path separators");
        }
    }
    if (window < 2) throw ConfigError("window must be >= 2");
    if (train_stride < 0 || score_stride < 1) throw ConfigError("strides must be positive");
    for (Index h : hidden_layers) {
        if (h < 1) throw ConfigError("hidden layer sizes must be positive");
    }
    if (!(quantile >= 0.0 && quantile <= 1.0)) throw ConfigError("threshold.quantile must lie in [0, 1]");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    try {
        train.validate();
        train.weights.validate();
    } catch (const InvalidArgumentError& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    ObjectReader r(doc, "config");
    if (const auto* ds = r.child("datasets")) {
        if (!ds->is_array()) throw ConfigError("datasets: expected an array");
        for (std::size_t i = 0; i < ds->size(); ++i) {
            cfg.datasets.push_back(parse_dataset((*ds)[i], "datasets[" + std::to_string(i) + "]", base_dir));
        }
    }
    r.read("window", cfg.window);
    r.read("train_stride", cfg.train_stride);
    r.read("score_stride", cfg.score_stride);
    r.read("hidden_layers", cfg.hidden_layers);
    if (const auto* t = r.child("train")) {
        ObjectReader tr(*t, "train");
        std::string loss = to_string(cfg.train.loss);
        tr.read("epochs", cfg.train.epochs);
        tr.read("batch_size", cfg.train.batch_size);
        tr.read("loss", loss);
        tr.read("mix", cfg.train.mix);
        tr.read("learning_rate", cfg.train.learning_rate);
        tr.finish();
        cfg.train.loss = parse_loss_kind(loss);
    }
    if (const auto* w = r.child("weights")) parse_weights(*w, cfg.train.weights);

    std::string score_mode = to_string(cfg.score_mode);
    r.read("score_mode", score_mode);
    cfg.score_mode = parse_enum(score_mode, {ScoreMode::shape_only, ScoreMode::strad_broadcast}, "score mode");

    if (const auto* th = r.child("threshold")) {
        ObjectReader tr(*th, "threshold");
        std::string mode = to_string(cfg.threshold_mode);
        tr.read("mode", mode);
        tr.read("quantile", cfg.quantile);
        tr.finish();
        cfg.threshold_mode = parse_enum(mode, {ThresholdMode::best_f1, ThresholdMode::quantile}, "threshold mode");
    }
    std::string metric = to_string(cfg.metric);
    r.read("metric", metric);
    cfg.metric = parse_metric_selection(metric);
    std::string fp = to_string(cfg.rpa_false_positives);
    r.read("rpa_false_positives", fp);
    cfg.rpa_false_positives = parse_rpa_false_positives(fp);

    if (const auto* losses = r.child("compare_losses")) {
        std::vector<std::string> names;
        try {
            names = losses->get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("compare_losses: ") + e.what());
        }
        cfg.compare_losses.clear();
        for (const auto& n : names) cfg.compare_losses.push_back(parse_loss_kind(n));
    }
    std::string out = cfg.output_dir.string();
    r.read("output_dir", out);
    cfg.output_dir = std::filesystem::path(out).is_absolute() || base_dir.empty() ? std::filesystem::path(out)
                                                                                  : base_dir / out;
    r.read("seed", cfg.seed);
    r.read("jobs", cfg.jobs);
    r.finish();

    cfg.train.seed = cfg.seed;
    for (auto& d : cfg.datasets) {
        if (d.synth && !d.synth->explicit_seed) d.synth->generator.seed = cfg.seed;
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path.string());
    json doc = json::parse(in, nullptr, false, true);
    if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
    // A synth manifest embeds the resolved config it was produced from.
    if (doc.is_object() && doc.contains("strad_manifest") && doc.contains("config")) doc = json(doc["config"]);
    for (const auto& o : overrides) set_dotted(doc, o);
    return parse_config(doc, path.parent_path());
}

json to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["datasets"] = json::array();
    for (const auto& d : cfg.datasets) {
        json dj;
        dj["name"] = d.name;
        if (d.csv) {
            dj["csv"] = {{"train", d.csv->train.string()},
                         {"test", d.csv->test.string()},
                         {"value_columns", d.csv->value_columns},
                         {"label_column", d.csv->label_column}};
        }
        if (d.synth) {
            const auto& g = d.synth->generator;
            json chans = json::array();
            for (const auto& ch : g.channels) {
                chans.push_back({{"frequency", ch.frequency},
                                 {"amplitude", ch.amplitude},
                                 {"phase", ch.phase},
                                 {"slope", ch.slope},
                                 {"shapelet", to_string(ch.shapelet)}});
            }
            json anomalies = json::array();
            for (const auto& a : d.synth->anomalies) {
                anomalies.push_back({{"kind", to_string(a.kind)},
                                     {"start", a.start},
                                     {"length", a.length},
                                     {"magnitude", a.magnitude},
                                     {"channel", a.channel}});
            }
            dj["synth"] = {{"generator",
                            {{"length", g.length}, {"noise_sigma", g.noise_sigma}, {"seed", g.seed}, {"channels", chans}}},
                           {"anomalies", anomalies},
                           {"train_fraction", d.synth->train_fraction}};
        }
        doc["datasets"].push_back(dj);
    }
    doc["window"] = cfg.window;
    doc["train_stride"] = cfg.effective_train_stride();
    doc["score_stride"] = cfg.score_stride;
    doc["hidden_layers"] = cfg.hidden_layers;
    doc["train"] = {{"epochs", cfg.train.epochs},
                    {"batch_size", cfg.train.batch_size},
                    {"loss", to_string(cfg.train.loss)},
                    {"mix", cfg.train.mix},
                    {"learning_rate", cfg.train.learning_rate}};
    const auto& w = cfg.train.weights;
    doc["weights"] = {{"lambda1", w.lambda1},
                      {"lambda2", w.lambda2},
                      {"lambda3", w.lambda3},
                      {"epsilon", w.epsilon},
                      {"trend_variant", to_string(w.trend_variant)},
                      {"spectral_norm", to_string(w.spectral_norm)}};
    doc["score_mode"] = to_string(cfg.score_mode);
    doc["threshold"] = {{"mode", to_string(cfg.threshold_mode)}, {"quantile", cfg.quantile}};
    doc["metric"] = to_string(cfg.metric);
    doc["rpa_false_positives"] = to_string(cfg.rpa_false_positives);
    json losses = json::array();
    for (auto l : cfg.compare_losses) losses.push_back(to_string(l));
    doc["compare_losses"] = losses;
    doc["output_dir"] = cfg.output_dir.string();
    doc["seed"] = cfg.seed;
    return doc;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    // output_dir and jobs do not affect results.
    auto doc = to_json(cfg);
    doc.erase("output_dir");
    return fnv1a64(doc.dump());
}

std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << v;
    return out.str();
}

} // namespace strad

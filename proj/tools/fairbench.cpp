// fairbench command-line driver: synthetic data generation, evaluation runs,
// scalability sweeps, stability suites, and report format conversion.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairbench/fairbench.hpp"

using namespace fairbench;

namespace {

struct ExperimentConfig {
    std::vector<PipelineSpec> specs;
    double train_fraction = 0.7;
    int cv_folds = 3;
    CdSettings cd;
    std::vector<std::string> resolving;
    int timing_repeats = 1;
};

ExperimentConfig load_experiment(const std::string& path, std::uint64_t default_seed) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open experiment config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError("experiment config " + path + " is not valid JSON: " + e.what());
    }
    ExperimentConfig cfg;
    if (!j.contains("specs") || !j["specs"].is_array() || j["specs"].empty())
        throw ParameterError("experiment config needs a nonempty 'specs' array");
    for (const auto& js : j["specs"]) {
        PipelineSpec spec;
        spec.approach = approach_from_string(js.at("approach").get<std::string>());
        spec.seed = js.value("seed", default_seed);
        if (js.contains("hyperparams"))
            for (auto& [k, v] : js["hyperparams"].items())
                spec.hyperparams[k] = v.get<double>();
        if (js.contains("roc_grid")) spec.roc_grid = js["roc_grid"].get<std::vector<double>>();
        if (js.contains("train_options")) {
            const auto& to = js["train_options"];
            spec.train_options.learning_rate =
                to.value("learning_rate", spec.train_options.learning_rate);
            spec.train_options.max_epochs = to.value("max_epochs", spec.train_options.max_epochs);
            spec.train_options.tolerance = to.value("tolerance", spec.train_options.tolerance);
            spec.train_options.l2_penalty =
                to.value("l2_penalty", spec.train_options.l2_penalty);
        }
        cfg.specs.push_back(std::move(spec));
    }
    cfg.train_fraction = j.value("train_fraction", 0.7);
    cfg.cv_folds = j.value("cv_folds", 3);
    cfg.cd.confidence = j.value("cd_confidence", 0.99);
    cfg.cd.error_bound = j.value("cd_error", 0.01);
    if (j.contains("resolving"))
        cfg.resolving = j["resolving"].get<std::vector<std::string>>();
    cfg.timing_repeats = j.value("timing_repeats", 1);
    return cfg;
}

std::vector<std::size_t> parse_points(const std::string& csv) {
    std::vector<std::size_t> points;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        points.push_back(std::strtoull(tok.c_str(), nullptr, 10));
    }
    if (points.empty()) throw ParameterError("--points needs a comma-separated list");
    return points;
}

EvaluateOptions evaluate_options(const ExperimentConfig& cfg, const std::string& data_path) {
    EvaluateOptions opts;
    opts.cv_folds = cfg.cv_folds;
    opts.cd = cfg.cd;
    opts.resolving = cfg.resolving;
    opts.timing_repeats = cfg.timing_repeats;
    opts.dataset_label = data_path;
    return opts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fair-classification benchmark toolkit"};
    app.require_subcommand(1);

    std::string data_path, schema_path, spec_path, out_path;
    std::string format = "csv";
    std::uint64_t seed = 0;

    // synth
    auto* synth = app.add_subcommand("synth", "generate the synthetic biased benchmark");
    SyntheticConfig synth_cfg;
    std::string schema_out;
    synth->add_option("--rows", synth_cfg.rows, "number of rows");
    synth->add_option("--features", synth_cfg.features, "number of numeric features");
    synth->add_option("--proxy-features", synth_cfg.proxy_features,
                      "trailing features shifted by group");
    synth->add_option("--priv-rate", synth_cfg.positive_rate_privileged,
                      "privileged positive rate");
    synth->add_option("--unpriv-rate", synth_cfg.positive_rate_unprivileged,
                      "unprivileged positive rate");
    synth->add_option("--group-shift", synth_cfg.group_shift, "proxy feature group shift");
    synth->add_option("--label-signal", synth_cfg.label_signal, "feature shift per label");
    synth->add_option("--seed", synth_cfg.seed, "generator seed");
    synth->add_option("--out", out_path, "output CSV path")->required();
    synth->add_option("--schema-out", schema_out, "schema config JSON path");

    // evaluate
    auto* evaluate_cmd = app.add_subcommand("evaluate", "run specs on one train/test split");
    evaluate_cmd->add_option("--data", data_path, "input CSV")->required();
    evaluate_cmd->add_option("--schema", schema_path, "schema config JSON")->required();
    evaluate_cmd->add_option("--spec", spec_path, "experiment config JSON")->required();
    evaluate_cmd->add_option("--seed", seed, "split seed and default spec seed");
    evaluate_cmd->add_option("--out", out_path, "report output path")->required();
    evaluate_cmd->add_option("--format", format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));

    // scale
    auto* scale = app.add_subcommand("scale", "scalability sweep over rows or attributes");
    std::string axis = "rows";
    std::string points_arg;
    int timing_repeats = 1;
    scale->add_option("--data", data_path, "input CSV")->required();
    scale->add_option("--schema", schema_path, "schema config JSON")->required();
    scale->add_option("--spec", spec_path, "experiment config JSON")->required();
    scale->add_option("--axis", axis, "sweep axis")->check(CLI::IsMember({"rows", "attributes"}));
    scale->add_option("--points", points_arg, "comma-separated sweep points")->required();
    scale->add_option("--seed", seed, "sweep seed");
    scale->add_option("--repeats", timing_repeats, "median-of-k timing repeats");
    scale->add_option("--out", out_path, "report output path")->required();
    scale->add_option("--format", format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));

    // stability
    auto* stability = app.add_subcommand("stability", "variance over repeated random folds");
    int repeats = 10;
    double train_fraction = 2.0 / 3.0;
    stability->add_option("--data", data_path, "input CSV")->required();
    stability->add_option("--schema", schema_path, "schema config JSON")->required();
    stability->add_option("--spec", spec_path, "experiment config JSON")->required();
    stability->add_option("--repeats", repeats, "number of random folds");
    stability->add_option("--train-fraction", train_fraction, "training fraction per fold");
    stability->add_option("--seed", seed, "base seed (fold r uses seed + r)");
    stability->add_option("--out", out_path, "records output path")->required();
    stability->add_option("--format", format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));

    // report
    auto* report = app.add_subcommand("report", "convert a records file between formats");
    std::string in_path, in_format = "csv";
    report->add_option("--in", in_path, "input records file")->required();
    report->add_option("--in-format", in_format, "input format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    report->add_option("--out", out_path, "output path")->required();
    report->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "jsonl"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            Dataset data = make_synthetic(synth_cfg);
            data.export_csv(out_path);
            if (!schema_out.empty()) {
                std::ofstream out(schema_out);
                if (!out) throw IoError("cannot write " + schema_out);
                out << synthetic_schema_config(synth_cfg).to_json().dump(2) << "\n";
            }
            std::printf("wrote %zu rows to %s\n", data.n_rows(), out_path.c_str());
            for (const auto& line : data.provenance()) std::printf("  %s\n", line.c_str());
        } else if (evaluate_cmd->parsed()) {
            ExperimentConfig cfg = load_experiment(spec_path, seed);
            Dataset data = load_csv(data_path, SchemaConfig::from_json_file(schema_path));
            std::vector<BenchmarkRecord> records =
                evaluate(cfg.specs, data, SplitPlan{cfg.train_fraction, seed},
                         evaluate_options(cfg, data_path));
            emit_report(records, report_format_from_string(format), out_path);
            std::printf("wrote %zu records to %s\n", records.size(), out_path.c_str());
            for (const auto& r : records)
                if (!r.ok()) std::fprintf(stderr, "warning: %s failed: %s\n",
                                          r.spec_id.c_str(), r.error.c_str());
        } else if (scale->parsed()) {
            ExperimentConfig cfg = load_experiment(spec_path, seed);
            Dataset data = load_csv(data_path, SchemaConfig::from_json_file(schema_path));
            EvaluateOptions opts = evaluate_options(cfg, data_path);
            opts.cv_folds = 0;  // sweeps measure runtime shape, not CV diagnostics
            opts.timing_repeats = timing_repeats;
            SweepAxis sweep_axis = axis == "rows" ? SweepAxis::Rows : SweepAxis::Attributes;
            std::vector<BenchmarkRecord> records = scalability_sweep(
                cfg.specs, data, sweep_axis, parse_points(points_arg), seed, opts);
            emit_report(records, report_format_from_string(format), out_path);
            std::printf("wrote %zu records to %s\n", records.size(), out_path.c_str());
        } else if (stability->parsed()) {
            ExperimentConfig cfg = load_experiment(spec_path, seed);
            Dataset data = load_csv(data_path, SchemaConfig::from_json_file(schema_path));
            StabilityResult result =
                stability_suite(cfg.specs, data, repeats, train_fraction, seed, true,
                                evaluate_options(cfg, data_path));
            emit_report(result.records, report_format_from_string(format), out_path);
            std::printf("wrote %zu records to %s\n", result.records.size(), out_path.c_str());
            for (const auto& summary : result.summaries) {
                std::printf("%s\n", summary.spec_id.c_str());
                for (const auto& [metric, st] : summary.per_metric)
                    std::printf("  %-10s mean %.4f var %.6f min %.4f max %.4f (n=%zu)\n",
                                metric.c_str(), st.mean, st.variance, st.min, st.max, st.count);
            }
        } else if (report->parsed()) {
            std::vector<BenchmarkRecord> records =
                read_records(in_path, report_format_from_string(in_format));
            emit_report(records, report_format_from_string(format), out_path);
            std::printf("wrote %zu records to %s\n", records.size(), out_path.c_str());
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
    return 0;
}

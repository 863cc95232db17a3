#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairbench/common.hpp"
#include "fairbench/dataset.hpp"
#include "fairbench/inprocess.hpp"
#include "fairbench/metrics.hpp"
#include "fairbench/model.hpp"
#include "fairbench/postprocess.hpp"
#include "fairbench/preprocess.hpp"

namespace fairbench {

enum class Approach { Orig, KamRw, Feld, ZafarDiFair, ZafarDiAcc, KamRoc, Hardt, Pleiss };
enum class Stage { None, Pre, In, Post };

inline Stage stage_of(Approach a) {
    switch (a) {
        case Approach::Orig: return Stage::None;
        case Approach::KamRw:
        case Approach::Feld: return Stage::Pre;
        case Approach::ZafarDiFair:
        case Approach::ZafarDiAcc: return Stage::In;
        default: return Stage::Post;
    }
}

inline const char* to_string(Approach a) {
    switch (a) {
        case Approach::Orig: return "orig";
        case Approach::KamRw: return "kam_rw";
        case Approach::Feld: return "feld";
        case Approach::ZafarDiFair: return "zafar_di_fair";
        case Approach::ZafarDiAcc: return "zafar_di_acc";
        case Approach::KamRoc: return "kam_roc";
        case Approach::Hardt: return "hardt";
        default: return "pleiss";
    }
}

inline const char* to_string(Stage s) {
    switch (s) {
        case Stage::None: return "none";
        case Stage::Pre: return "pre";
        case Stage::In: return "in";
        default: return "post";
    }
}

inline Approach approach_from_string(const std::string& id) {
    if (id == "orig") return Approach::Orig;
    if (id == "kam_rw") return Approach::KamRw;
    if (id == "feld") return Approach::Feld;
    if (id == "zafar_di_fair") return Approach::ZafarDiFair;
    if (id == "zafar_di_acc") return Approach::ZafarDiAcc;
    if (id == "kam_roc") return Approach::KamRoc;
    if (id == "hardt") return Approach::Hardt;
    if (id == "pleiss") return Approach::Pleiss;
    throw ParameterError("unknown approach id '" + id + "'");
}

struct PipelineSpec {
    Approach approach = Approach::Orig;
    std::map<std::string, double> hyperparams;
    std::vector<double> roc_grid;  // kam_roc only; empty = default grid
    std::uint64_t seed = 0;
    TrainOptions train_options;

    Stage stage() const { return stage_of(approach); }

    double param(const std::string& key, double fallback) const {
        auto it = hyperparams.find(key);
        return it == hyperparams.end() ? fallback : it->second;
    }

    std::string id_string() const {
        std::string id = to_string(approach);
        switch (approach) {
            case Approach::Feld:
                id += "(lambda=" + format_param(param("lambda", 1.0)) + ")";
                break;
            case Approach::ZafarDiFair:
                id += "(c=" + format_param(param("c", 0.0)) + ")";
                break;
            case Approach::ZafarDiAcc:
                id += "(gamma=" + format_param(param("gamma", 0.05)) + ")";
                break;
            default: break;
        }
        return id;
    }

    static std::string format_param(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return buf;
    }
};

struct Timings {
    double pre = 0.0;
    double train = 0.0;
    double post = 0.0;
    double total() const { return pre + train + post; }
};

struct PipelineResult {
    std::vector<int> test_predictions;
    Timings timings;
    BatchPredictor predictor;  // frozen-seed prediction function over (X, S)
};

namespace detail {

// Timing token: timed sections are serialized so measurements reflect
// single-threaded execution even if benchmark cells run concurrently.
inline std::mutex& timing_token() {
    static std::mutex m;
    return m;
}

}  // namespace detail

template <typename Fn>
double time_section(Fn&& fn) {
    std::lock_guard<std::mutex> lock(detail::timing_token());
    auto start = std::chrono::steady_clock::now();
    fn();
    auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

// Executes the stage-appropriate composition for one pipeline spec:
//   none: fit -> predict
//   pre:  transform train -> fit -> predict
//   in:   constrained fit -> predict
//   post: fit on half of train -> fit policy on the held-in calibration
//         half -> apply to test predictions
// Wall-clock is recorded per stage; prediction of the test set itself is not
// counted (it is common to every approach).
inline PipelineResult run_pipeline(const PipelineSpec& spec, const Dataset& train,
                                   const Dataset& test) {
    PipelineResult result;
    const TrainOptions& opts = spec.train_options;

    switch (spec.approach) {
        case Approach::Orig: {
            TrainedModel model;
            result.timings.train = time_section([&] { model = fit_logistic(train, nullptr, opts); });
            result.predictor = [model](const Dataset& d) { return predict_label(model, d); };
            break;
        }
        case Approach::KamRw: {
            bool use_weights = spec.param("use_weights", 0.0) != 0.0;
            auto resample_n = static_cast<std::size_t>(
                spec.param("resample_n", static_cast<double>(train.n_rows())));
            TrainedModel model;
            if (use_weights) {
                // Weighted-likelihood route: equivalent in expectation to
                // resampling; the resampling route is the harness default.
                ReweighResult rw;
                result.timings.pre = time_section([&] { rw = reweigh(train); });
                result.timings.train = time_section(
                    [&] { model = fit_logistic(train, &rw.row_weights, opts); });
            } else {
                Dataset resampled;
                result.timings.pre = time_section([&] {
                    ReweighResult rw = reweigh(train);
                    resampled = weighted_resample(train, rw.row_weights, resample_n, spec.seed);
                });
                result.timings.train =
                    time_section([&] { model = fit_logistic(resampled, nullptr, opts); });
            }
            result.predictor = [model](const Dataset& d) { return predict_label(model, d); };
            break;
        }
        case Approach::Feld: {
            RepairParams params;
            params.lambda = spec.param("lambda", 1.0);
            Dataset repaired;
            result.timings.pre = time_section([&] { repaired = dir_repair(train, params); });
            TrainedModel model;
            result.timings.train =
                time_section([&] { model = fit_logistic(repaired, nullptr, opts); });
            result.predictor = [model](const Dataset& d) { return predict_label(model, d); };
            break;
        }
        case Approach::ZafarDiFair: {
            ZafarFit fit;
            result.timings.train = time_section(
                [&] { fit = fit_zafar_di_fair(train, spec.param("c", 0.0), opts); });
            TrainedModel model = fit.model;
            result.predictor = [model](const Dataset& d) { return predict_label(model, d); };
            break;
        }
        case Approach::ZafarDiAcc: {
            ZafarFit fit;
            result.timings.train = time_section(
                [&] { fit = fit_zafar_di_acc(train, spec.param("gamma", 0.05), opts); });
            TrainedModel model = fit.model;
            result.predictor = [model](const Dataset& d) { return predict_label(model, d); };
            break;
        }
        case Approach::KamRoc: {
            auto [fit_half, calib_half] =
                split(train, SplitPlan{0.5, splitmix64(spec.seed ^ 0xca11bULL)});
            TrainedModel model;
            result.timings.train =
                time_section([&] { model = fit_logistic(fit_half, nullptr, opts); });
            CriticalRegion region;
            result.timings.post = time_section([&] {
                std::vector<double> calib_proba = predict_proba(model, calib_half);
                std::vector<double> grid =
                    spec.roc_grid.empty() ? default_roc_grid() : spec.roc_grid;
                region = reject_option_tune(calib_proba, calib_half.sensitive(),
                                            calib_half.label(), FairnessTarget::DiStar, grid);
            });
            result.predictor = [model, region](const Dataset& d) {
                return reject_option_apply(predict_proba(model, d), d.sensitive(), region);
            };
            break;
        }
        case Approach::Hardt: {
            auto [fit_half, calib_half] =
                split(train, SplitPlan{0.5, splitmix64(spec.seed ^ 0xca11bULL)});
            TrainedModel model;
            result.timings.train =
                time_section([&] { model = fit_logistic(fit_half, nullptr, opts); });
            MixingPolicy policy;
            result.timings.post = time_section([&] {
                std::vector<int> calib_preds = predict_label(model, calib_half);
                policy = hardt_fit(calib_half.label(), calib_preds, calib_half.sensitive());
            });
            std::uint64_t seed = spec.seed;
            result.predictor = [model, policy, seed](const Dataset& d) {
                return hardt_apply(policy, predict_label(model, d), d.sensitive(), seed);
            };
            break;
        }
        case Approach::Pleiss: {
            auto [fit_half, calib_half] =
                split(train, SplitPlan{0.5, splitmix64(spec.seed ^ 0xca11bULL)});
            TrainedModel model;
            result.timings.train =
                time_section([&] { model = fit_logistic(fit_half, nullptr, opts); });
            CalibrationPolicy policy;
            result.timings.post = time_section([&] {
                std::vector<double> calib_proba = predict_proba(model, calib_half);
                policy = pleiss_fit(calib_half.label(), calib_proba, calib_half.sensitive());
            });
            std::uint64_t seed = spec.seed;
            result.predictor = [model, policy, seed](const Dataset& d) {
                return pleiss_apply(policy, predict_label(model, d), d.sensitive(), seed);
            };
            break;
        }
    }

    // Post-processing application to the test predictions is part of the
    // approach's cost; for the other stages this is plain model prediction
    // and is excluded (common to every approach, ORIG included).
    if (spec.stage() == Stage::Post) {
        std::vector<int> preds;
        result.timings.post += time_section([&] { preds = result.predictor(test); });
        result.test_predictions = std::move(preds);
    } else {
        result.test_predictions = result.predictor(test);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Benchmark records
// ---------------------------------------------------------------------------

struct SliceDesc {
    std::string dataset;
    std::size_t rows = 0;
    std::size_t attributes = 0;
    int fold = -1;
};

struct BenchmarkRecord {
    std::string spec_id;
    std::string approach;
    std::string stage;
    std::string hyperparams;  // compact JSON
    std::uint64_t seed = 0;
    SliceDesc slice;
    Correctness correctness;
    FairnessReport fairness;
    Maybe cv_accuracy;
    double wall_pre = 0.0;
    double wall_train = 0.0;
    double wall_post = 0.0;
    double wall_total = 0.0;
    Maybe wall_overhead;
    std::string error;  // nonempty when the pipeline failed

    bool ok() const { return error.empty(); }
};

struct EvaluateOptions {
    int cv_folds = 3;  // 0 disables the cross-validation diagnostic
    CdSettings cd;
    std::vector<std::string> resolving;  // empty = dataset's resolving candidates
    int timing_repeats = 1;              // median-of-k wall clock
    std::string dataset_label = "data";
};

namespace detail {

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline Timings median_timings(const std::vector<Timings>& runs) {
    std::vector<double> pre, train, post;
    for (const auto& t : runs) {
        pre.push_back(t.pre);
        train.push_back(t.train);
        post.push_back(t.post);
    }
    return {median(pre), median(train), median(post)};
}

}  // namespace detail

inline BenchmarkRecord evaluate_one(const PipelineSpec& spec, const Dataset& train,
                                    const Dataset& test, const EvaluateOptions& opts,
                                    const Dataset& full_slice) {
    BenchmarkRecord rec;
    rec.spec_id = spec.id_string();
    rec.approach = to_string(spec.approach);
    rec.stage = to_string(spec.stage());
    rec.hyperparams = nlohmann::json(spec.hyperparams).dump();
    rec.seed = spec.seed;
    rec.slice = {opts.dataset_label, full_slice.n_rows(), full_slice.n_predictive(), -1};

    std::vector<Timings> runs;
    PipelineResult result = run_pipeline(spec, train, test);
    runs.push_back(result.timings);
    for (int k = 1; k < opts.timing_repeats; ++k)
        runs.push_back(run_pipeline(spec, train, test).timings);
    Timings t = detail::median_timings(runs);
    rec.wall_pre = t.pre;
    rec.wall_train = t.train;
    rec.wall_post = t.post;
    rec.wall_total = t.total();

    rec.correctness = correctness_metrics(confusion(test.label(), result.test_predictions));
    std::vector<std::string> resolving =
        opts.resolving.empty() ? test.resolving_candidates() : opts.resolving;
    rec.fairness = compute_fairness_report(test, result.test_predictions, result.predictor,
                                           resolving, opts.cd, spec.seed);

    if (opts.cv_folds >= 2) {  // plan.folds, when set, overrides this upstream
        double acc_sum = 0.0;
        int acc_n = 0;
        for (auto& [cv_train, cv_val] : kfold(train, opts.cv_folds, spec.seed)) {
            PipelineResult cv = run_pipeline(spec, cv_train, cv_val);
            Correctness c = correctness_metrics(confusion(cv_val.label(), cv.test_predictions));
            if (c.accuracy) {
                acc_sum += *c.accuracy;
                ++acc_n;
            }
        }
        if (acc_n > 0) rec.cv_accuracy = acc_sum / acc_n;
    }
    return rec;
}

// Runs every spec on the plan's train/test split and scores the test side
// with all nine metrics. An ORIG pipeline always runs on the same slice and
// seed for overhead pairing, whether or not it was requested; per-spec
// failures are recorded and the run continues.
inline std::vector<BenchmarkRecord> evaluate(const std::vector<PipelineSpec>& specs,
                                             const Dataset& data, const SplitPlan& plan,
                                             EvaluateOptions opts = {}) {
    auto [train, test] = split(data, plan);
    if (plan.folds) opts.cv_folds = *plan.folds;

    PipelineSpec orig_spec;
    orig_spec.approach = Approach::Orig;
    orig_spec.seed = plan.seed;
    BenchmarkRecord orig_rec = evaluate_one(orig_spec, train, test, opts, data);
    orig_rec.wall_overhead = 0.0;

    std::vector<BenchmarkRecord> records;
    for (const PipelineSpec& spec : specs) {
        if (spec.approach == Approach::Orig && spec.seed == plan.seed) {
            records.push_back(orig_rec);
            continue;
        }
        try {
            BenchmarkRecord rec = evaluate_one(spec, train, test, opts, data);
            rec.wall_overhead = rec.wall_total - orig_rec.wall_total;
            records.push_back(std::move(rec));
        } catch (const Error& e) {
            BenchmarkRecord rec;
            rec.spec_id = spec.id_string();
            rec.approach = to_string(spec.approach);
            rec.stage = to_string(spec.stage());
            rec.hyperparams = nlohmann::json(spec.hyperparams).dump();
            rec.seed = spec.seed;
            rec.slice = {opts.dataset_label, data.n_rows(), data.n_predictive(), -1};
            rec.error = std::string("stage ") + to_string(spec.stage()) + ": " + e.what();
            records.push_back(std::move(rec));
        }
    }
    return records;
}

// Overhead = record.total - matched ORIG total on the identical slice and
// seed. May be negative from measurement noise; reported as-is.
inline double measure_overhead(const PipelineSpec& spec, const BenchmarkRecord& orig_record,
                               const BenchmarkRecord& record) {
    if (orig_record.approach != "orig") throw PairingError("baseline record is not orig");
    if (orig_record.slice.dataset != record.slice.dataset ||
        orig_record.slice.rows != record.slice.rows ||
        orig_record.slice.attributes != record.slice.attributes ||
        orig_record.slice.fold != record.slice.fold)
        throw PairingError("records are not from the same slice");
    if (orig_record.seed != record.seed) throw PairingError("records are not from the same seed");
    if (record.spec_id != spec.id_string())
        throw PairingError("record does not belong to the given spec");
    return record.wall_total - orig_record.wall_total;
}

enum class SweepAxis { Rows, Attributes };

// Rows axis: subsample per point. Attributes axis: project onto the top-k
// attributes by information gain. A fresh pipeline instance runs per point.
inline std::vector<BenchmarkRecord> scalability_sweep(const std::vector<PipelineSpec>& specs,
                                                      const Dataset& data, SweepAxis axis,
                                                      const std::vector<std::size_t>& points,
                                                      std::uint64_t seed,
                                                      EvaluateOptions opts = {}) {
    if (points.empty()) throw ParameterError("sweep needs at least one point");
    if (!std::is_sorted(points.begin(), points.end()))
        throw ParameterError("sweep points must be sorted ascending");
    std::vector<AttributeGain> ranked;
    if (axis == SweepAxis::Attributes) ranked = rank_by_information_gain(data);
    for (std::size_t p : points) {
        if (axis == SweepAxis::Rows && (p == 0 || p > data.n_rows()))
            throw ParameterError("row point " + std::to_string(p) + " out of bounds");
        if (axis == SweepAxis::Attributes && (p == 0 || p > ranked.size()))
            throw ParameterError("attribute point " + std::to_string(p) + " out of bounds");
    }

    std::vector<BenchmarkRecord> all;
    for (std::size_t p : points) {
        Dataset slice = [&] {
            if (axis == SweepAxis::Rows) return subsample_rows(data, p, seed);
            std::vector<std::string> keep;
            for (std::size_t i = 0; i < p; ++i) keep.push_back(ranked[i].name);
            return project_attributes(data, keep);
        }();
        std::vector<BenchmarkRecord> records =
            evaluate(specs, slice, SplitPlan{0.7, seed}, opts);
        for (auto& r : records) all.push_back(std::move(r));
    }
    return all;
}

struct ScoreStats {
    double mean = 0.0;
    double variance = 0.0;  // sample variance
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

inline ScoreStats summarize_scores(const std::vector<double>& scores) {
    ScoreStats st;
    st.count = scores.size();
    if (scores.empty()) return st;
    st.min = scores[0];
    st.max = scores[0];
    for (double v : scores) {
        st.mean += v;
        st.min = std::min(st.min, v);
        st.max = std::max(st.max, v);
    }
    st.mean /= static_cast<double>(scores.size());
    // Identical scores have exactly zero variance; recomputing through the
    // rounded mean would leave dust of order ulp^2.
    if (scores.size() > 1 && st.min != st.max) {
        double ss = 0.0;
        for (double v : scores) ss += (v - st.mean) * (v - st.mean);
        st.variance = ss / static_cast<double>(scores.size() - 1);
    }
    return st;
}

struct StabilitySummary {
    std::string spec_id;
    std::map<std::string, ScoreStats> per_metric;
};

struct StabilityResult {
    std::vector<BenchmarkRecord> records;  // repeats x specs
    std::vector<StabilitySummary> summaries;
};

namespace detail {

inline std::map<std::string, Maybe> metric_map(const BenchmarkRecord& r) {
    return {{"accuracy", r.correctness.accuracy},
            {"precision", r.correctness.precision},
            {"recall", r.correctness.recall},
            {"f1", r.correctness.f1},
            {"di_star", r.fairness.normalized.di},
            {"tprb_norm", r.fairness.normalized.tprb},
            {"tnrb_norm", r.fairness.normalized.tnrb},
            {"cd_norm", r.fairness.normalized.cd},
            {"crd_norm", r.fairness.normalized.crd}};
}

}  // namespace detail

// Repeated random folds (default 10 repeats, 2/3 train) with derived seeds
// seed + repeat index; per spec and metric reports mean, sample variance,
// min, max. vary_seed=false repeats the identical partition, which makes a
// deterministic spec's variance exactly zero.
inline StabilityResult stability_suite(const std::vector<PipelineSpec>& specs,
                                       const Dataset& data, int repeats = 10,
                                       double train_fraction = 2.0 / 3.0,
                                       std::uint64_t seed = 0, bool vary_seed = true,
                                       EvaluateOptions opts = {}) {
    if (repeats < 2) throw ParameterError("stability needs repeats >= 2");
    opts.cv_folds = 0;
    StabilityResult result;
    std::map<std::string, std::map<std::string, std::vector<double>>> scores;
    std::vector<std::string> spec_order;
    for (int r = 0; r < repeats; ++r) {
        std::uint64_t run_seed = vary_seed ? seed + static_cast<std::uint64_t>(r) : seed;
        std::vector<PipelineSpec> run_specs = specs;
        for (auto& s : run_specs) s.seed = run_seed;
        std::vector<BenchmarkRecord> records =
            evaluate(run_specs, data, SplitPlan{train_fraction, run_seed}, opts);
        for (auto& rec : records) {
            rec.slice.fold = r;
            if (!scores.count(rec.spec_id)) spec_order.push_back(rec.spec_id);
            if (rec.ok())
                for (const auto& [name, value] : detail::metric_map(rec))
                    if (value) scores[rec.spec_id][name].push_back(*value);
            result.records.push_back(std::move(rec));
        }
    }
    for (const auto& id : spec_order) {
        StabilitySummary summary;
        summary.spec_id = id;
        for (const auto& [metric, values] : scores[id])
            summary.per_metric[metric] = summarize_scores(values);
        result.summaries.push_back(std::move(summary));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Report emission: CSV / JSON-lines with bit-stable field ordering.
// ---------------------------------------------------------------------------

enum class ReportFormat { Csv, Jsonl };

inline ReportFormat report_format_from_string(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "jsonl") return ReportFormat::Jsonl;
    throw ParameterError("unknown report format '" + s + "'");
}

namespace detail {

inline const std::vector<std::string>& record_columns() {
    static const std::vector<std::string> cols = {
        "spec_id",    "approach",  "stage",      "hyperparams", "seed",
        "dataset",    "rows",      "attributes", "fold",        "accuracy",
        "precision",  "recall",    "f1",         "di",          "tprb",
        "tnrb",       "cd",        "crd",        "di_star",     "tprb_norm",
        "tnrb_norm",  "cd_norm",   "crd_norm",   "rev_di",      "rev_tprb",
        "rev_tnrb",   "rev_crd",   "cv_accuracy", "wall_pre",   "wall_train",
        "wall_post",  "wall_total", "wall_overhead", "error"};
    return cols;
}

inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::strtod(s.c_str(), nullptr);
}

inline std::string field_value(const BenchmarkRecord& r, const std::string& col) {
    auto opt = [](const Maybe& m) { return m ? format_double(*m) : std::string(); };
    if (col == "spec_id") return r.spec_id;
    if (col == "approach") return r.approach;
    if (col == "stage") return r.stage;
    if (col == "hyperparams") return r.hyperparams;
    if (col == "seed") return std::to_string(r.seed);
    if (col == "dataset") return r.slice.dataset;
    if (col == "rows") return std::to_string(r.slice.rows);
    if (col == "attributes") return std::to_string(r.slice.attributes);
    if (col == "fold") return std::to_string(r.slice.fold);
    if (col == "accuracy") return opt(r.correctness.accuracy);
    if (col == "precision") return opt(r.correctness.precision);
    if (col == "recall") return opt(r.correctness.recall);
    if (col == "f1") return opt(r.correctness.f1);
    if (col == "di") return opt(r.fairness.di);
    if (col == "tprb") return opt(r.fairness.tprb);
    if (col == "tnrb") return opt(r.fairness.tnrb);
    if (col == "cd") return opt(r.fairness.cd);
    if (col == "crd") return opt(r.fairness.crd);
    if (col == "di_star") return opt(r.fairness.normalized.di);
    if (col == "tprb_norm") return opt(r.fairness.normalized.tprb);
    if (col == "tnrb_norm") return opt(r.fairness.normalized.tnrb);
    if (col == "cd_norm") return opt(r.fairness.normalized.cd);
    if (col == "crd_norm") return opt(r.fairness.normalized.crd);
    if (col == "rev_di") return r.fairness.reverse.di ? "1" : "0";
    if (col == "rev_tprb") return r.fairness.reverse.tprb ? "1" : "0";
    if (col == "rev_tnrb") return r.fairness.reverse.tnrb ? "1" : "0";
    if (col == "rev_crd") return r.fairness.reverse.crd ? "1" : "0";
    if (col == "cv_accuracy") return opt(r.cv_accuracy);
    if (col == "wall_pre") return format_double(r.wall_pre);
    if (col == "wall_train") return format_double(r.wall_train);
    if (col == "wall_post") return format_double(r.wall_post);
    if (col == "wall_total") return format_double(r.wall_total);
    if (col == "wall_overhead") return opt(r.wall_overhead);
    if (col == "error") return r.error;
    throw InputError("unknown record column " + col);
}

inline void set_field(BenchmarkRecord& r, const std::string& col, const std::string& v) {
    auto opt = [&](Maybe& m) {
        if (!v.empty()) m = parse_double(v);
    };
    if (col == "spec_id") r.spec_id = v;
    else if (col == "approach") r.approach = v;
    else if (col == "stage") r.stage = v;
    else if (col == "hyperparams") r.hyperparams = v;
    else if (col == "seed") r.seed = std::strtoull(v.c_str(), nullptr, 10);
    else if (col == "dataset") r.slice.dataset = v;
    else if (col == "rows") r.slice.rows = std::strtoull(v.c_str(), nullptr, 10);
    else if (col == "attributes") r.slice.attributes = std::strtoull(v.c_str(), nullptr, 10);
    else if (col == "fold") r.slice.fold = std::atoi(v.c_str());
    else if (col == "accuracy") opt(r.correctness.accuracy);
    else if (col == "precision") opt(r.correctness.precision);
    else if (col == "recall") opt(r.correctness.recall);
    else if (col == "f1") opt(r.correctness.f1);
    else if (col == "di") opt(r.fairness.di);
    else if (col == "tprb") opt(r.fairness.tprb);
    else if (col == "tnrb") opt(r.fairness.tnrb);
    else if (col == "cd") opt(r.fairness.cd);
    else if (col == "crd") opt(r.fairness.crd);
    else if (col == "di_star") opt(r.fairness.normalized.di);
    else if (col == "tprb_norm") opt(r.fairness.normalized.tprb);
    else if (col == "tnrb_norm") opt(r.fairness.normalized.tnrb);
    else if (col == "cd_norm") opt(r.fairness.normalized.cd);
    else if (col == "crd_norm") opt(r.fairness.normalized.crd);
    else if (col == "rev_di") r.fairness.reverse.di = v == "1";
    else if (col == "rev_tprb") r.fairness.reverse.tprb = v == "1";
    else if (col == "rev_tnrb") r.fairness.reverse.tnrb = v == "1";
    else if (col == "rev_crd") r.fairness.reverse.crd = v == "1";
    else if (col == "cv_accuracy") opt(r.cv_accuracy);
    else if (col == "wall_pre") r.wall_pre = parse_double(v);
    else if (col == "wall_train") r.wall_train = parse_double(v);
    else if (col == "wall_post") r.wall_post = parse_double(v);
    else if (col == "wall_total") r.wall_total = parse_double(v);
    else if (col == "wall_overhead") opt(r.wall_overhead);
    else if (col == "error") r.error = v;
    else throw InputError("unknown record column " + col);
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace detail

inline void emit_report(const std::vector<BenchmarkRecord>& records, ReportFormat format,
                        const std::string& path) {
    if (records.empty()) throw InputError("no records to emit");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    const auto& cols = detail::record_columns();
    if (format == ReportFormat::Csv) {
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
        out << "\n";
        for (const auto& r : records) {
            for (std::size_t i = 0; i < cols.size(); ++i)
                out << (i ? "," : "") << detail::csv_escape(detail::field_value(r, cols[i]));
            out << "\n";
        }
    } else {
        for (const auto& r : records) {
            nlohmann::json j = nlohmann::json::object();
            for (const auto& col : cols) {
                std::string v = detail::field_value(r, col);
                if (v.empty() && col != "error" && col != "hyperparams")
                    j[col] = nullptr;
                else
                    j[col] = v;
            }
            out << j.dump() << "\n";
        }
    }
    if (!out) throw IoError("write failed for " + path);
}

inline std::vector<BenchmarkRecord> read_records(const std::string& path, ReportFormat format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<BenchmarkRecord> records;
    std::string line;
    if (format == ReportFormat::Csv) {
        if (!std::getline(in, line)) throw IngestionError(path + " is empty");
        std::vector<std::string> header = detail::parse_csv_line(line, '"');
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> fields = detail::parse_csv_line(line, '"');
            if (fields.size() != header.size())
                throw IngestionError("record row arity mismatch in " + path);
            BenchmarkRecord r;
            for (std::size_t i = 0; i < header.size(); ++i)
                detail::set_field(r, header[i], fields[i]);
            records.push_back(std::move(r));
        }
    } else {
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line);
            BenchmarkRecord r;
            for (auto& [key, value] : j.items()) {
                if (value.is_null()) continue;
                detail::set_field(r, key, value.get<std::string>());
            }
            records.push_back(std::move(r));
        }
    }
    return records;
}

}  // namespace fairbench

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fairbench/common.hpp"
#include "fairbench/dataset.hpp"
#include "fairbench/model.hpp"
#include "fairbench/rng.hpp"

namespace fairbench {

struct ConfusionMatrix {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    long long total() const { return tp + fp + fn + tn; }
};

inline ConfusionMatrix confusion(const std::vector<int>& labels,
                                 const std::vector<int>& predictions) {
    if (labels.size() != predictions.size())
        throw InputError("labels/predictions length mismatch");
    if (labels.empty()) throw InputError("confusion over empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (predictions[i] == 1)
            (labels[i] == 1 ? cm.tp : cm.fp)++;
        else
            (labels[i] == 1 ? cm.fn : cm.tn)++;
    }
    return cm;
}

struct Correctness {
    Maybe accuracy, precision, recall, f1;
};

// Zero-denominator ratios are reported absent, not as 0.
inline Correctness correctness_metrics(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) throw InputError("correctness over empty confusion matrix");
    Correctness c;
    c.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fp > 0)
        c.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    if (cm.tp + cm.fn > 0)
        c.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    if (c.precision && c.recall && (*c.precision + *c.recall) > 0.0)
        c.f1 = 2.0 * *c.precision * *c.recall / (*c.precision + *c.recall);
    return c;
}

enum class Group { Unprivileged = 0, Privileged = 1 };

struct GroupOutcome {
    Group group = Group::Unprivileged;
    ConfusionMatrix confusion;
    Maybe positive_rate;  // Pr(Yhat=1 | S=s)
    Maybe tpr, tnr, fpr, fnr;
};

inline GroupOutcome group_outcome(Group g, const std::vector<int>& s,
                                  const std::vector<int>& labels,
                                  const std::vector<int>& predictions) {
    if (s.size() != labels.size() || s.size() != predictions.size())
        throw InputError("group_outcome length mismatch");
    GroupOutcome out;
    out.group = g;
    int want = g == Group::Privileged ? 1 : 0;
    long long members = 0, positive_preds = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != want) continue;
        ++members;
        positive_preds += predictions[i] == 1;
        if (predictions[i] == 1)
            (labels[i] == 1 ? out.confusion.tp : out.confusion.fp)++;
        else
            (labels[i] == 1 ? out.confusion.fn : out.confusion.tn)++;
    }
    if (members == 0) throw InputError("empty sensitive group");
    out.positive_rate = static_cast<double>(positive_preds) / static_cast<double>(members);
    const ConfusionMatrix& cm = out.confusion;
    if (cm.tp + cm.fn > 0) {
        out.tpr = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
        out.fnr = static_cast<double>(cm.fn) / static_cast<double>(cm.tp + cm.fn);
    }
    if (cm.tn + cm.fp > 0) {
        out.tnr = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
        out.fpr = static_cast<double>(cm.fp) / static_cast<double>(cm.tn + cm.fp);
    }
    return out;
}

// DI = Pr(Yhat=1|S=0) / Pr(Yhat=1|S=1). A zero privileged positive rate
// yields the +infinity sentinel.
inline double disparate_impact(const std::vector<int>& s, const std::vector<int>& predictions) {
    if (s.size() != predictions.size()) throw InputError("disparate_impact length mismatch");
    long long n0 = 0, n1 = 0, pos0 = 0, pos1 = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == 1) {
            ++n1;
            pos1 += predictions[i] == 1;
        } else {
            ++n0;
            pos0 += predictions[i] == 1;
        }
    }
    if (n0 == 0 || n1 == 0) throw InputError("empty sensitive group");
    double r0 = static_cast<double>(pos0) / static_cast<double>(n0);
    double r1 = static_cast<double>(pos1) / static_cast<double>(n1);
    if (r1 == 0.0) return std::numeric_limits<double>::infinity();
    return r0 / r1;
}

struct RateBalances {
    Maybe tprb;  // TPR_priv - TPR_unpriv
    Maybe tnrb;  // TNR_priv - TNR_unpriv
};

inline RateBalances rate_balances(const std::vector<int>& s, const std::vector<int>& labels,
                                  const std::vector<int>& predictions) {
    GroupOutcome unpriv = group_outcome(Group::Unprivileged, s, labels, predictions);
    GroupOutcome priv = group_outcome(Group::Privileged, s, labels, predictions);
    RateBalances rb;
    if (priv.tpr && unpriv.tpr) rb.tprb = *priv.tpr - *unpriv.tpr;
    if (priv.tnr && unpriv.tnr) rb.tnrb = *priv.tnr - *unpriv.tnr;
    return rb;
}

// ---------------------------------------------------------------------------
// Causal discrimination
// ---------------------------------------------------------------------------

// A pipeline's realized prediction function over (X, S): batch predictions on
// a dataset. Randomized post-processors must be frozen to a fixed seed so the
// function is deterministic.
using BatchPredictor = std::function<std::vector<int>(const Dataset&)>;

inline std::size_t hoeffding_sample_size(double confidence, double error_bound) {
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ParameterError("confidence must be in (0,1)");
    if (!(error_bound > 0.0 && error_bound < 1.0))
        throw ParameterError("error_bound must be in (0,1)");
    double n = std::log(2.0 / (1.0 - confidence)) / (2.0 * error_bound * error_bound);
    return static_cast<std::size_t>(std::ceil(n));
}

// Fraction of tuples whose prediction changes when only S is flipped. If the
// Hoeffding sample size is below |data|, a seed-deterministic sample of that
// size is scored; otherwise every tuple is.
inline double causal_discrimination(const BatchPredictor& predict, const Dataset& data,
                                    double confidence, double error_bound,
                                    std::uint64_t seed) {
    std::size_t n = data.n_rows();
    std::size_t needed = hoeffding_sample_size(confidence, error_bound);

    std::vector<int> base = predict(data);
    if (base.size() != n) throw ContractError("predictor returned wrong arity");
    if (predict(data) != base)
        throw ContractError(
            "prediction function is not deterministic; freeze its seed before measuring CD");

    std::vector<int> flipped_s = data.sensitive();
    for (int& v : flipped_s) v = 1 - v;
    Dataset flipped = data.with_sensitive(std::move(flipped_s), "cd: sensitive flipped");
    std::vector<int> alt = predict(flipped);
    if (alt.size() != n) throw ContractError("predictor returned wrong arity on flipped data");

    std::vector<std::size_t> rows;
    if (needed < n) {
        DetRng rng(splitmix64(seed ^ 0xcdcdcdcdULL));
        rows = sample_without_replacement(n, needed, rng);
    } else {
        rows = identity_permutation(n);
    }
    std::size_t changed = 0;
    for (std::size_t r : rows) changed += base[r] != alt[r];
    return static_cast<double>(changed) / static_cast<double>(rows.size());
}

// ---------------------------------------------------------------------------
// Causal risk difference
// ---------------------------------------------------------------------------

struct PropensityWeights {
    std::vector<std::string> resolving;
    std::vector<double> score;   // Pr(S=0 | resolving attributes)
    std::vector<double> weight;  // score / (1 - score)

    // Scores are clipped from above at 1-1e-6 before the odds transform so
    // weights stay finite; a score of exactly 0 keeps weight 0.
    static PropensityWeights from_scores(std::vector<std::string> resolving,
                                         std::vector<double> scores) {
        PropensityWeights pw;
        pw.resolving = std::move(resolving);
        pw.score = std::move(scores);
        pw.weight.reserve(pw.score.size());
        for (double& p : pw.score) {
            p = std::min(p, 1.0 - 1e-6);
            pw.weight.push_back(p / (1.0 - p));
        }
        return pw;
    }

    // Direct weight injection, for worked-example checks where the odds
    // transform's rounding would perturb exact arithmetic.
    static PropensityWeights from_weights(std::vector<std::string> resolving,
                                          std::vector<double> weights) {
        PropensityWeights pw;
        pw.resolving = std::move(resolving);
        pw.weight = std::move(weights);
        pw.score.reserve(pw.weight.size());
        for (double w : pw.weight) pw.score.push_back(w / (1.0 + w));
        return pw;
    }
};

inline PropensityWeights propensity_weights(const Dataset& data,
                                            const std::vector<std::string>& resolving,
                                            const TrainOptions& opts = {}) {
    if (resolving.empty()) throw ParameterError("resolving attribute set is empty");
    Dataset projected = project_attributes(data, resolving);
    // Regress indicator(S=0) on the resolving attributes; reuse the logistic
    // trainer by relabeling.
    std::vector<int> target(data.n_rows());
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = data.sensitive()[i] == 0 ? 1 : 0;
    std::vector<std::vector<double>> cols(projected.n_attributes());
    for (std::size_t a = 0; a < projected.n_attributes(); ++a) cols[a] = projected.column(a);
    Dataset relabeled(projected.schema(), std::move(cols), projected.sensitive(),
                      std::move(target), "propensity fit target: indicator(S=0)");
    TrainedModel fit = fit_logistic(relabeled, nullptr, opts);
    return PropensityWeights::from_scores(resolving, predict_proba(fit, relabeled));
}

// CRD = sum w(t)[S=1 ^ Yhat=1] / sum w(t)[S=1]  -  Pr(Yhat=1 | S=0).
// Absent when the weighted privileged mass is zero.
inline Maybe causal_risk_difference(const Dataset& data, const std::vector<int>& predictions,
                                    const PropensityWeights& weights) {
    std::size_t n = data.n_rows();
    if (predictions.size() != n || weights.weight.size() != n)
        throw InputError("causal_risk_difference arity mismatch");
    double num = 0.0, den = 0.0;
    long long unpriv = 0, unpriv_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (data.sensitive()[i] == 1) {
            den += weights.weight[i];
            if (predictions[i] == 1) num += weights.weight[i];
        } else {
            ++unpriv;
            unpriv_pos += predictions[i] == 1;
        }
    }
    if (unpriv == 0) throw InputError("unprivileged group is empty");
    if (!(den > 0.0)) return std::nullopt;  // zero weighted privileged mass
    return num / den - static_cast<double>(unpriv_pos) / static_cast<double>(unpriv);
}

// ---------------------------------------------------------------------------
// Report and normalization
// ---------------------------------------------------------------------------

struct FairnessReport {
    Maybe di, tprb, tnrb, cd, crd;

    struct Normalized {
        Maybe di, tprb, tnrb, cd, crd;
    } normalized;

    // Set when the signed raw value favors the unprivileged group.
    struct ReverseFlags {
        bool di = false, tprb = false, tnrb = false, crd = false;
    } reverse;
};

// DI* = min(DI, 1/DI); balances and CRD map to 1-|raw|; CD maps to 1-CD.
inline void normalize_fairness(FairnessReport& report) {
    if (report.di) {
        double di = *report.di;
        if (std::isinf(di) || di == 0.0)
            report.normalized.di = 0.0;
        else
            report.normalized.di = std::min(di, 1.0 / di);
        report.reverse.di = di > 1.0;
    }
    if (report.tprb) {
        report.normalized.tprb = 1.0 - std::abs(*report.tprb);
        report.reverse.tprb = *report.tprb < 0.0;
    }
    if (report.tnrb) {
        report.normalized.tnrb = 1.0 - std::abs(*report.tnrb);
        report.reverse.tnrb = *report.tnrb < 0.0;
    }
    if (report.cd) report.normalized.cd = 1.0 - *report.cd;
    if (report.crd) {
        report.normalized.crd = 1.0 - std::abs(*report.crd);
        report.reverse.crd = *report.crd < 0.0;
    }
}

struct CdSettings {
    double confidence = 0.99;
    double error_bound = 0.01;
};

// Assemble the five fairness metrics for a scored dataset. CD needs the
// pipeline's (frozen) prediction function; CRD needs nonempty resolving
// attributes, otherwise it is reported absent.
inline FairnessReport compute_fairness_report(const Dataset& data,
                                              const std::vector<int>& predictions,
                                              const BatchPredictor& predictor,
                                              const std::vector<std::string>& resolving,
                                              const CdSettings& cd = {},
                                              std::uint64_t seed = 0) {
    FairnessReport report;
    report.di = disparate_impact(data.sensitive(), predictions);
    RateBalances rb = rate_balances(data.sensitive(), data.label(), predictions);
    report.tprb = rb.tprb;
    report.tnrb = rb.tnrb;
    if (predictor)
        report.cd = causal_discrimination(predictor, data, cd.confidence, cd.error_bound, seed);
    if (!resolving.empty()) {
        PropensityWeights pw = propensity_weights(data, resolving);
        report.crd = causal_risk_difference(data, predictions, pw);
    }
    normalize_fairness(report);
    return report;
}

}  // namespace fairbench

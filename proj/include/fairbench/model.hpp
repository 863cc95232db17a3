#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fairbench/common.hpp"
#include "fairbench/dataset.hpp"

namespace fairbench {

struct TrainOptions {
    double learning_rate = 0.1;
    int max_epochs = 5000;
    double tolerance = 1e-6;  // gradient-norm stop
    double l2_penalty = 1e-4;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(learning_rate > 0.0)) throw ParameterError("learning_rate must be positive");
        if (max_epochs < 1) throw ParameterError("max_epochs must be >= 1");
        if (!(tolerance > 0.0)) throw ParameterError("tolerance must be positive");
        if (l2_penalty < 0.0) throw ParameterError("l2_penalty must be nonnegative");
    }
};

// Standardization statistics plus the encoded-feature layout, fitted on the
// training split and frozen into the model. One-hot indicator columns are
// passed through unscaled.
struct FeatureEncoder {
    std::vector<EncodedFeature> features;
    std::vector<std::string> attr_names;  // source attribute name per feature
    std::vector<double> mean;
    std::vector<double> stdev;

    static FeatureEncoder fit(const Dataset& train) {
        EncodedMatrix m = train.encode();
        FeatureEncoder enc;
        enc.features = m.features;
        for (const auto& f : m.features) enc.attr_names.push_back(train.attribute(f.attr_index).name);
        enc.mean.assign(m.cols, 0.0);
        enc.stdev.assign(m.cols, 1.0);
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (m.features[c].category >= 0) continue;  // one-hot left as 0/1
            double sum = 0.0;
            for (std::size_t r = 0; r < m.rows; ++r) sum += m.at(r, c);
            double mu = sum / static_cast<double>(m.rows);
            double ss = 0.0;
            for (std::size_t r = 0; r < m.rows; ++r) {
                double d = m.at(r, c) - mu;
                ss += d * d;
            }
            double sd = std::sqrt(ss / static_cast<double>(m.rows));
            enc.mean[c] = mu;
            enc.stdev[c] = sd > 0.0 ? sd : 1.0;
        }
        return enc;
    }

    // Encode a dataset against this layout. The dataset must expose the same
    // predictive attributes (names, kinds, category dictionaries).
    EncodedMatrix transform(const Dataset& data) const {
        EncodedMatrix m = data.encode();
        if (m.cols != features.size())
            throw SchemaError("feature arity mismatch: model expects " +
                              std::to_string(features.size()) + " encoded features, data has " +
                              std::to_string(m.cols));
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (data.attribute(m.features[c].attr_index).name != attr_names[c] ||
                m.features[c].category != features[c].category)
                throw SchemaError("feature layout mismatch at encoded column " +
                                  std::to_string(c));
        }
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (features[c].category >= 0) continue;
            for (std::size_t r = 0; r < m.rows; ++r)
                m.at(r, c) = (m.at(r, c) - mean[c]) / stdev[c];
        }
        return m;
    }
};

struct TrainedModel {
    std::vector<double> theta;  // coefficients, intercept last
    double training_loss = 0.0;
    std::vector<std::string> feature_names;
    FeatureEncoder encoder;
    std::vector<double> loss_history;  // accepted epochs, for diagnostics
    bool degenerate = false;           // all-one-class training labels
    std::string warning;

    std::size_t n_features() const { return theta.empty() ? 0 : theta.size() - 1; }
};

namespace detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + e^z) without overflow.
inline double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

struct GdTrace {
    std::vector<double> loss_history;
    double final_grad_norm = 0.0;
    bool converged = false;
};

// Full-batch gradient descent with backtracking halving: a step is accepted
// only if it does not increase the objective, so the loss trace is
// non-increasing. Deterministic for fixed inputs.
template <typename Objective>
GdTrace minimize(Objective&& objective, std::vector<double>& theta, const TrainOptions& opts) {
    GdTrace trace;
    std::size_t d = theta.size();
    std::vector<double> grad(d), cand(d);
    double lr = opts.learning_rate;
    double loss = objective(theta, grad);
    trace.loss_history.push_back(loss);
    for (int epoch = 0; epoch < opts.max_epochs; ++epoch) {
        double gnorm = 0.0;
        for (double g : grad) gnorm += g * g;
        gnorm = std::sqrt(gnorm);
        trace.final_grad_norm = gnorm;
        if (gnorm < opts.tolerance) {
            trace.converged = true;
            break;
        }
        std::vector<double> cand_grad(d);
        double cand_loss = 0.0;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            for (std::size_t j = 0; j < d; ++j) cand[j] = theta[j] - lr * grad[j];
            cand_loss = objective(cand, cand_grad);
            if (std::isfinite(cand_loss) && cand_loss <= loss) {
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if (!accepted) break;  // stalled at numeric resolution
        theta = cand;
        grad = cand_grad;
        loss = cand_loss;
        trace.loss_history.push_back(loss);
        if (lr < opts.learning_rate) lr = std::min(lr * 1.2, opts.learning_rate);
    }
    return trace;
}

struct LogisticProblem {
    EncodedMatrix x;          // standardized
    std::vector<double> y;    // 0/1 as double
    std::vector<double> w;    // per-row weights, normalized to sum 1
    double l2 = 0.0;

    std::size_t dim() const { return x.cols + 1; }

    double linear_score(const std::vector<double>& theta, std::size_t r) const {
        double z = theta[x.cols];  // intercept
        for (std::size_t c = 0; c < x.cols; ++c) z += theta[c] * x.at(r, c);
        return z;
    }

    // Weighted negative log-likelihood plus l2 ridge over the full theta.
    double operator()(const std::vector<double>& theta, std::vector<double>& grad) const {
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) {
            double z = linear_score(theta, r);
            loss += w[r] * (log1pexp(z) - y[r] * z);
            double resid = w[r] * (sigmoid(z) - y[r]);
            for (std::size_t c = 0; c < x.cols; ++c) grad[c] += resid * x.at(r, c);
            grad[x.cols] += resid;
        }
        for (std::size_t j = 0; j < theta.size(); ++j) {
            loss += l2 * theta[j] * theta[j];
            grad[j] += 2.0 * l2 * theta[j];
        }
        return loss;
    }
};

inline LogisticProblem build_problem(const Dataset& train, const FeatureEncoder& enc,
                                     const std::vector<double>* weights, double l2) {
    LogisticProblem p;
    p.x = enc.transform(train);
    for (double v : p.x.values)
        if (!std::isfinite(v)) throw NumericError("non-finite feature value in training data");
    std::size_t n = train.n_rows();
    p.y.reserve(n);
    for (int v : train.label()) p.y.push_back(static_cast<double>(v));
    if (weights) {
        if (weights->size() != n) throw ParameterError("weight vector arity mismatch");
        double total = 0.0;
        for (double w : *weights) {
            if (w < 0.0) throw ParameterError("weights must be nonnegative");
            total += w;
        }
        if (!(total > 0.0)) throw ParameterError("weights must have positive sum");
        p.w.reserve(n);
        for (double w : *weights) p.w.push_back(w / total);
    } else {
        p.w.assign(n, 1.0 / static_cast<double>(n));
    }
    p.l2 = l2;
    return p;
}

}  // namespace detail

// Fairness-unaware baseline: weighted binary logistic regression trained by
// full-batch gradient descent. Deterministic: identical inputs give
// bit-identical theta.
inline TrainedModel fit_logistic(const Dataset& train,
                                 const std::vector<double>* weights = nullptr,
                                 const TrainOptions& opts = {}) {
    opts.validate();
    TrainedModel model;
    model.encoder = FeatureEncoder::fit(train);
    for (const auto& f : model.encoder.features) model.feature_names.push_back(f.name);

    bool all_one = true, all_zero = true;
    for (int v : train.label()) {
        if (v == 1) all_zero = false;
        if (v == 0) all_one = false;
    }
    if (all_one || all_zero) {
        // Degenerate fit: intercept-only model predicting the base rate.
        model.degenerate = true;
        model.warning = "training labels are all " + std::string(all_one ? "1" : "0") +
                        "; returning intercept-only model";
        double rate = all_one ? 1.0 : 0.0;
        double eps = 1e-12;
        double clamped = std::min(std::max(rate, eps), 1.0 - eps);
        model.theta.assign(model.encoder.features.size() + 1, 0.0);
        model.theta.back() = std::log(clamped / (1.0 - clamped));
        model.training_loss = 0.0;
        return model;
    }

    detail::LogisticProblem problem =
        detail::build_problem(train, model.encoder, weights, opts.l2_penalty);
    model.theta.assign(problem.dim(), 0.0);
    detail::GdTrace trace = detail::minimize(problem, model.theta, opts);
    model.training_loss = trace.loss_history.back();
    model.loss_history = std::move(trace.loss_history);
    return model;
}

inline std::vector<double> predict_proba(const TrainedModel& model, const Dataset& data) {
    EncodedMatrix x = model.encoder.transform(data);
    std::vector<double> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
        double z = model.theta[x.cols];
        for (std::size_t c = 0; c < x.cols; ++c) z += model.theta[c] * x.at(r, c);
        out[r] = detail::sigmoid(z);
    }
    return out;
}

// Signed linear score theta.x (not normalized by |theta|); sign agrees with
// the 0.5-threshold label.
inline std::vector<double> decision_distance(const TrainedModel& model, const Dataset& data) {
    EncodedMatrix x = model.encoder.transform(data);
    std::vector<double> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
        double z = model.theta[x.cols];
        for (std::size_t c = 0; c < x.cols; ++c) z += model.theta[c] * x.at(r, c);
        out[r] = z;
    }
    return out;
}

// Tie rule: probability == threshold maps to label 1.
inline std::vector<int> predict_label(const TrainedModel& model, const Dataset& data,
                                      double threshold = 0.5) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ParameterError("threshold must be in (0,1)");
    std::vector<double> p = predict_proba(model, data);
    std::vector<int> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= threshold ? 1 : 0;
    return out;
}

inline std::vector<int> threshold_labels(const std::vector<double>& probabilities,
                                         double threshold = 0.5) {
    std::vector<int> out(probabilities.size());
    for (std::size_t i = 0; i < probabilities.size(); ++i)
        out[i] = probabilities[i] >= threshold ? 1 : 0;
    return out;
}

// ---------------------------------------------------------------------------
// Model audit serialization: feature names + coefficients as structured text.
// ---------------------------------------------------------------------------

inline void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    nlohmann::json j;
    j["feature_names"] = model.feature_names;
    j["theta"] = model.theta;
    j["training_loss"] = model.training_loss;
    j["mean"] = model.encoder.mean;
    j["stdev"] = model.encoder.stdev;
    j["degenerate"] = model.degenerate;
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace fairbench

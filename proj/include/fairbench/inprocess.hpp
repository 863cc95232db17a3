#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "fairbench/common.hpp"
#include "fairbench/dataset.hpp"
#include "fairbench/model.hpp"

namespace fairbench {

// Empirical covariance between the sensitive attribute and the signed
// decision-boundary distance: cov = (1/n) sum (S_t - mean(S)) d(X_t).
inline double covariance_proxy(const std::vector<int>& s, const std::vector<double>& distances) {
    if (s.size() != distances.size()) throw InputError("covariance_proxy length mismatch");
    if (s.empty()) throw InputError("covariance_proxy over empty input");
    double s_mean = 0.0;
    for (int v : s) s_mean += v;
    s_mean /= static_cast<double>(s.size());
    double cov = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        cov += (static_cast<double>(s[i]) - s_mean) * distances[i];
    return cov / static_cast<double>(s.size());
}

// Which side of the trade-off is constrained: exactly one of bound_c /
// accuracy_slack_gamma is active per fit.
struct CovarianceConstraint {
    enum class Active { CovarianceBound, AccuracySlack };
    Active active = Active::CovarianceBound;
    double bound_c = 0.0;                // fair variant: max |cov|
    double accuracy_slack_gamma = 0.05;  // acc variant: allowed loss increase
    double mean_s = 0.0;
};

struct StageDiag {
    int stage = 0;
    double mu = 0.0;
    double loss = 0.0;
    double cov = 0.0;
};

struct ZafarFit {
    TrainedModel model;
    CovarianceConstraint constraint;
    double achieved_cov = 0.0;
    double achieved_loss = 0.0;
    bool converged = false;
    std::vector<StageDiag> stages;
};

inline void write_diagnostics_jsonl(const std::vector<StageDiag>& stages, std::ostream& out) {
    for (const auto& d : stages) {
        nlohmann::json j{{"stage", d.stage}, {"mu", d.mu}, {"loss", d.loss}, {"cov", d.cov}};
        out << j.dump() << "\n";
    }
}

inline void write_diagnostics_jsonl(const std::vector<StageDiag>& stages,
                                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    write_diagnostics_jsonl(stages, out);
}

namespace detail {

constexpr double kCovSlack = 1e-3;
constexpr double kMuStart = 1.0;
constexpr double kMuGrowth = 10.0;
constexpr int kMuStages = 8;

inline double mean_of(const std::vector<int>& v) {
    double sum = 0.0;
    for (int x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

struct ZafarProblem {
    LogisticProblem base;
    std::vector<double> cov_grad;  // d cov / d theta; intercept component is 0
    double bound_c = 0.0;          // fair variant
    double loss_bound = 0.0;       // acc variant
    double mu = 0.0;

    double cov_of(const std::vector<double>& theta) const {
        double cov = 0.0;
        for (std::size_t j = 0; j < theta.size(); ++j) cov += cov_grad[j] * theta[j];
        return cov;
    }
};

inline std::vector<double> covariance_gradient(const LogisticProblem& p,
                                               const std::vector<int>& s) {
    double s_mean = 0.0;
    for (int v : s) s_mean += v;
    s_mean /= static_cast<double>(s.size());
    std::vector<double> g(p.dim(), 0.0);
    double inv_n = 1.0 / static_cast<double>(p.x.rows);
    for (std::size_t r = 0; r < p.x.rows; ++r) {
        double coeff = (static_cast<double>(s[r]) - s_mean) * inv_n;
        for (std::size_t c = 0; c < p.x.cols; ++c) g[c] += coeff * p.x.at(r, c);
    }
    // Intercept shifts every distance equally; centered S annihilates it.
    return g;
}

// min L(theta) s.t. |cov| <= c, as L + mu * max(0, |cov| - c)^2.
// Subgradient 0 is taken at the non-smooth boundary |cov| = c.
struct FairObjective {
    const ZafarProblem& zp;
    double operator()(const std::vector<double>& theta, std::vector<double>& grad) const {
        double loss = zp.base(theta, grad);
        double cov = zp.cov_of(theta);
        double excess = std::abs(cov) - zp.bound_c;
        if (excess > 0.0) {
            loss += zp.mu * excess * excess;
            double scale = 2.0 * zp.mu * excess * (cov > 0.0 ? 1.0 : -1.0);
            for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += scale * zp.cov_grad[j];
        }
        return loss;
    }
};

// min cov^2 s.t. L <= bound, as cov^2 + mu * max(0, L - bound)^2.
struct AccObjective {
    const ZafarProblem& zp;
    double operator()(const std::vector<double>& theta, std::vector<double>& grad) const {
        std::vector<double> loss_grad(theta.size());
        double loss = zp.base(theta, loss_grad);
        double cov = zp.cov_of(theta);
        double obj = cov * cov;
        for (std::size_t j = 0; j < grad.size(); ++j) grad[j] = 2.0 * cov * zp.cov_grad[j];
        double excess = loss - zp.loss_bound;
        if (excess > 0.0) {
            obj += zp.mu * excess * excess;
            double scale = 2.0 * zp.mu * excess;
            for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += scale * loss_grad[j];
        }
        return obj;
    }
};

inline void require_both_groups(const Dataset& train) {
    bool has0 = false, has1 = false;
    for (int v : train.sensitive()) (v ? has1 : has0) = true;
    if (!has0 || !has1) throw ParameterError("both sensitive groups must be nonempty");
}

}  // namespace detail

// Fairness-constrained accuracy maximization: approximately solves
// min L(theta) s.t. |cov(S, d_theta)| <= c by quadratic-penalty homotopy
// (mu from 1.0, x10, 8 stages). The constraint is always satisfiable
// (theta = 0), so infeasibility never hard-fails; non-convergence returns the
// best iterate with converged = false.
inline ZafarFit fit_zafar_di_fair(const Dataset& train, double c, const TrainOptions& opts = {}) {
    opts.validate();
    if (c < 0.0) throw ParameterError("covariance bound c must be nonnegative");
    detail::require_both_groups(train);

    ZafarFit fit;
    fit.model.encoder = FeatureEncoder::fit(train);
    for (const auto& f : fit.model.encoder.features) fit.model.feature_names.push_back(f.name);
    fit.constraint.active = CovarianceConstraint::Active::CovarianceBound;
    fit.constraint.bound_c = c;
    fit.constraint.mean_s = detail::mean_of(train.sensitive());

    detail::ZafarProblem zp{detail::build_problem(train, fit.model.encoder, nullptr,
                                                  opts.l2_penalty),
                            {}, c, 0.0, 0.0};
    zp.cov_grad = detail::covariance_gradient(zp.base, train.sensitive());

    // Unconstrained optimum first; identical code path to fit_logistic, so an
    // inactive constraint reproduces it exactly.
    std::vector<double> theta(zp.base.dim(), 0.0);
    detail::GdTrace trace = detail::minimize(zp.base, theta, opts);
    double cov = zp.cov_of(theta);

    if (std::abs(cov) <= c + detail::kCovSlack) {
        fit.converged = true;
    } else {
        zp.mu = detail::kMuStart;
        for (int stage = 0; stage < detail::kMuStages; ++stage) {
            detail::FairObjective obj{zp};
            trace = detail::minimize(obj, theta, opts);
            cov = zp.cov_of(theta);
            std::vector<double> unused(theta.size());
            fit.stages.push_back({stage, zp.mu, zp.base(theta, unused), cov});
            if (std::abs(cov) <= c + detail::kCovSlack) {
                fit.converged = true;
                break;
            }
            zp.mu *= detail::kMuGrowth;
        }
    }
    std::vector<double> unused(theta.size());
    fit.achieved_loss = zp.base(theta, unused);
    fit.achieved_cov = cov;
    fit.model.theta = std::move(theta);
    fit.model.training_loss = fit.achieved_loss;
    if (!fit.converged)
        fit.model.warning = "covariance constraint not met within stage budget; best iterate kept";
    return fit;
}

// Accuracy-constrained fairness maximization: approximately solves
// min |cov| s.t. L(theta) <= (1 + gamma) L*, with L* the unconstrained loss,
// by penalty homotopy on the loss constraint (cov^2 objective).
inline ZafarFit fit_zafar_di_acc(const Dataset& train, double gamma,
                                 const TrainOptions& opts = {}) {
    opts.validate();
    if (gamma < 0.0) throw ParameterError("accuracy slack gamma must be nonnegative");
    detail::require_both_groups(train);

    ZafarFit fit;
    fit.model.encoder = FeatureEncoder::fit(train);
    for (const auto& f : fit.model.encoder.features) fit.model.feature_names.push_back(f.name);
    fit.constraint.active = CovarianceConstraint::Active::AccuracySlack;
    fit.constraint.accuracy_slack_gamma = gamma;
    fit.constraint.mean_s = detail::mean_of(train.sensitive());

    detail::ZafarProblem zp{detail::build_problem(train, fit.model.encoder, nullptr,
                                                  opts.l2_penalty),
                            {}, 0.0, 0.0, 0.0};
    zp.cov_grad = detail::covariance_gradient(zp.base, train.sensitive());

    std::vector<double> theta(zp.base.dim(), 0.0);
    detail::minimize(zp.base, theta, opts);
    std::vector<double> unused(theta.size());
    double l_star = zp.base(theta, unused);
    zp.loss_bound = (1.0 + gamma) * l_star;

    zp.mu = detail::kMuStart;
    for (int stage = 0; stage < detail::kMuStages; ++stage) {
        detail::AccObjective obj{zp};
        detail::minimize(obj, theta, opts);
        fit.stages.push_back({stage, zp.mu, zp.base(theta, unused), zp.cov_of(theta)});
        zp.mu *= detail::kMuGrowth;
    }
    fit.achieved_loss = zp.base(theta, unused);
    fit.achieved_cov = zp.cov_of(theta);
    fit.converged = fit.achieved_loss <= zp.loss_bound * (1.0 + detail::kCovSlack);
    fit.model.theta = std::move(theta);
    fit.model.training_loss = fit.achieved_loss;
    if (!fit.converged)
        fit.model.warning = "loss constraint not met within stage budget; best iterate kept";
    return fit;
}

}  // namespace fairbench

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairbench/common.hpp"
#include "fairbench/metrics.hpp"
#include "fairbench/rng.hpp"

namespace fairbench {

// ---------------------------------------------------------------------------
// Reject option classification
// ---------------------------------------------------------------------------

// Confidence band around the decision boundary: rows with
// max(p, 1-p) < confidence_threshold get overridden in favor of the
// unprivileged group.
struct CriticalRegion {
    double confidence_threshold = 0.6;

    void validate() const {
        if (!(confidence_threshold > 0.5 && confidence_threshold <= 1.0))
            throw ParameterError("confidence threshold must be in (0.5, 1]");
    }
};

inline std::vector<int> reject_option_apply(const std::vector<double>& probabilities,
                                            const std::vector<int>& s,
                                            const CriticalRegion& region) {
    region.validate();
    if (probabilities.size() != s.size()) throw InputError("reject_option arity mismatch");
    std::vector<int> out(probabilities.size());
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        double p = probabilities[i];
        if (std::max(p, 1.0 - p) < region.confidence_threshold)
            out[i] = s[i] == 0 ? 1 : 0;
        else
            out[i] = p >= 0.5 ? 1 : 0;
    }
    return out;
}

enum class FairnessTarget { DiStar, TprbNorm, TnrbNorm };

namespace detail {

inline Maybe normalized_target(FairnessTarget target, const std::vector<int>& s,
                               const std::vector<int>& labels,
                               const std::vector<int>& predictions) {
    FairnessReport report;
    switch (target) {
        case FairnessTarget::DiStar:
            report.di = disparate_impact(s, predictions);
            normalize_fairness(report);
            return report.normalized.di;
        case FairnessTarget::TprbNorm: {
            report.tprb = rate_balances(s, labels, predictions).tprb;
            normalize_fairness(report);
            return report.normalized.tprb;
        }
        case FairnessTarget::TnrbNorm: {
            report.tnrb = rate_balances(s, labels, predictions).tnrb;
            normalize_fairness(report);
            return report.normalized.tnrb;
        }
    }
    return std::nullopt;
}

}  // namespace detail

// Grid search over thresholds, maximizing the normalized target on validation
// data. Ties break toward the smaller threshold (least intervention).
inline CriticalRegion reject_option_tune(const std::vector<double>& probabilities,
                                         const std::vector<int>& s,
                                         const std::vector<int>& labels,
                                         FairnessTarget target,
                                         const std::vector<double>& grid) {
    if (grid.empty()) throw ParameterError("threshold grid is empty");
    std::vector<double> sorted_grid = grid;
    std::sort(sorted_grid.begin(), sorted_grid.end());
    CriticalRegion best{sorted_grid.front()};
    best.validate();
    double best_score = -1.0;
    for (double threshold : sorted_grid) {
        CriticalRegion region{threshold};
        region.validate();
        std::vector<int> preds = reject_option_apply(probabilities, s, region);
        Maybe score = detail::normalized_target(target, s, labels, preds);
        if (score && *score > best_score) {
            best_score = *score;
            best = region;
        }
    }
    return best;
}

inline std::vector<double> default_roc_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 9; ++i) grid.push_back(0.55 + 0.05 * i);  // 0.55 .. 0.95
    return grid;
}

// ---------------------------------------------------------------------------
// Hardt equalized-odds derived predictor
// ---------------------------------------------------------------------------

// Randomized map g(Yhat, S) -> Ytilde: p[yhat][s] = Pr(Ytilde=1 | Yhat, S).
struct MixingPolicy {
    std::array<std::array<double, 2>, 2> p{};  // [yhat][s]
    double objective_loss = 0.0;

    static MixingPolicy identity() {
        MixingPolicy m;
        m.p[0][0] = m.p[0][1] = 0.0;
        m.p[1][0] = m.p[1][1] = 1.0;
        return m;
    }
};

namespace detail {

// Empirical description of one instance of the Hardt LP.
struct HardtInstance {
    // q[s][y] = Pr(Yhat=1 | S=s, Y=y); mass[s][y] = Pr(S=s, Y=y).
    std::array<std::array<double, 2>, 2> q{};
    std::array<std::array<double, 2>, 2> mass{};

    // Rate r[s][y] implied by a policy: Pr(Ytilde=1 | S=s, Y=y).
    double rate(const std::array<double, 4>& p, int s, int y) const {
        // variable order: p = (p(yhat=1,s=1), p(0,1), p(1,0), p(0,0))
        double p1 = s == 1 ? p[0] : p[2];
        double p0 = s == 1 ? p[1] : p[3];
        return p1 * q[s][y] + p0 * (1.0 - q[s][y]);
    }

    // Expected 0-1 loss of the derived predictor.
    double objective(const std::array<double, 4>& p) const {
        double loss = 0.0;
        for (int s = 0; s < 2; ++s)
            for (int y = 0; y < 2; ++y) {
                double r = rate(p, s, y);
                loss += mass[s][y] * (y == 1 ? 1.0 - r : r);
            }
        return loss;
    }

    // Equalized-odds violation for y: r[1][y] - r[0][y].
    double violation(const std::array<double, 4>& p, int y) const {
        return rate(p, 1, y) - rate(p, 0, y);
    }

    // Constraint row y over the 4 policy variables (A p = 0 form).
    std::array<double, 4> constraint_row(int y) const {
        return {q[1][y], 1.0 - q[1][y], -q[0][y], -(1.0 - q[0][y])};
    }
};

inline HardtInstance hardt_instance(const std::vector<int>& labels,
                                    const std::vector<int>& predictions,
                                    const std::vector<int>& s) {
    if (labels.size() != predictions.size() || labels.size() != s.size())
        throw InputError("hardt_fit length mismatch");
    if (labels.empty()) throw InputError("hardt_fit over empty input");
    std::array<std::array<long long, 2>, 2> cell{};   // [s][y]
    std::array<std::array<long long, 2>, 2> pos{};    // [s][y] with yhat=1
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ++cell[s[i]][labels[i]];
        pos[s[i]][labels[i]] += predictions[i] == 1;
    }
    HardtInstance inst;
    double n = static_cast<double>(labels.size());
    for (int g = 0; g < 2; ++g)
        for (int y = 0; y < 2; ++y) {
            if (cell[g][y] == 0)
                throw FitError("empty cell (s=" + std::to_string(g) +
                               ", y=" + std::to_string(y) + ") in equalized-odds fit");
            inst.q[g][y] = static_cast<double>(pos[g][y]) / static_cast<double>(cell[g][y]);
            inst.mass[g][y] = static_cast<double>(cell[g][y]) / n;
        }
    return inst;
}

constexpr double kHardtEqTol = 1e-9;

// Exact solve by vertex enumeration: the feasible set is a polytope in
// [0,1]^4 cut by two equalities, so every vertex fixes at least two
// coordinates at box bounds. Candidates: all 16 corners, all
// one-free-variable solves, and all two-free-variable basic solutions.
inline MixingPolicy solve_hardt(const HardtInstance& inst) {
    std::array<std::array<double, 4>, 2> a{inst.constraint_row(0), inst.constraint_row(1)};

    std::vector<std::array<double, 4>> candidates;

    auto feasible = [&](const std::array<double, 4>& p) {
        for (double v : p)
            if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) return false;
        return std::abs(inst.violation(p, 0)) <= kHardtEqTol &&
               std::abs(inst.violation(p, 1)) <= kHardtEqTol;
    };

    // Corners.
    for (int mask = 0; mask < 16; ++mask) {
        std::array<double, 4> p{};
        for (int j = 0; j < 4; ++j) p[j] = (mask >> j) & 1 ? 1.0 : 0.0;
        candidates.push_back(p);
    }
    // One free variable: solve each equality row for it and cross-check the
    // other (covers rank-deficient constraint matrices).
    for (int free = 0; free < 4; ++free) {
        for (int mask = 0; mask < 8; ++mask) {
            std::array<double, 4> p{};
            int bit = 0;
            for (int j = 0; j < 4; ++j) {
                if (j == free) continue;
                p[j] = (mask >> bit) & 1 ? 1.0 : 0.0;
                ++bit;
            }
            for (int row = 0; row < 2; ++row) {
                if (std::abs(a[row][free]) < 1e-14) continue;
                double rhs = 0.0;
                for (int j = 0; j < 4; ++j)
                    if (j != free) rhs -= a[row][j] * p[j];
                std::array<double, 4> q = p;
                q[free] = rhs / a[row][free];
                candidates.push_back(q);
            }
        }
    }
    // Two free variables: 2x2 basic solutions.
    for (int f0 = 0; f0 < 4; ++f0) {
        for (int f1 = f0 + 1; f1 < 4; ++f1) {
            double det = a[0][f0] * a[1][f1] - a[0][f1] * a[1][f0];
            if (std::abs(det) < 1e-14) continue;
            for (int mask = 0; mask < 4; ++mask) {
                std::array<double, 4> p{};
                int bit = 0;
                for (int j = 0; j < 4; ++j) {
                    if (j == f0 || j == f1) continue;
                    p[j] = (mask >> bit) & 1 ? 1.0 : 0.0;
                    ++bit;
                }
                double rhs0 = 0.0, rhs1 = 0.0;
                for (int j = 0; j < 4; ++j) {
                    if (j == f0 || j == f1) continue;
                    rhs0 -= a[0][j] * p[j];
                    rhs1 -= a[1][j] * p[j];
                }
                p[f0] = (rhs0 * a[1][f1] - a[0][f1] * rhs1) / det;
                p[f1] = (a[0][f0] * rhs1 - rhs0 * a[1][f0]) / det;
                candidates.push_back(p);
            }
        }
    }

    bool found = false;
    std::array<double, 4> best{};
    double best_obj = std::numeric_limits<double>::infinity();
    for (const auto& p : candidates) {
        if (!feasible(p)) continue;
        double obj = inst.objective(p);
        if (!found || obj < best_obj) {
            found = true;
            best_obj = obj;
            best = p;
        }
    }
    if (!found) {
        // Constant policies are always feasible; keep the better trivial one.
        std::array<double, 4> ones{1.0, 1.0, 1.0, 1.0};
        std::array<double, 4> zeros{0.0, 0.0, 0.0, 0.0};
        best = inst.objective(ones) <= inst.objective(zeros) ? ones : zeros;
        best_obj = inst.objective(best);
    }

    MixingPolicy policy;
    for (int j = 0; j < 4; ++j) best[j] = std::min(1.0, std::max(0.0, best[j]));
    policy.p[1][1] = best[0];
    policy.p[0][1] = best[1];
    policy.p[1][0] = best[2];
    policy.p[0][0] = best[3];
    policy.objective_loss = best_obj;
    return policy;
}

}  // namespace detail

// Solves min E[0-1 loss] over randomized policies p(yhat, s) subject to
// Pr(Ytilde=1 | S=1, Y=y) = Pr(Ytilde=1 | S=0, Y=y) for both y, exactly,
// by vertex enumeration of the feasible polytope.
inline MixingPolicy hardt_fit(const std::vector<int>& labels,
                              const std::vector<int>& predictions, const std::vector<int>& s) {
    return detail::solve_hardt(detail::hardt_instance(labels, predictions, s));
}

// Each row draws Ytilde=1 with probability p(Yhat_row, S_row). Draws are
// keyed by (seed, row index), so the stream is row-order independent.
inline std::vector<int> hardt_apply(const MixingPolicy& policy,
                                    const std::vector<int>& predictions,
                                    const std::vector<int>& s, std::uint64_t seed) {
    if (predictions.size() != s.size()) throw InputError("hardt_apply arity mismatch");
    std::vector<int> out(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        double pr = policy.p[predictions[i]][s[i]];
        out[i] = row_uniform(seed, i, 0x4a5dULL) < pr ? 1 : 0;
    }
    return out;
}

inline void save_policy(const MixingPolicy& policy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    nlohmann::json j{{"p_yhat1_s1", policy.p[1][1]},
                     {"p_yhat0_s1", policy.p[0][1]},
                     {"p_yhat1_s0", policy.p[1][0]},
                     {"p_yhat0_s0", policy.p[0][0]},
                     {"objective_loss", policy.objective_loss}};
    out << j.dump(2) << "\n";
}

inline MixingPolicy load_mixing_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    in >> j;
    MixingPolicy policy;
    policy.p[1][1] = j.at("p_yhat1_s1").get<double>();
    policy.p[0][1] = j.at("p_yhat0_s1").get<double>();
    policy.p[1][0] = j.at("p_yhat1_s0").get<double>();
    policy.p[0][0] = j.at("p_yhat0_s0").get<double>();
    policy.objective_loss = j.value("objective_loss", 0.0);
    return policy;
}

// ---------------------------------------------------------------------------
// Pleiss calibrated equal opportunity
// ---------------------------------------------------------------------------

// For the group with the higher TPR, predictions are withheld with
// probability alpha and replaced by a base-rate draw, which lowers that
// group's TPR to the other group's level while preserving calibration.
struct CalibrationPolicy {
    Group favored_group = Group::Privileged;
    double alpha = 0.0;
    double base_rate = 0.0;      // favored group's positive-prediction rate
    double cost_favored = 0.0;   // favored group's TPR
    double cost_unfavored = 0.0; // other group's TPR
    std::string diagnostic;
};

inline CalibrationPolicy pleiss_fit(const std::vector<int>& labels,
                                    const std::vector<double>& predictions_proba,
                                    const std::vector<int>& s) {
    if (labels.size() != predictions_proba.size() || labels.size() != s.size())
        throw InputError("pleiss_fit length mismatch");
    std::vector<int> preds = threshold_labels(predictions_proba);

    double tpr[2];
    double pos_rate[2];
    for (int g = 0; g < 2; ++g) {
        long long positives = 0, true_pos = 0, members = 0, pred_pos = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (s[i] != g) continue;
            ++members;
            pred_pos += preds[i] == 1;
            if (labels[i] == 1) {
                ++positives;
                true_pos += preds[i] == 1;
            }
        }
        if (positives == 0)
            throw FitError("group s=" + std::to_string(g) +
                           " has no positive ground-truth rows");
        tpr[g] = static_cast<double>(true_pos) / static_cast<double>(positives);
        pos_rate[g] = static_cast<double>(pred_pos) / static_cast<double>(members);
    }

    CalibrationPolicy policy;
    int fav = tpr[1] >= tpr[0] ? 1 : 0;
    policy.favored_group = fav == 1 ? Group::Privileged : Group::Unprivileged;
    policy.cost_favored = tpr[fav];
    policy.cost_unfavored = tpr[1 - fav];
    policy.base_rate = pos_rate[fav];

    // The trivial base-rate predictor has TPR equal to the base rate; mixing
    // (1-alpha) of the classifier with alpha of it is linear in alpha:
    //   (1-alpha) cost_favored + alpha cost_trivial = cost_unfavored.
    double cost_trivial = policy.base_rate;
    double denom = policy.cost_favored - cost_trivial;
    if (policy.cost_favored == policy.cost_unfavored) {
        policy.alpha = 0.0;
    } else if (denom <= 0.0) {
        policy.alpha = 1.0;
        policy.diagnostic = "trivial-predictor TPR above favored group's; alpha clipped to 1";
    } else {
        policy.alpha = (policy.cost_favored - policy.cost_unfavored) / denom;
        if (policy.alpha > 1.0) {
            policy.alpha = 1.0;
            policy.diagnostic = "unfavored TPR below trivial-predictor TPR; alpha clipped to 1";
        } else if (policy.alpha < 0.0) {
            policy.alpha = 0.0;
        }
    }
    return policy;
}

inline std::vector<int> pleiss_apply(const CalibrationPolicy& policy,
                                     const std::vector<int>& predictions,
                                     const std::vector<int>& s, std::uint64_t seed) {
    if (predictions.size() != s.size()) throw InputError("pleiss_apply arity mismatch");
    int fav = policy.favored_group == Group::Privileged ? 1 : 0;
    std::vector<int> out = predictions;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (s[i] != fav) continue;
        if (row_uniform(seed, i, 0x91e5ULL) < policy.alpha)
            out[i] = row_uniform(seed, i, 0xb453ULL) < policy.base_rate ? 1 : 0;
    }
    return out;
}

inline void save_policy(const CalibrationPolicy& policy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    nlohmann::json j{{"favored_group",
                      policy.favored_group == Group::Privileged ? "privileged" : "unprivileged"},
                     {"alpha", policy.alpha},
                     {"base_rate", policy.base_rate},
                     {"cost_favored", policy.cost_favored},
                     {"cost_unfavored", policy.cost_unfavored},
                     {"diagnostic", policy.diagnostic}};
    out << j.dump(2) << "\n";
}

inline CalibrationPolicy load_calibration_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    in >> j;
    CalibrationPolicy policy;
    policy.favored_group = j.at("favored_group").get<std::string>() == "privileged"
                               ? Group::Privileged
                               : Group::Unprivileged;
    policy.alpha = j.at("alpha").get<double>();
    policy.base_rate = j.at("base_rate").get<double>();
    policy.cost_favored = j.value("cost_favored", 0.0);
    policy.cost_unfavored = j.value("cost_unfavored", 0.0);
    policy.diagnostic = j.value("diagnostic", "");
    return policy;
}

}  // namespace fairbench

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fairbench/common.hpp"
#include "fairbench/dataset.hpp"
#include "fairbench/rng.hpp"

namespace fairbench {

// Expected vs observed joint of (S, Y) and the cell weights that reconcile
// them. Indexed [s][y].
struct JointProbabilityTable {
    std::array<std::array<double, 2>, 2> expected{};
    std::array<std::array<double, 2>, 2> observed{};
    std::array<std::array<Maybe, 2>, 2> weight{};
    std::string diagnostic;  // nonempty when a cell is empty
};

struct ReweighResult {
    JointProbabilityTable table;
    std::vector<double> row_weights;  // w(t) = Pr_exp(S_t, Y_t) / Pr_obs(S_t, Y_t)
};

inline ReweighResult reweigh(const Dataset& data) {
    std::size_t n = data.n_rows();
    std::array<std::array<std::size_t, 2>, 2> counts{};
    std::array<std::size_t, 2> s_counts{};
    std::array<std::size_t, 2> y_counts{};
    for (std::size_t i = 0; i < n; ++i) {
        int s = data.sensitive()[i];
        int y = data.label()[i];
        ++counts[s][y];
        ++s_counts[s];
        ++y_counts[y];
    }
    ReweighResult out;
    for (int s = 0; s < 2; ++s) {
        for (int y = 0; y < 2; ++y) {
            double exp_p = (static_cast<double>(s_counts[s]) / static_cast<double>(n)) *
                           (static_cast<double>(y_counts[y]) / static_cast<double>(n));
            double obs_p = static_cast<double>(counts[s][y]) / static_cast<double>(n);
            out.table.expected[s][y] = exp_p;
            out.table.observed[s][y] = obs_p;
            if (obs_p > 0.0) {
                out.table.weight[s][y] = exp_p / obs_p;
            } else {
                if (!out.table.diagnostic.empty()) out.table.diagnostic += "; ";
                out.table.diagnostic += "empty cell (s=" + std::to_string(s) +
                                        ", y=" + std::to_string(y) + "): weight undefined";
            }
        }
    }
    out.row_weights.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Every existing row sits in a nonempty cell, so its weight is defined.
        out.row_weights.push_back(
            *out.table.weight[data.sensitive()[i]][data.label()[i]]);
    }
    return out;
}

// n rows drawn with replacement, probability proportional to weight.
inline Dataset weighted_resample(const Dataset& data, const std::vector<double>& weights,
                                 std::size_t n, std::uint64_t seed) {
    if (weights.size() != data.n_rows()) throw ParameterError("weight vector arity mismatch");
    if (n < 1) throw ParameterError("resample size must be >= 1");
    std::vector<double> cumulative(weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) throw ParameterError("weights must be nonnegative");
        total += weights[i];
        cumulative[i] = total;
    }
    if (!(total > 0.0)) throw ParameterError("total weight must be positive");

    DetRng rng(splitmix64(seed ^ 0x7e5a3317ULL));
    std::vector<std::size_t> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.next_double() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        rows.push_back(static_cast<std::size_t>(it - cumulative.begin()));
    }
    return data.select_rows(rows, "weighted resample n=" + std::to_string(n) +
                                      " seed=" + std::to_string(seed));
}

struct RepairParams {
    double lambda = 1.0;
    std::vector<std::string> attributes;  // empty = all numeric predictive attributes
    bool include_ordinal_categorical = false;

    void validate() const {
        if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must be in [0,1]");
    }
};

namespace detail {

// Empirical quantile function over sorted values, linear interpolation
// between order statistics at positions (i - 0.5) / m.
inline double quantile_at(const std::vector<double>& sorted, double rank) {
    std::size_t m = sorted.size();
    double pos = rank * static_cast<double>(m) - 0.5;
    if (pos <= 0.0) return sorted.front();
    if (pos >= static_cast<double>(m - 1)) return sorted.back();
    auto lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Midpoint-ECDF rank of x within its own group: (less + 0.5*equal) / m.
inline double midpoint_rank(const std::vector<double>& sorted, double x) {
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
    auto hi = std::upper_bound(sorted.begin(), sorted.end(), x);
    double less = static_cast<double>(lo - sorted.begin());
    double equal = static_cast<double>(hi - lo);
    return (less + 0.5 * equal) / static_cast<double>(sorted.size());
}

}  // namespace detail

// Disparate-impact repair: each attribute independently, each value is moved
// toward the median of the group-conditional quantile functions at its own
// within-group rank. lambda = 0 leaves the data untouched, lambda = 1 moves
// values fully onto the median curve. S and Y are never modified.
inline Dataset dir_repair(const Dataset& data, const RepairParams& params) {
    params.validate();
    std::vector<std::size_t> group_rows[2];
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        group_rows[data.sensitive()[i]].push_back(i);
    if (group_rows[0].empty() || group_rows[1].empty())
        throw ParameterError("dir_repair requires both sensitive groups nonempty");

    std::vector<std::size_t> targets;
    if (params.attributes.empty()) {
        for (std::size_t a : data.predictive_indices())
            if (data.attribute(a).kind == AttrKind::Numeric) targets.push_back(a);
    } else {
        for (const auto& name : params.attributes) {
            std::size_t a = data.attr_index(name);
            const AttributeSpec& spec = data.attribute(a);
            if (!spec.predictive())
                throw ParameterError("cannot repair non-predictive attribute '" + name + "'");
            if (spec.kind == AttrKind::Categorical) {
                if (!params.include_ordinal_categorical)
                    throw ParameterError("attribute '" + name +
                                         "' is categorical; repair is defined on ordered "
                                         "domains (set include_ordinal_categorical to force)");
                if (spec.encoding != AttrEncoding::Ordinal)
                    throw ParameterError("attribute '" + name +
                                         "' must be ordinal-encoded for repair");
            }
            targets.push_back(a);
        }
    }

    std::vector<std::vector<double>> columns(data.n_attributes());
    for (std::size_t a = 0; a < data.n_attributes(); ++a) columns[a] = data.column(a);

    for (std::size_t a : targets) {
        const std::vector<double>& col = data.column(a);
        std::vector<double> sorted[2];
        for (int g = 0; g < 2; ++g) {
            sorted[g].reserve(group_rows[g].size());
            for (std::size_t r : group_rows[g]) sorted[g].push_back(col[r]);
            std::sort(sorted[g].begin(), sorted[g].end());
        }
        for (int g = 0; g < 2; ++g) {
            for (std::size_t r : group_rows[g]) {
                double rank = detail::midpoint_rank(sorted[g], col[r]);
                double target = 0.5 * (detail::quantile_at(sorted[0], rank) +
                                       detail::quantile_at(sorted[1], rank));
                columns[a][r] = (1.0 - params.lambda) * col[r] + params.lambda * target;
            }
        }
    }
    return data.with_columns(std::move(columns),
                             "dir_repair lambda=" + std::to_string(params.lambda) + " on " +
                                 std::to_string(targets.size()) + " attributes");
}

}  // namespace fairbench

#pragma once

// Test-only oracles, kept independent of the implementation paths they check:
// a plain-loop logistic trainer, contingency-table entropy, the quantile
// repair formula evaluated directly, a two-sample KS statistic, and a 4x4
// Gaussian-elimination vertex enumerator for the equalized-odds program.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace oracles {

// ---------------------------------------------------------------------------
// Logistic regression by fixed-step gradient descent on standardized x.
// ---------------------------------------------------------------------------

struct LogisticOracle {
    double w = 0.0;
    double b = 0.0;
    double mean = 0.0;
    double stdev = 1.0;
    double loss = 0.0;

    static LogisticOracle fit(const std::vector<double>& x, const std::vector<int>& y,
                              double l2, int iterations = 200000, double lr = 0.5) {
        LogisticOracle m;
        std::size_t n = x.size();
        for (double v : x) m.mean += v;
        m.mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : x) ss += (v - m.mean) * (v - m.mean);
        m.stdev = std::sqrt(ss / static_cast<double>(n));
        if (m.stdev == 0.0) m.stdev = 1.0;

        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = (x[i] - m.mean) / m.stdev;

        for (int it = 0; it < iterations; ++it) {
            double gw = 0.0, gb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double z = m.w * xs[i] + m.b;
                double p = 1.0 / (1.0 + std::exp(-z));
                double resid = (p - y[i]) / static_cast<double>(n);
                gw += resid * xs[i];
                gb += resid;
            }
            gw += 2.0 * l2 * m.w;
            gb += 2.0 * l2 * m.b;
            m.w -= lr * gw;
            m.b -= lr * gb;
            if (std::sqrt(gw * gw + gb * gb) < 1e-11) break;
        }
        m.loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = m.w * xs[i] + m.b;
            double p = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
            m.loss += (p - y[i] * z) / static_cast<double>(n);
        }
        m.loss += l2 * (m.w * m.w + m.b * m.b);
        return m;
    }

    double proba(double xv) const {
        double z = m_score(xv);
        return 1.0 / (1.0 + std::exp(-z));
    }
    double m_score(double xv) const { return w * (xv - mean) / stdev + b; }
};

// ---------------------------------------------------------------------------
// Entropy / information gain from a contingency table.
// ---------------------------------------------------------------------------

inline double entropy(const std::vector<std::size_t>& counts) {
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

// gain(X; Y) from raw discrete columns.
inline double information_gain(const std::vector<long long>& x, const std::vector<int>& y) {
    std::map<int, std::size_t> y_counts;
    for (int v : y) ++y_counts[v];
    std::vector<std::size_t> yc;
    for (auto& [_, c] : y_counts) yc.push_back(c);
    double h_y = entropy(yc);

    std::map<long long, std::map<int, std::size_t>> table;
    for (std::size_t i = 0; i < x.size(); ++i) ++table[x[i]][y[i]];
    double h_cond = 0.0;
    for (auto& [_, row] : table) {
        std::vector<std::size_t> rc;
        std::size_t total = 0;
        for (auto& [_, c] : row) {
            rc.push_back(c);
            total += c;
        }
        h_cond += (static_cast<double>(total) / static_cast<double>(x.size())) * entropy(rc);
    }
    return h_y - h_cond;
}

// ---------------------------------------------------------------------------
// Quantile-median repair evaluated directly from the definition.
// ---------------------------------------------------------------------------

inline double quantile_interp(std::vector<double> values, double rank) {
    std::sort(values.begin(), values.end());
    std::size_t m = values.size();
    double pos = rank * static_cast<double>(m) - 0.5;
    if (pos <= 0.0) return values.front();
    if (pos >= static_cast<double>(m - 1)) return values.back();
    auto lo = static_cast<std::size_t>(pos);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

inline double repair_target(const std::vector<double>& group0, const std::vector<double>& group1,
                            const std::vector<double>& own_group, double x) {
    double less = 0.0, equal = 0.0;
    for (double v : own_group) {
        less += v < x;
        equal += v == x;
    }
    double rank = (less + 0.5 * equal) / static_cast<double>(own_group.size());
    return 0.5 * (quantile_interp(group0, rank) + quantile_interp(group1, rank));
}

// ---------------------------------------------------------------------------
// Two-sample Kolmogorov-Smirnov statistic.
// ---------------------------------------------------------------------------

inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        double fa = static_cast<double>(ia) / static_cast<double>(a.size());
        double fb = static_cast<double>(ib) / static_cast<double>(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

// ---------------------------------------------------------------------------
// Equalized-odds LP oracle: brute-force vertex enumeration with a 4x4
// Gaussian solve over {two equality rows} + {two tight box facets}.
// ---------------------------------------------------------------------------

struct HardtOracleInstance {
    // joint[s][yhat][y] = Pr(S=s, Yhat=yhat, Y=y)
    double joint[2][2][2] = {};

    static HardtOracleInstance from_rows(const std::vector<int>& labels,
                                         const std::vector<int>& predictions,
                                         const std::vector<int>& s) {
        HardtOracleInstance inst;
        for (std::size_t i = 0; i < labels.size(); ++i)
            inst.joint[s[i]][predictions[i]][labels[i]] += 1.0 / static_cast<double>(labels.size());
        return inst;
    }

    // p order: (p(yhat=1,s=1), p(yhat=0,s=1), p(yhat=1,s=0), p(yhat=0,s=0))
    double pvar(const std::array<double, 4>& p, int yhat, int s) const {
        if (s == 1) return yhat == 1 ? p[0] : p[1];
        return yhat == 1 ? p[2] : p[3];
    }

    double objective(const std::array<double, 4>& p) const {
        double loss = 0.0;
        for (int s = 0; s < 2; ++s)
            for (int yhat = 0; yhat < 2; ++yhat)
                for (int y = 0; y < 2; ++y) {
                    double pr1 = pvar(p, yhat, s);
                    loss += joint[s][yhat][y] * (y == 1 ? 1.0 - pr1 : pr1);
                }
        return loss;
    }

    // Pr(Ytilde=1, S=s, Y=y) / Pr(S=s, Y=y)
    double rate(const std::array<double, 4>& p, int s, int y) const {
        double num = 0.0, den = 0.0;
        for (int yhat = 0; yhat < 2; ++yhat) {
            num += joint[s][yhat][y] * pvar(p, yhat, s);
            den += joint[s][yhat][y];
        }
        return den > 0.0 ? num / den : 0.0;
    }

    // Row of the equality constraint for class y over the 4 variables.
    std::array<double, 4> eq_row(int y) const {
        double den1 = joint[1][0][y] + joint[1][1][y];
        double den0 = joint[0][0][y] + joint[0][1][y];
        return {joint[1][1][y] / den1, joint[1][0][y] / den1, -joint[0][1][y] / den0,
                -joint[0][0][y] / den0};
    }
};

// Solves a 4x4 system by Gaussian elimination with partial pivoting.
// Returns false when singular.
inline bool solve4(std::array<std::array<double, 5>, 4> m, std::array<double, 4>& out) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        if (std::abs(m[pivot][col]) < 1e-12) return false;
        std::swap(m[col], m[pivot]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            double f = m[r][col] / m[col][col];
            for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
        }
    }
    for (int r = 0; r < 4; ++r) out[r] = m[r][4] / m[r][r];
    return true;
}

struct HardtOracleResult {
    std::array<double, 4> p{};
    double objective = 0.0;
    bool found = false;
};

inline HardtOracleResult hardt_oracle(const HardtOracleInstance& inst) {
    HardtOracleResult best;
    auto consider = [&](const std::array<double, 4>& p) {
        for (double v : p)
            if (!(v >= -1e-9 && v <= 1.0 + 1e-9)) return;
        if (std::abs(inst.rate(p, 1, 0) - inst.rate(p, 0, 0)) > 1e-8) return;
        if (std::abs(inst.rate(p, 1, 1) - inst.rate(p, 0, 1)) > 1e-8) return;
        double obj = inst.objective(p);
        if (!best.found || obj < best.objective) {
            best.found = true;
            best.objective = obj;
            best.p = p;
        }
    };

    // Corners.
    for (int mask = 0; mask < 16; ++mask) {
        std::array<double, 4> p{};
        for (int j = 0; j < 4; ++j) p[j] = (mask >> j) & 1 ? 1.0 : 0.0;
        consider(p);
    }
    // Two equalities + two tight box facets, solved as a 4x4 system.
    std::array<double, 4> row0 = inst.eq_row(0);
    std::array<double, 4> row1 = inst.eq_row(1);
    for (int j0 = 0; j0 < 4; ++j0)
        for (int j1 = j0 + 1; j1 < 4; ++j1)
            for (int bounds = 0; bounds < 4; ++bounds) {
                std::array<std::array<double, 5>, 4> m{};
                for (int c = 0; c < 4; ++c) {
                    m[0][c] = row0[c];
                    m[1][c] = row1[c];
                }
                m[0][4] = 0.0;
                m[1][4] = 0.0;
                m[2][j0] = 1.0;
                m[2][4] = bounds & 1 ? 1.0 : 0.0;
                m[3][j1] = 1.0;
                m[3][4] = bounds & 2 ? 1.0 : 0.0;
                std::array<double, 4> p{};
                if (solve4(m, p)) consider(p);
            }
    // Rank-deficient equalities leave three-tight-bound vertices the 4x4
    // pass cannot reach: solve each row alone for a single free variable.
    for (int free = 0; free < 4; ++free)
        for (int mask = 0; mask < 8; ++mask) {
            std::array<double, 4> p{};
            int bit = 0;
            for (int j = 0; j < 4; ++j) {
                if (j == free) continue;
                p[j] = (mask >> bit) & 1 ? 1.0 : 0.0;
                ++bit;
            }
            for (const auto& row : {row0, row1}) {
                if (std::abs(row[free]) < 1e-12) continue;
                double rhs = 0.0;
                for (int j = 0; j < 4; ++j)
                    if (j != free) rhs -= row[j] * p[j];
                std::array<double, 4> q = p;
                q[free] = rhs / row[free];
                consider(q);
            }
        }
    return best;
}

}  // namespace oracles

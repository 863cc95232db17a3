#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairbench/common.hpp"
#include "fairbench/dataset.hpp"
#include "fairbench/rng.hpp"

namespace fairbench {

// Group-biased synthetic benchmark: two sensitive groups with different
// base positive rates, label-informative features shared by both groups, and
// trailing group-proxy features that shift with the sensitive attribute only.
// A fairness-unaware model picks up the proxies (they correlate with the
// label through the group rates), which produces the disparate impact and
// rate-balance gaps the fair approaches are expected to shrink.
struct SyntheticConfig {
    std::size_t rows = 20000;
    double privileged_fraction = 0.5;
    double positive_rate_privileged = 0.6;
    double positive_rate_unprivileged = 0.3;
    std::size_t features = 6;         // total numeric predictive attributes
    std::size_t proxy_features = 2;   // trailing features carrying the group shift
    double label_signal = 0.5;        // mean shift per label on non-proxy features
    double group_shift = 1.0;         // mean shift per group on proxy features
    std::uint64_t seed = 0;

    void validate() const {
        if (rows < 2) throw ParameterError("synthetic rows must be >= 2");
        if (features == 0) throw ParameterError("synthetic needs at least one feature");
        if (proxy_features > features)
            throw ParameterError("proxy_features cannot exceed features");
        for (double p : {privileged_fraction, positive_rate_privileged,
                         positive_rate_unprivileged})
            if (!(p > 0.0 && p < 1.0))
                throw ParameterError("synthetic probabilities must be in (0,1)");
    }
};

inline Dataset make_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    DetRng rng(splitmix64(cfg.seed ^ 0x5f37ab1eULL));

    std::vector<int> sensitive(cfg.rows);
    std::vector<int> label(cfg.rows);
    std::vector<std::vector<double>> features(cfg.features, std::vector<double>(cfg.rows));
    std::size_t first_proxy = cfg.features - cfg.proxy_features;

    for (std::size_t i = 0; i < cfg.rows; ++i) {
        int s = rng.next_double() < cfg.privileged_fraction ? 1 : 0;
        double rate = s == 1 ? cfg.positive_rate_privileged : cfg.positive_rate_unprivileged;
        int y = rng.next_double() < rate ? 1 : 0;
        sensitive[i] = s;
        label[i] = y;
        for (std::size_t f = 0; f < cfg.features; ++f) {
            double mean = 0.0;
            if (f < first_proxy)
                mean = cfg.label_signal * (2.0 * y - 1.0);
            else
                mean = cfg.group_shift * (2.0 * s - 1.0);
            features[f][i] = mean + rng.next_normal();
        }
    }

    std::vector<AttributeSpec> schema;
    std::vector<std::vector<double>> columns;
    for (std::size_t f = 0; f < cfg.features; ++f) {
        AttributeSpec spec;
        spec.name = "f" + std::to_string(f);
        spec.kind = AttrKind::Numeric;
        // Proxy features depend on the group in non-discriminatory ways by
        // construction, so they are the resolving candidates for CRD.
        spec.role = f < first_proxy ? AttrRole::Predictive : AttrRole::ResolvingCandidate;
        schema.push_back(spec);
        columns.push_back(std::move(features[f]));
    }
    // Sensitive and label columns export as their binarized 0/1 values, so
    // the matching schema config maps "1" to privileged/favorable.
    AttributeSpec s_spec;
    s_spec.name = "group";
    s_spec.kind = AttrKind::Categorical;
    s_spec.role = AttrRole::Sensitive;
    s_spec.categories = {"0", "1"};
    schema.push_back(s_spec);
    columns.emplace_back();
    AttributeSpec y_spec;
    y_spec.name = "outcome";
    y_spec.kind = AttrKind::Categorical;
    y_spec.role = AttrRole::Label;
    y_spec.categories = {"0", "1"};
    schema.push_back(y_spec);
    columns.emplace_back();

    std::string note = "synthetic benchmark: rows=" + std::to_string(cfg.rows) +
                       " features=" + std::to_string(cfg.features) +
                       " rates=" + std::to_string(cfg.positive_rate_privileged) + "/" +
                       std::to_string(cfg.positive_rate_unprivileged) +
                       " seed=" + std::to_string(cfg.seed);
    return Dataset(std::move(schema), std::move(columns), std::move(sensitive),
                   std::move(label), note);
}

// Matching schema config, for the CLI's CSV + schema export path.
inline SchemaConfig synthetic_schema_config(const SyntheticConfig& cfg) {
    SchemaConfig sc;
    std::size_t first_proxy = cfg.features - cfg.proxy_features;
    for (std::size_t f = 0; f < cfg.features; ++f) {
        AttributeSpec spec;
        spec.name = "f" + std::to_string(f);
        spec.kind = AttrKind::Numeric;
        spec.role = f < first_proxy ? AttrRole::Predictive : AttrRole::ResolvingCandidate;
        sc.attributes.push_back(spec);
    }
    AttributeSpec s_spec;
    s_spec.name = "group";
    s_spec.kind = AttrKind::Categorical;
    s_spec.role = AttrRole::Sensitive;
    sc.attributes.push_back(s_spec);
    AttributeSpec y_spec;
    y_spec.name = "outcome";
    y_spec.kind = AttrKind::Categorical;
    y_spec.role = AttrRole::Label;
    sc.attributes.push_back(y_spec);
    sc.privileged_values = {"1"};
    sc.favorable_label = "1";
    return sc;
}

}  // namespace fairbench

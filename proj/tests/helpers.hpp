#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "fairbench/dataset.hpp"
#include "fairbench/synthetic.hpp"

namespace helpers {

using fairbench::AttrEncoding;
using fairbench::AttributeSpec;
using fairbench::AttrKind;
using fairbench::AttrRole;
using fairbench::Dataset;

// Numeric-only dataset from feature columns plus sensitive/label vectors.
inline Dataset numeric_dataset(const std::vector<std::vector<double>>& feature_cols,
                               std::vector<int> s, std::vector<int> y) {
    std::vector<AttributeSpec> schema;
    std::vector<std::vector<double>> columns;
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
        AttributeSpec spec;
        spec.name = "x" + std::to_string(f);
        spec.kind = AttrKind::Numeric;
        spec.role = AttrRole::Predictive;
        schema.push_back(spec);
        columns.push_back(feature_cols[f]);
    }
    AttributeSpec s_spec;
    s_spec.name = "s";
    s_spec.kind = AttrKind::Categorical;
    s_spec.role = AttrRole::Sensitive;
    s_spec.categories = {"0", "1"};
    schema.push_back(s_spec);
    columns.emplace_back();
    AttributeSpec y_spec;
    y_spec.name = "y";
    y_spec.kind = AttrKind::Categorical;
    y_spec.role = AttrRole::Label;
    y_spec.categories = {"0", "1"};
    schema.push_back(y_spec);
    columns.emplace_back();
    return Dataset(std::move(schema), std::move(columns), std::move(s), std::move(y), "test");
}

// The seven university applicants: SAT and rank numeric, department
// categorical (ordinal-coded so tests control the encoding), gender
// sensitive (male = privileged), admitted as the fixture's reference predictions.
struct SevenApplicants {
    Dataset data;
    std::vector<int> predictions;  // the reference admitted column
};

inline SevenApplicants seven_applicants() {
    std::vector<AttributeSpec> schema;
    std::vector<std::vector<double>> columns;

    AttributeSpec sat;
    sat.name = "sat";
    sat.kind = AttrKind::Numeric;
    sat.role = AttrRole::Predictive;
    schema.push_back(sat);
    columns.push_back({1200, 1350, 1105, 1410, 1130, 1290, 1210});

    AttributeSpec dept;
    dept.name = "dept_choice";
    dept.kind = AttrKind::Categorical;
    dept.role = AttrRole::ResolvingCandidate;
    dept.encoding = AttrEncoding::Ordinal;
    dept.categories = {"marketing", "mathematics", "physics"};
    schema.push_back(dept);
    // codes: physics=2, mathematics=1, marketing=0
    columns.push_back({2, 1, 2, 1, 0, 1, 0});

    AttributeSpec rank;
    rank.name = "rank";
    rank.kind = AttrKind::Numeric;
    rank.role = AttrRole::Predictive;
    schema.push_back(rank);
    columns.push_back({11, 3, 9, 3, 10, 12, 11});

    AttributeSpec gender;
    gender.name = "gender";
    gender.kind = AttrKind::Categorical;
    gender.role = AttrRole::Sensitive;
    gender.categories = {"0", "1"};
    schema.push_back(gender);
    columns.emplace_back();

    AttributeSpec admitted;
    admitted.name = "admitted";
    admitted.kind = AttrKind::Categorical;
    admitted.role = AttrRole::Label;
    admitted.categories = {"0", "1"};
    schema.push_back(admitted);
    columns.emplace_back();

    std::vector<int> male{1, 1, 0, 0, 1, 0, 1};
    std::vector<int> predictions{0, 1, 1, 1, 1, 0, 1};
    SevenApplicants out{
        Dataset(std::move(schema), std::move(columns), male, predictions, "seven applicants"),
        predictions};
    return out;
}

// The worked population of 100 applicants: 60 male (privileged) with
// TP 14, FN 2, TN 38, FP 6 and 40 female with TP 7, FN 3, TN 28, FP 2.
struct WorkedPopulation {
    std::vector<int> s, labels, predictions;
};

inline WorkedPopulation worked_population() {
    WorkedPopulation p;
    auto add = [&](int s, int y, int pred, int count) {
        for (int i = 0; i < count; ++i) {
            p.s.push_back(s);
            p.labels.push_back(y);
            p.predictions.push_back(pred);
        }
    };
    add(1, 1, 1, 14);  // male TP
    add(1, 1, 0, 2);   // male FN
    add(1, 0, 0, 38);  // male TN
    add(1, 0, 1, 6);   // male FP
    add(0, 1, 1, 7);   // female TP
    add(0, 1, 0, 3);   // female FN
    add(0, 0, 0, 28);  // female TN
    add(0, 0, 1, 2);   // female FP
    return p;
}

// Per-row checksum for column-alignment properties.
inline std::uint64_t row_checksum(const Dataset& d, std::size_t row) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    for (std::size_t a : d.predictive_indices()) {
        double v = d.column(a)[row];
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        mix(bits);
    }
    mix(static_cast<std::uint64_t>(d.sensitive()[row]));
    mix(static_cast<std::uint64_t>(d.label()[row]));
    return h;
}

}  // namespace helpers

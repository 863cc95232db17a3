#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairbench/common.hpp"
#include "fairbench/rng.hpp"

namespace fairbench {

enum class AttrKind { Numeric, Categorical };
enum class AttrRole { Predictive, Sensitive, Label, ResolvingCandidate };
enum class AttrEncoding { OneHot, Ordinal };

inline const char* to_string(AttrKind k) {
    return k == AttrKind::Numeric ? "numeric" : "categorical";
}
inline const char* to_string(AttrRole r) {
    switch (r) {
        case AttrRole::Predictive: return "predictive";
        case AttrRole::Sensitive: return "sensitive";
        case AttrRole::Label: return "label";
        default: return "resolving";
    }
}

struct AttributeSpec {
    std::string name;
    AttrKind kind = AttrKind::Numeric;
    AttrRole role = AttrRole::Predictive;
    AttrEncoding encoding = AttrEncoding::OneHot;  // categorical only
    // Value dictionary for categorical attributes, discovered at load time
    // (sorted, so it does not depend on row order). Codes index into it.
    std::vector<std::string> categories;

    bool predictive() const {
        return role == AttrRole::Predictive || role == AttrRole::ResolvingCandidate;
    }
};

// Declarative load configuration: which CSV columns to use, their kinds and
// roles, how to binarize the sensitive attribute and the label.
struct SchemaConfig {
    std::vector<AttributeSpec> attributes;
    std::vector<std::string> privileged_values;  // sensitive values mapped to 1
    std::string favorable_label;                 // label value mapped to 1
    std::vector<std::string> missing_values = {"", "?", "NA", "N/A"};
    char quote_char = '"';

    static SchemaConfig from_json(const nlohmann::json& j);
    static SchemaConfig from_json_file(const std::string& path);
    nlohmann::json to_json() const;
};

// One encoded model feature: a numeric attribute, an ordinal-coded
// categorical, or a single one-hot indicator column.
struct EncodedFeature {
    std::size_t attr_index;  // into Dataset schema
    int category = -1;       // one-hot category code, -1 otherwise
    std::string name;
};

struct EncodedMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;  // row-major
    std::vector<EncodedFeature> features;

    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

struct AttributeGain {
    std::string name;
    double gain = 0.0;
};

// Immutable after construction: all operations return new Dataset values, so
// instances are safe to share across concurrent readers.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<AttributeSpec> schema, std::vector<std::vector<double>> columns,
            std::vector<int> sensitive, std::vector<int> label, std::string provenance);

    std::size_t n_rows() const { return sensitive_.size(); }
    std::size_t n_attributes() const { return schema_.size(); }
    std::size_t n_predictive() const { return predictive_.size(); }

    const std::vector<AttributeSpec>& schema() const { return schema_; }
    const AttributeSpec& attribute(std::size_t i) const { return schema_[i]; }
    const std::vector<std::size_t>& predictive_indices() const { return predictive_; }
    const std::vector<double>& column(std::size_t attr) const { return columns_[attr]; }
    const std::vector<int>& sensitive() const { return sensitive_; }
    const std::vector<int>& label() const { return label_; }
    const std::vector<std::string>& provenance() const { return provenance_; }

    std::size_t attr_index(const std::string& name) const;
    bool has_attribute(const std::string& name) const;
    std::vector<std::string> predictive_names() const;
    std::vector<std::string> resolving_candidates() const;

    // Decoded cell value; categorical codes map back through the dictionary.
    std::string cell_text(std::size_t row, std::size_t attr) const;

    // Model-facing view: one-hot expansion per the schema's encoding choices.
    // Standardization is not applied here (it belongs to the trained model,
    // with statistics from the training split).
    EncodedMatrix encode() const;

    Dataset select_rows(const std::vector<std::size_t>& rows, const std::string& note) const;
    Dataset with_columns(std::vector<std::vector<double>> columns, const std::string& note) const;
    Dataset with_sensitive(std::vector<int> sensitive, const std::string& note) const;

    void append_provenance(const std::string& line) { provenance_.push_back(line); }

    void export_csv(const std::string& path) const;

private:
    std::vector<AttributeSpec> schema_;
    std::vector<std::vector<double>> columns_;  // parallel to schema_; S/Y slots empty
    std::vector<std::size_t> predictive_;
    std::vector<int> sensitive_;
    std::vector<int> label_;
    std::vector<std::string> provenance_;
};

struct SplitPlan {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    std::optional<int> folds;  // cross-validation fold count, when used

    SplitPlan() = default;
    SplitPlan(double fraction, std::uint64_t seed_value,
              std::optional<int> fold_count = std::nullopt)
        : train_fraction(fraction), seed(seed_value), folds(fold_count) {}
};

// ---------------------------------------------------------------------------
// SchemaConfig
// ---------------------------------------------------------------------------

inline SchemaConfig SchemaConfig::from_json(const nlohmann::json& j) {
    SchemaConfig cfg;
    if (!j.contains("attributes") || !j["attributes"].is_array())
        throw SchemaError("config lacks an 'attributes' array");
    int n_sensitive = 0;
    int n_label = 0;
    for (const auto& a : j["attributes"]) {
        AttributeSpec spec;
        spec.name = a.at("name").get<std::string>();
        std::string kind = a.value("kind", "numeric");
        if (kind == "numeric")
            spec.kind = AttrKind::Numeric;
        else if (kind == "categorical")
            spec.kind = AttrKind::Categorical;
        else
            throw SchemaError("unknown kind '" + kind + "' for attribute " + spec.name);
        std::string role = a.value("role", "predictive");
        if (role == "predictive")
            spec.role = AttrRole::Predictive;
        else if (role == "sensitive")
            spec.role = AttrRole::Sensitive;
        else if (role == "label")
            spec.role = AttrRole::Label;
        else if (role == "resolving")
            spec.role = AttrRole::ResolvingCandidate;
        else
            throw SchemaError("unknown role '" + role + "' for attribute " + spec.name);
        std::string enc = a.value("encoding", "onehot");
        if (enc == "onehot")
            spec.encoding = AttrEncoding::OneHot;
        else if (enc == "ordinal")
            spec.encoding = AttrEncoding::Ordinal;
        else
            throw SchemaError("unknown encoding '" + enc + "' for attribute " + spec.name);
        n_sensitive += spec.role == AttrRole::Sensitive;
        n_label += spec.role == AttrRole::Label;
        cfg.attributes.push_back(std::move(spec));
    }
    if (n_sensitive != 1) throw SchemaError("config must declare exactly one sensitive attribute");
    if (n_label != 1) throw SchemaError("config must declare exactly one label attribute");
    if (!j.contains("privileged_values"))
        throw SchemaError("config lacks 'privileged_values'");
    cfg.privileged_values = j["privileged_values"].get<std::vector<std::string>>();
    if (!j.contains("favorable_label")) throw SchemaError("config lacks 'favorable_label'");
    cfg.favorable_label = j["favorable_label"].get<std::string>();
    if (j.contains("missing_values"))
        cfg.missing_values = j["missing_values"].get<std::vector<std::string>>();
    if (j.contains("quote_char")) {
        std::string q = j["quote_char"].get<std::string>();
        if (q.size() != 1) throw SchemaError("quote_char must be a single character");
        cfg.quote_char = q[0];
    }
    return cfg;
}

inline SchemaConfig SchemaConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open schema config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("config " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

inline nlohmann::json SchemaConfig::to_json() const {
    nlohmann::json attrs = nlohmann::json::array();
    for (const auto& a : attributes) {
        nlohmann::json ja{{"name", a.name}, {"kind", to_string(a.kind)}};
        switch (a.role) {
            case AttrRole::Predictive: ja["role"] = "predictive"; break;
            case AttrRole::Sensitive: ja["role"] = "sensitive"; break;
            case AttrRole::Label: ja["role"] = "label"; break;
            case AttrRole::ResolvingCandidate: ja["role"] = "resolving"; break;
        }
        if (a.kind == AttrKind::Categorical)
            ja["encoding"] = a.encoding == AttrEncoding::OneHot ? "onehot" : "ordinal";
        attrs.push_back(std::move(ja));
    }
    return nlohmann::json{{"attributes", attrs},
                          {"privileged_values", privileged_values},
                          {"favorable_label", favorable_label},
                          {"missing_values", missing_values},
                          {"quote_char", std::string(1, quote_char)}};
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

inline Dataset::Dataset(std::vector<AttributeSpec> schema,
                        std::vector<std::vector<double>> columns, std::vector<int> sensitive,
                        std::vector<int> label, std::string provenance)
    : schema_(std::move(schema)),
      columns_(std::move(columns)),
      sensitive_(std::move(sensitive)),
      label_(std::move(label)) {
    if (sensitive_.size() != label_.size())
        throw InputError("sensitive/label length mismatch");
    if (sensitive_.empty()) throw IngestionError("dataset has no rows");
    if (columns_.size() != schema_.size())
        throw InputError("column count does not match schema");
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].predictive()) {
            if (columns_[i].size() != sensitive_.size())
                throw InputError("column '" + schema_[i].name + "' has wrong arity");
            predictive_.push_back(i);
        }
    }
    for (int v : sensitive_)
        if (v != 0 && v != 1) throw EncodingError("sensitive column contains non-binary value");
    for (int v : label_)
        if (v != 0 && v != 1) throw EncodingError("label column contains non-binary value");
    if (!provenance.empty()) provenance_.push_back(std::move(provenance));
}

inline std::size_t Dataset::attr_index(const std::string& name) const {
    for (std::size_t i = 0; i < schema_.size(); ++i)
        if (schema_[i].name == name) return i;
    throw SchemaError("unknown attribute '" + name + "'");
}

inline bool Dataset::has_attribute(const std::string& name) const {
    for (const auto& a : schema_)
        if (a.name == name) return true;
    return false;
}

inline std::vector<std::string> Dataset::predictive_names() const {
    std::vector<std::string> names;
    for (std::size_t i : predictive_) names.push_back(schema_[i].name);
    return names;
}

inline std::vector<std::string> Dataset::resolving_candidates() const {
    std::vector<std::string> names;
    for (const auto& a : schema_)
        if (a.role == AttrRole::ResolvingCandidate) names.push_back(a.name);
    return names;
}

inline std::string Dataset::cell_text(std::size_t row, std::size_t attr) const {
    const AttributeSpec& spec = schema_[attr];
    if (spec.role == AttrRole::Sensitive) return std::to_string(sensitive_[row]);
    if (spec.role == AttrRole::Label) return std::to_string(label_[row]);
    double v = columns_[attr][row];
    if (spec.kind == AttrKind::Categorical) {
        auto code = static_cast<std::size_t>(v);
        if (code >= spec.categories.size())
            throw EncodingError("category code out of range for " + spec.name);
        return spec.categories[code];
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline EncodedMatrix Dataset::encode() const {
    EncodedMatrix m;
    m.rows = n_rows();
    for (std::size_t i : predictive_) {
        const AttributeSpec& a = schema_[i];
        if (a.kind == AttrKind::Categorical && a.encoding == AttrEncoding::OneHot) {
            for (std::size_t c = 0; c < a.categories.size(); ++c)
                m.features.push_back({i, static_cast<int>(c), a.name + "=" + a.categories[c]});
        } else {
            m.features.push_back({i, -1, a.name});
        }
    }
    m.cols = m.features.size();
    m.values.assign(m.rows * m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            const EncodedFeature& f = m.features[c];
            double raw = columns_[f.attr_index][r];
            m.at(r, c) = f.category < 0 ? raw : (static_cast<int>(raw) == f.category ? 1.0 : 0.0);
        }
    }
    return m;
}

inline Dataset Dataset::select_rows(const std::vector<std::size_t>& rows,
                                    const std::string& note) const {
    std::vector<std::vector<double>> cols(schema_.size());
    for (std::size_t a = 0; a < schema_.size(); ++a) {
        if (columns_[a].empty()) continue;
        cols[a].reserve(rows.size());
        for (std::size_t r : rows) cols[a].push_back(columns_[a][r]);
    }
    std::vector<int> s, y;
    s.reserve(rows.size());
    y.reserve(rows.size());
    for (std::size_t r : rows) {
        s.push_back(sensitive_[r]);
        y.push_back(label_[r]);
    }
    Dataset out(schema_, std::move(cols), std::move(s), std::move(y), "");
    out.provenance_ = provenance_;
    out.provenance_.push_back(note);
    return out;
}

inline Dataset Dataset::with_columns(std::vector<std::vector<double>> columns,
                                     const std::string& note) const {
    Dataset out(schema_, std::move(columns), sensitive_, label_, "");
    out.provenance_ = provenance_;
    out.provenance_.push_back(note);
    return out;
}

inline Dataset Dataset::with_sensitive(std::vector<int> sensitive,
                                       const std::string& note) const {
    Dataset out(schema_, columns_, std::move(sensitive), label_, "");
    out.provenance_ = provenance_;
    out.provenance_.push_back(note);
    return out;
}

inline void Dataset::export_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& line : provenance_) out << "# " << line << "\n";
    for (std::size_t a = 0; a < schema_.size(); ++a)
        out << (a ? "," : "") << schema_[a].name;
    out << "\n";
    for (std::size_t r = 0; r < n_rows(); ++r) {
        for (std::size_t a = 0; a < schema_.size(); ++a)
            out << (a ? "," : "") << cell_text(r, a);
        out << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

// ---------------------------------------------------------------------------
// CSV loading
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> parse_csv_line(const std::string& line, char quote) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (in_quotes) {
            if (ch == quote) {
                if (i + 1 < line.size() && line[i + 1] == quote) {
                    cur.push_back(quote);
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == quote && cur.empty()) {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

// Loads and encodes a CSV file per the schema config. Rows with missing
// entries are dropped and the count logged in provenance. Categorical value
// dictionaries are discovered from the data and sorted, so codes do not
// depend on row order.
inline Dataset load_csv(const std::string& path, const SchemaConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    // Header (comment lines from exported provenance blocks are skipped).
    do {
        if (!std::getline(in, line)) throw IngestionError(path + " is empty");
    } while (!line.empty() && line[0] == '#');
    std::vector<std::string> header = detail::parse_csv_line(line, cfg.quote_char);
    for (auto& h : header) h = detail::strip(h);

    std::unordered_map<std::string, std::size_t> col_of;
    for (std::size_t i = 0; i < header.size(); ++i) col_of.emplace(header[i], i);

    std::vector<std::size_t> source_col(cfg.attributes.size());
    for (std::size_t a = 0; a < cfg.attributes.size(); ++a) {
        auto it = col_of.find(cfg.attributes[a].name);
        if (it == col_of.end())
            throw SchemaError("column '" + cfg.attributes[a].name + "' not found in " + path);
        source_col[a] = it->second;
    }

    std::set<std::string> missing(cfg.missing_values.begin(), cfg.missing_values.end());
    std::vector<std::vector<std::string>> raw(cfg.attributes.size());
    std::size_t dropped = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') continue;
        std::vector<std::string> fields = detail::parse_csv_line(line, cfg.quote_char);
        if (fields.size() != header.size())
            throw IngestionError(path + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        bool drop = false;
        for (std::size_t a = 0; a < cfg.attributes.size() && !drop; ++a)
            drop = missing.count(detail::strip(fields[source_col[a]])) > 0;
        if (drop) {
            ++dropped;
            continue;
        }
        for (std::size_t a = 0; a < cfg.attributes.size(); ++a)
            raw[a].push_back(detail::strip(fields[source_col[a]]));
    }
    if (raw.empty() || raw[0].empty())
        throw IngestionError(path + " has no usable data rows");
    std::size_t n = raw[0].size();

    std::vector<AttributeSpec> schema = cfg.attributes;
    std::vector<std::vector<double>> columns(schema.size());
    std::vector<int> sensitive;
    std::vector<int> label;
    std::set<std::string> privileged(cfg.privileged_values.begin(), cfg.privileged_values.end());

    for (std::size_t a = 0; a < schema.size(); ++a) {
        AttributeSpec& spec = schema[a];
        if (spec.role == AttrRole::Sensitive) {
            sensitive.reserve(n);
            for (const auto& v : raw[a]) sensitive.push_back(privileged.count(v) ? 1 : 0);
            std::set<std::string> values(raw[a].begin(), raw[a].end());
            spec.categories.assign(values.begin(), values.end());
            spec.kind = AttrKind::Categorical;
        } else if (spec.role == AttrRole::Label) {
            std::set<std::string> values(raw[a].begin(), raw[a].end());
            if (values.size() > 2)
                throw EncodingError("label column '" + spec.name + "' has " +
                                    std::to_string(values.size()) +
                                    " distinct values; favorable-value mapping would merge classes");
            if (!values.count(cfg.favorable_label))
                throw EncodingError("favorable label '" + cfg.favorable_label +
                                    "' never occurs in column '" + spec.name + "'");
            label.reserve(n);
            for (const auto& v : raw[a]) label.push_back(v == cfg.favorable_label ? 1 : 0);
            spec.categories.assign(values.begin(), values.end());
            spec.kind = AttrKind::Categorical;
        } else if (spec.kind == AttrKind::Categorical) {
            std::set<std::string> values(raw[a].begin(), raw[a].end());
            spec.categories.assign(values.begin(), values.end());
            std::unordered_map<std::string, double> code;
            for (std::size_t c = 0; c < spec.categories.size(); ++c)
                code.emplace(spec.categories[c], static_cast<double>(c));
            columns[a].reserve(n);
            for (const auto& v : raw[a]) columns[a].push_back(code[v]);
        } else {
            columns[a].reserve(n);
            for (std::size_t r = 0; r < n; ++r) {
                const std::string& v = raw[a][r];
                char* end = nullptr;
                double x = std::strtod(v.c_str(), &end);
                if (end == v.c_str() || *end != '\0')
                    throw IngestionError("non-numeric value '" + v + "' in numeric column '" +
                                         spec.name + "'");
                columns[a].push_back(x);
            }
        }
    }

    std::string note = "loaded " + path + ": " + std::to_string(n) + " rows kept, " +
                       std::to_string(dropped) + " rows dropped (missing values)";
    return Dataset(std::move(schema), std::move(columns), std::move(sensitive), std::move(label),
                   note);
}

// ---------------------------------------------------------------------------
// Slicing operations
// ---------------------------------------------------------------------------

namespace detail {

// Round to nearest, ties to even.
inline long long round_half_even(double x) {
    double fl = std::floor(x);
    double frac = x - fl;
    auto lo = static_cast<long long>(fl);
    if (frac > 0.5) return lo + 1;
    if (frac < 0.5) return lo;
    return (lo % 2 == 0) ? lo : lo + 1;
}

}  // namespace detail

inline std::pair<Dataset, Dataset> split(const Dataset& data, const SplitPlan& plan) {
    if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0))
        throw ParameterError("train_fraction must be in (0,1)");
    std::size_t n = data.n_rows();
    auto n_train = static_cast<std::size_t>(
        detail::round_half_even(plan.train_fraction * static_cast<double>(n)));
    std::vector<std::size_t> idx = identity_permutation(n);
    DetRng rng(plan.seed);
    shuffle_indices(idx, rng);
    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + static_cast<long>(n_train));
    std::vector<std::size_t> test_idx(idx.begin() + static_cast<long>(n_train), idx.end());
    std::string tag = "fraction=" + std::to_string(plan.train_fraction) +
                      " seed=" + std::to_string(plan.seed);
    return {data.select_rows(train_idx, "split train: " + tag),
            data.select_rows(test_idx, "split test: " + tag)};
}

inline std::vector<std::pair<Dataset, Dataset>> kfold(const Dataset& data, int k,
                                                      std::uint64_t seed) {
    if (k < 2) throw ParameterError("k must be >= 2");
    std::size_t n = data.n_rows();
    if (static_cast<std::size_t>(k) > n) throw ParameterError("k exceeds row count");
    std::vector<std::size_t> idx = identity_permutation(n);
    DetRng rng(seed);
    shuffle_indices(idx, rng);

    // First (n mod k) validation folds take one extra row.
    std::vector<std::pair<Dataset, Dataset>> folds;
    std::size_t base = n / static_cast<std::size_t>(k);
    std::size_t extra = n % static_cast<std::size_t>(k);
    std::size_t start = 0;
    for (int f = 0; f < k; ++f) {
        std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        std::vector<std::size_t> val_idx(idx.begin() + static_cast<long>(start),
                                         idx.begin() + static_cast<long>(start + size));
        std::vector<std::size_t> train_idx;
        train_idx.reserve(n - size);
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<long>(start));
        train_idx.insert(train_idx.end(), idx.begin() + static_cast<long>(start + size),
                         idx.end());
        std::string tag = "fold " + std::to_string(f) + "/" + std::to_string(k) +
                          " seed=" + std::to_string(seed);
        folds.emplace_back(data.select_rows(train_idx, "kfold train: " + tag),
                           data.select_rows(val_idx, "kfold validate: " + tag));
        start += size;
    }
    return folds;
}

inline Dataset subsample_rows(const Dataset& data, std::size_t n, std::uint64_t seed) {
    if (n == 0 || n > data.n_rows())
        throw ParameterError("subsample size must be in (0, n_rows]");
    DetRng rng(splitmix64(seed ^ 0x5ab5a3b1e0ULL));
    std::vector<std::size_t> idx = sample_without_replacement(data.n_rows(), n, rng);
    return data.select_rows(idx, "subsample n=" + std::to_string(n) +
                                     " seed=" + std::to_string(seed));
}

namespace detail {

inline double entropy_from_counts(const std::map<long long, std::size_t>& counts,
                                  std::size_t total) {
    double h = 0.0;
    for (const auto& [_, c] : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

// Quantile-bin a numeric column (duplicate edges collapse).
inline std::vector<long long> quantile_bins(const std::vector<double>& col, int bins) {
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    for (int b = 1; b < bins; ++b) {
        std::size_t pos = static_cast<std::size_t>(
            static_cast<double>(sorted.size()) * static_cast<double>(b) / bins);
        if (pos >= sorted.size()) pos = sorted.size() - 1;
        edges.push_back(sorted[pos]);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<long long> out(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) {
        out[i] = static_cast<long long>(
            std::upper_bound(edges.begin(), edges.end(), col[i]) - edges.begin());
    }
    return out;
}

}  // namespace detail

// Predictive attributes ordered by decreasing information gain with respect
// to the label; numeric attributes are discretized into quantile bins.
inline std::vector<AttributeGain> rank_by_information_gain(const Dataset& data,
                                                           int numeric_bins = 10) {
    const std::vector<int>& y = data.label();
    std::size_t n = data.n_rows();
    std::map<long long, std::size_t> y_counts;
    for (int v : y) ++y_counts[v];
    if (y_counts.size() < 2)
        throw NumericError("information gain undefined: label is constant");
    double h_y = detail::entropy_from_counts(y_counts, n);

    std::vector<AttributeGain> gains;
    for (std::size_t a : data.predictive_indices()) {
        const AttributeSpec& spec = data.attribute(a);
        std::vector<long long> bins;
        if (spec.kind == AttrKind::Categorical) {
            bins.reserve(n);
            for (double v : data.column(a)) bins.push_back(static_cast<long long>(v));
        } else {
            bins = detail::quantile_bins(data.column(a), numeric_bins);
        }
        std::map<long long, std::map<long long, std::size_t>> cond;  // bin -> y -> count
        std::map<long long, std::size_t> bin_counts;
        for (std::size_t r = 0; r < n; ++r) {
            ++cond[bins[r]][y[r]];
            ++bin_counts[bins[r]];
        }
        double h_cond = 0.0;
        for (const auto& [b, yc] : cond) {
            double pb = static_cast<double>(bin_counts[b]) / static_cast<double>(n);
            h_cond += pb * detail::entropy_from_counts(yc, bin_counts[b]);
        }
        gains.push_back({spec.name, h_y - h_cond});
    }
    std::stable_sort(gains.begin(), gains.end(),
                     [](const AttributeGain& l, const AttributeGain& r) {
                         return l.gain > r.gain;
                     });
    return gains;
}

// Restricts schema and rows to keep ∪ {S, Y}. Attribute order is preserved,
// so re-projecting a superset equals a single projection.
inline Dataset project_attributes(const Dataset& data, const std::vector<std::string>& keep) {
    std::set<std::string> keep_set(keep.begin(), keep.end());
    std::vector<std::string> names = data.predictive_names();
    std::set<std::string> predictive(names.begin(), names.end());
    for (const auto& name : keep)
        if (!predictive.count(name))
            throw SchemaError("cannot project on non-predictive attribute '" + name + "'");

    std::vector<AttributeSpec> schema;
    std::vector<std::vector<double>> columns;
    for (std::size_t a = 0; a < data.n_attributes(); ++a) {
        const AttributeSpec& spec = data.attribute(a);
        if (spec.predictive() && !keep_set.count(spec.name)) continue;
        schema.push_back(spec);
        columns.push_back(data.column(a));
    }
    Dataset out(std::move(schema), std::move(columns), data.sensitive(), data.label(), "");
    for (const auto& line : data.provenance()) out.append_provenance(line);
    out.append_provenance("project to " + std::to_string(keep.size()) + " attributes");
    return out;
}

}  // namespace fairbench

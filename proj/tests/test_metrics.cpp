#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fairbench/metrics.hpp"
#include "fairbench/synthetic.hpp"
#include "helpers.hpp"

using namespace fairbench;

TEST_CASE("confusion matrix on the worked 100-applicant population", "[metrics]") {
    helpers::WorkedPopulation p = helpers::worked_population();
    ConfusionMatrix cm = confusion(p.labels, p.predictions);
    CHECK(cm.tp == 21);
    CHECK(cm.fp == 8);
    CHECK(cm.fn == 5);
    CHECK(cm.tn == 66);

    SECTION("perfect predictions have no false counts") {
        ConfusionMatrix perfect = confusion(p.labels, p.labels);
        CHECK(perfect.fp == 0);
        CHECK(perfect.fn == 0);
    }
    SECTION("inverted predictions have no true counts") {
        std::vector<int> inverted;
        for (int y : p.labels) inverted.push_back(1 - y);
        ConfusionMatrix inv = confusion(p.labels, inverted);
        CHECK(inv.tp == 0);
        CHECK(inv.tn == 0);
    }
    SECTION("length mismatch is an input error") {
        std::vector<int> shorter(p.labels.begin(), p.labels.end() - 1);
        CHECK_THROWS_AS(confusion(shorter, p.predictions), InputError);
    }
}

TEST_CASE("correctness metrics", "[metrics]") {
    ConfusionMatrix cm{21, 8, 5, 66};
    Correctness c = correctness_metrics(cm);
    REQUIRE(c.accuracy);
    CHECK(*c.accuracy == 0.87);
    // The narrative value of 78% disagrees with this matrix; the formula
    // gives 42/55.
    REQUIRE(c.f1);
    CHECK_THAT(*c.f1, Catch::Matchers::WithinAbs(42.0 / 55.0, 1e-12));

    SECTION("perfect predictor scores 1.0 on all four") {
        Correctness perfect = correctness_metrics({10, 0, 0, 14});
        CHECK(*perfect.accuracy == 1.0);
        CHECK(*perfect.precision == 1.0);
        CHECK(*perfect.recall == 1.0);
        CHECK(*perfect.f1 == 1.0);
    }
    SECTION("zero denominators are absent, not zero") {
        Correctness no_pos_pred = correctness_metrics({0, 0, 3, 7});
        CHECK(!no_pos_pred.precision);
        REQUIRE(no_pos_pred.recall);
        CHECK(*no_pos_pred.recall == 0.0);
        CHECK(!no_pos_pred.f1);
        Correctness no_pos_truth = correctness_metrics({0, 2, 0, 8});
        CHECK(!no_pos_truth.recall);
    }
}

TEST_CASE("disparate impact", "[metrics]") {
    helpers::WorkedPopulation p = helpers::worked_population();
    CHECK_THAT(disparate_impact(p.s, p.predictions),
               Catch::Matchers::WithinAbs(0.675, 1e-12));

    SECTION("equal positive rates give 1.0") {
        std::vector<int> s{0, 0, 1, 1};
        std::vector<int> preds{1, 0, 1, 0};
        CHECK(disparate_impact(s, preds) == 1.0);
    }
    SECTION("zero unprivileged rate with positive privileged rate gives 0") {
        std::vector<int> s{0, 0, 1, 1};
        std::vector<int> preds{0, 0, 1, 0};
        CHECK(disparate_impact(s, preds) == 0.0);
    }
    SECTION("zero privileged rate is the infinity sentinel") {
        std::vector<int> s{0, 0, 1, 1};
        std::vector<int> preds{1, 0, 0, 0};
        CHECK(std::isinf(disparate_impact(s, preds)));
    }
    SECTION("single-group input is an input error") {
        std::vector<int> s{1, 1, 1};
        std::vector<int> preds{1, 0, 1};
        CHECK_THROWS_AS(disparate_impact(s, preds), InputError);
    }
}

TEST_CASE("rate balances on the worked population", "[metrics]") {
    helpers::WorkedPopulation p = helpers::worked_population();
    RateBalances rb = rate_balances(p.s, p.labels, p.predictions);
    REQUIRE(rb.tprb);
    REQUIRE(rb.tnrb);
    CHECK_THAT(*rb.tprb, Catch::Matchers::WithinAbs(0.175, 1e-12));
    CHECK_THAT(*rb.tnrb, Catch::Matchers::WithinAbs(38.0 / 44.0 - 28.0 / 30.0, 1e-15));
    CHECK_THAT(*rb.tnrb, Catch::Matchers::WithinAbs(-0.0697, 0.0005));

    SECTION("identical group rates give zero balances") {
        std::vector<int> s{0, 0, 0, 0, 1, 1, 1, 1};
        std::vector<int> y{1, 1, 0, 0, 1, 1, 0, 0};
        std::vector<int> pred{1, 0, 1, 0, 1, 0, 1, 0};
        RateBalances zero = rate_balances(s, y, pred);
        CHECK(*zero.tprb == 0.0);
        CHECK(*zero.tnrb == 0.0);
    }
    SECTION("group without positives reports tprb absent") {
        std::vector<int> s{0, 0, 1, 1};
        std::vector<int> y{0, 0, 1, 0};
        std::vector<int> pred{0, 1, 1, 0};
        RateBalances rb2 = rate_balances(s, y, pred);
        CHECK(!rb2.tprb);
        REQUIRE(rb2.tnrb);
    }
}

TEST_CASE("group outcome rate identities and DI consistency", "[metrics]") {
    SyntheticConfig cfg;
    cfg.rows = 400;
    cfg.seed = 5;
    Dataset d = make_synthetic(cfg);
    DetRng rng(9);
    std::vector<int> preds(d.n_rows());
    for (auto& v : preds) v = rng.next_double() < 0.4 ? 1 : 0;

    GroupOutcome unpriv = group_outcome(Group::Unprivileged, d.sensitive(), d.label(), preds);
    GroupOutcome priv = group_outcome(Group::Privileged, d.sensitive(), d.label(), preds);
    for (const GroupOutcome* g : {&unpriv, &priv}) {
        REQUIRE(g->tpr);
        REQUIRE(g->tnr);
        CHECK_THAT(*g->tpr + *g->fnr, Catch::Matchers::WithinAbs(1.0, 1e-12));
        CHECK_THAT(*g->tnr + *g->fpr, Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
    // DI computed on the union equals the per-group positive-rate ratio.
    CHECK_THAT(disparate_impact(d.sensitive(), preds),
               Catch::Matchers::WithinAbs(*unpriv.positive_rate / *priv.positive_rate, 1e-15));
}

TEST_CASE("causal discrimination on the seven applicants", "[metrics]") {
    helpers::SevenApplicants seven = helpers::seven_applicants();
    const Dataset& data = seven.data;

    // Reference predictions; only t6 (0-indexed row 5) is gender-sensitive.
    BatchPredictor predictor = [&](const Dataset& d) {
        std::vector<int> out(d.n_rows());
        std::size_t sat = d.attr_index("sat");
        for (std::size_t i = 0; i < d.n_rows(); ++i) {
            if (d.column(sat)[i] == 1290.0)
                out[i] = d.sensitive()[i] == 1 ? 1 : 0;
            else
                out[i] = d.column(sat)[i] == 1200.0 ? 0 : 1;
        }
        return out;
    };
    CHECK(predictor(data) == seven.predictions);
    double cd = causal_discrimination(predictor, data, 0.99, 0.01, 1);
    CHECK(cd == 1.0 / 7.0);

    SECTION("constant classifier has zero causal discrimination") {
        BatchPredictor constant = [](const Dataset& d) {
            return std::vector<int>(d.n_rows(), 1);
        };
        CHECK(causal_discrimination(constant, data, 0.99, 0.01, 1) == 0.0);
    }
    SECTION("classifier returning S flips everywhere") {
        BatchPredictor echo_s = [](const Dataset& d) {
            std::vector<int> out(d.sensitive().begin(), d.sensitive().end());
            return out;
        };
        CHECK(causal_discrimination(echo_s, data, 0.99, 0.01, 1) == 1.0);
    }
    SECTION("non-deterministic predictor is a contract error") {
        int calls = 0;
        BatchPredictor flaky = [&calls](const Dataset& d) {
            ++calls;
            return std::vector<int>(d.n_rows(), calls % 2);
        };
        CHECK_THROWS_AS(causal_discrimination(flaky, data, 0.99, 0.01, 1), ContractError);
    }
    SECTION("parameter validation") {
        BatchPredictor constant = [](const Dataset& d) {
            return std::vector<int>(d.n_rows(), 1);
        };
        CHECK_THROWS_AS(causal_discrimination(constant, data, 1.0, 0.01, 1), ParameterError);
        CHECK_THROWS_AS(causal_discrimination(constant, data, 0.99, 0.0, 1), ParameterError);
    }
}

TEST_CASE("hoeffding sample size at the default setting", "[metrics]") {
    CHECK(hoeffding_sample_size(0.99, 0.01) == 26492);
    CHECK(hoeffding_sample_size(0.9, 0.05) == 600);
}

TEST_CASE("sampled CD covers the exhaustive value at the stated confidence", "[metrics]") {
    // 1,000-row synthetic classifier with a known flip set; at 90%/5% the
    // Hoeffding size is 600 < 1000, so sampling kicks in.
    SyntheticConfig cfg;
    cfg.rows = 1000;
    cfg.seed = 77;
    Dataset d = make_synthetic(cfg);
    std::size_t f0 = d.attr_index("f0");
    BatchPredictor predictor = [f0](const Dataset& data) {
        std::vector<int> out(data.n_rows());
        for (std::size_t i = 0; i < data.n_rows(); ++i) {
            // Prediction depends on S only inside a feature band.
            double v = data.column(f0)[i];
            if (v > -0.3 && v < 0.3)
                out[i] = data.sensitive()[i];
            else
                out[i] = v >= 0.0 ? 1 : 0;
        }
        return out;
    };
    double exact = causal_discrimination(predictor, d, 0.999999, 0.0001, 0);  // exhaustive
    REQUIRE(exact > 0.05);

    int within = 0;
    const int reps = 400;
    for (int rep = 0; rep < reps; ++rep) {
        double est = causal_discrimination(predictor, d, 0.9, 0.05, 1000 + rep);
        within += std::abs(est - exact) <= 0.05;
    }
    double coverage = static_cast<double>(within) / reps;
    CHECK(coverage >= 0.9 - 0.02);
}

TEST_CASE("propensity weights reproduce the department example", "[metrics]") {
    // Injected fitted scores per department: physics 0.5, mathematics 2/3,
    // marketing 0 -> weights 1, 2, 0.
    std::vector<double> scores{0.5, 2.0 / 3.0, 0.5, 2.0 / 3.0, 0.0, 2.0 / 3.0, 0.0};
    PropensityWeights pw = PropensityWeights::from_scores({"dept_choice"}, scores);
    std::vector<double> expected{1, 2, 1, 2, 0, 2, 0};
    for (std::size_t i = 0; i < 7; ++i)
        CHECK_THAT(pw.weight[i], Catch::Matchers::WithinAbs(expected[i], 1e-12));

    SECTION("score 0.5 everywhere gives unit weights") {
        PropensityWeights half = PropensityWeights::from_scores({"r"}, {0.5, 0.5});
        CHECK(half.weight[0] == 1.0);
        CHECK(half.weight[1] == 1.0);
    }
    SECTION("scores near 1 clip to a finite weight") {
        PropensityWeights hi = PropensityWeights::from_scores({"r"}, {1.0});
        CHECK(std::isfinite(hi.weight[0]));
        CHECK_THAT(hi.weight[0], Catch::Matchers::WithinRel(1e6, 1e-3));
    }
    SECTION("empty resolving set is a parameter error") {
        helpers::SevenApplicants seven = helpers::seven_applicants();
        CHECK_THROWS_AS(propensity_weights(seven.data, {}), ParameterError);
    }
}

TEST_CASE("fitted propensity model recovers grouped scores", "[metrics]") {
    // Larger version of the department pattern so the logistic fit can
    // recover the per-department rates.
    std::vector<double> dept;
    std::vector<int> s;
    for (int i = 0; i < 60; ++i) {  // physics: half unprivileged
        dept.push_back(2);
        s.push_back(i % 2);
    }
    for (int i = 0; i < 90; ++i) {  // mathematics: two thirds unprivileged
        dept.push_back(1);
        s.push_back(i % 3 == 0 ? 1 : 0);
    }
    for (int i = 0; i < 60; ++i) {  // marketing: all privileged
        dept.push_back(0);
        s.push_back(1);
    }
    std::vector<int> y(dept.size(), 0);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = i % 2;

    std::vector<AttributeSpec> schema;
    AttributeSpec d_spec;
    d_spec.name = "dept";
    d_spec.kind = AttrKind::Categorical;
    d_spec.role = AttrRole::ResolvingCandidate;
    d_spec.categories = {"marketing", "math", "physics"};
    schema.push_back(d_spec);
    AttributeSpec s_spec;
    s_spec.name = "s";
    s_spec.kind = AttrKind::Categorical;
    s_spec.role = AttrRole::Sensitive;
    schema.push_back(s_spec);
    AttributeSpec y_spec;
    y_spec.name = "y";
    y_spec.kind = AttrKind::Categorical;
    y_spec.role = AttrRole::Label;
    schema.push_back(y_spec);
    Dataset data(schema, {dept, {}, {}}, s, y, "dept propensity");

    PropensityWeights pw = propensity_weights(data, {"dept"});
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        double expected = dept[i] == 2 ? 0.5 : (dept[i] == 1 ? 2.0 / 3.0 : 0.0);
        CHECK_THAT(pw.score[i], Catch::Matchers::WithinAbs(expected, 0.02));
    }
}

TEST_CASE("causal risk difference", "[metrics]") {
    helpers::SevenApplicants seven = helpers::seven_applicants();

    SECTION("the reference weights give CRD = 0 exactly") {
        PropensityWeights pw =
            PropensityWeights::from_weights({"dept_choice"}, {1, 2, 1, 2, 0, 2, 0});
        Maybe crd = causal_risk_difference(seven.data, seven.predictions, pw);
        REQUIRE(crd);
        CHECK(*crd == 0.0);
    }
    SECTION("fitted scores reproduce the reference result within rounding") {
        PropensityWeights pw = PropensityWeights::from_scores(
            {"dept_choice"}, {0.5, 2.0 / 3.0, 0.5, 2.0 / 3.0, 0.0, 2.0 / 3.0, 0.0});
        Maybe crd = causal_risk_difference(seven.data, seven.predictions, pw);
        REQUIRE(crd);
        CHECK_THAT(*crd, Catch::Matchers::WithinAbs(0.0, 1e-15));
    }
    SECTION("unit weights collapse to the group positive-rate difference") {
        DetRng rng(31);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<int> s(20), preds(20), y(20, 0);
            bool has0 = false, has1 = false;
            for (int i = 0; i < 20; ++i) {
                s[i] = rng.next_double() < 0.5;
                preds[i] = rng.next_double() < 0.5;
                (s[i] ? has1 : has0) = true;
            }
            if (!has0 || !has1) continue;
            std::vector<double> col(20, 1.0);
            Dataset d = helpers::numeric_dataset({col}, s, y);
            PropensityWeights unit =
                PropensityWeights::from_scores({"x0"}, std::vector<double>(20, 0.5));
            Maybe crd = causal_risk_difference(d, preds, unit);
            REQUIRE(crd);
            long long n1 = 0, p1 = 0, n0 = 0, p0 = 0;
            for (int i = 0; i < 20; ++i) {
                if (s[i]) {
                    ++n1;
                    p1 += preds[i];
                } else {
                    ++n0;
                    p0 += preds[i];
                }
            }
            double brute = static_cast<double>(p1) / n1 - static_cast<double>(p0) / n0;
            CHECK_THAT(*crd, Catch::Matchers::WithinAbs(brute, 1e-15));
        }
    }
    SECTION("no positive predictions gives 0") {
        std::vector<int> preds(7, 0);
        PropensityWeights pw =
            PropensityWeights::from_scores({"dept_choice"}, std::vector<double>(7, 0.5));
        CHECK(*causal_risk_difference(seven.data, preds, pw) == 0.0);
    }
    SECTION("zero weighted privileged mass is absent") {
        PropensityWeights pw = PropensityWeights::from_scores(
            {"dept_choice"}, {0.0, 0.0, 0.5, 0.5, 0.0, 0.5, 0.0});
        CHECK(!causal_risk_difference(seven.data, seven.predictions, pw));
    }
}

TEST_CASE("fairness normalization", "[metrics]") {
    FairnessReport r;
    r.di = 0.675;
    r.tprb = 0.0;
    r.tnrb = 0.2;
    r.cd = 0.14;
    r.crd = -0.3;
    normalize_fairness(r);
    CHECK_THAT(*r.normalized.di, Catch::Matchers::WithinAbs(0.675, 1e-15));
    CHECK(*r.normalized.tprb == 1.0);
    CHECK_THAT(*r.normalized.tnrb, Catch::Matchers::WithinAbs(0.8, 1e-15));
    CHECK_THAT(*r.normalized.cd, Catch::Matchers::WithinAbs(0.86, 1e-15));
    CHECK_THAT(*r.normalized.crd, Catch::Matchers::WithinAbs(0.7, 1e-15));
    CHECK(r.reverse.crd);
    CHECK(!r.reverse.tprb);
    CHECK(!r.reverse.di);

    SECTION("DI above 1 maps through the reciprocal and sets the reverse flag") {
        FairnessReport hi;
        hi.di = 2.0;
        normalize_fairness(hi);
        CHECK(*hi.normalized.di == 0.5);
        CHECK(hi.reverse.di);
    }
    SECTION("DI sentinel values normalize to 0") {
        FairnessReport inf_r;
        inf_r.di = std::numeric_limits<double>::infinity();
        normalize_fairness(inf_r);
        CHECK(*inf_r.normalized.di == 0.0);
        FairnessReport zero_r;
        zero_r.di = 0.0;
        normalize_fairness(zero_r);
        CHECK(*zero_r.normalized.di == 0.0);
    }
    SECTION("normalization is monotone in |raw| and stays in [0,1]") {
        double prev = 2.0;
        for (double t : {0.0, 0.1, 0.4, 0.9, 1.0}) {
            FairnessReport rr;
            rr.tprb = t;
            normalize_fairness(rr);
            CHECK(*rr.normalized.tprb <= prev);
            CHECK(*rr.normalized.tprb >= 0.0);
            CHECK(*rr.normalized.tprb <= 1.0);
            prev = *rr.normalized.tprb;
        }
    }
}

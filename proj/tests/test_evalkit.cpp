#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "nint/analysis.hpp"
#include "nint/attribution.hpp"
#include "nint/error.hpp"
#include "nint/fusion.hpp"
#include "synthetic.hpp"

using namespace nint;
using namespace nint::evalkit;
using dmint::ModelGraph;

namespace {

std::vector<std::string> id_range(const std::string& prefix, int from, int to) {
    std::vector<std::string> out;
    for (int i = from; i < to; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

}  // namespace

// ---- feature tables --------------------------------------------------------

TEST_CASE("feature tables round-trip through jsonl") {
    FeatureTable t;
    t.rows["a"] = {1.0, 2.5, -3.0};
    t.rows["b"] = {0.0};
    std::istringstream in(features_to_jsonl(t));
    FeatureTable back = load_features(in, "mem");
    CHECK(back.rows == t.rows);
}

TEST_CASE("malformed feature lines report their line number") {
    std::istringstream in("{\"id\":\"a\",\"values\":[1]}\n{\"id\":\"b\"}\n");
    try {
        load_features(in, "mem");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == "ParseError");
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("intent feature table widths follow the source") {
    Corpus c = synthetic::make_corpus(3, 7);
    ModelGraph g = ModelGraph::init(synthetic::small_config());
    FeatureTable intent = intent_feature_table(g, c, FusionSource::Intent);
    FeatureTable concat = intent_feature_table(g, c, FusionSource::Concat);
    CHECK(intent.rows.at("syn0").size() == static_cast<size_t>(g.cfg.d_int));
    CHECK(concat.rows.at("syn0").size() == static_cast<size_t>(4 * g.cfg.d_int));
}

// ---- fusion ----------------------------------------------------------------

TEST_CASE("separable task features reach the ceiling with and without intent") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise(0.0, 0.05);
    FeatureTable task, intent;
    std::map<std::string, double> labels;
    for (int i = 0; i < 60; ++i) {
        std::string id = "x" + std::to_string(i);
        double label = i % 2;
        task.rows[id] = {label * 2.0 - 1.0 + noise(rng), noise(rng)};
        intent.rows[id] = {noise(rng), noise(rng)};
        labels[id] = label;
    }
    FusionSpec spec;
    FusionOutcome out = fuse_and_train(task, intent, labels, id_range("x", 0, 40),
                                       id_range("x", 40, 60), spec);
    CHECK(out.fused_cls.macro_f1 == doctest::Approx(1.0));
    CHECK(out.control_cls.macro_f1 == doctest::Approx(1.0));
    CHECK(out.fused_dim == 4);
    CHECK(out.control_dim == 2);
}

TEST_CASE("labels carried only by intent features make fusion win") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> noise(0.0, 1.0);
    FeatureTable task, intent;
    std::map<std::string, double> labels;
    for (int i = 0; i < 80; ++i) {
        std::string id = "y" + std::to_string(i);
        double label = i % 2;
        task.rows[id] = {noise(rng), noise(rng)};  // pure noise
        intent.rows[id] = {label * 2.0 - 1.0, noise(rng) * 0.1};
        labels[id] = label;
    }
    FusionSpec spec;
    FusionOutcome out = fuse_and_train(task, intent, labels, id_range("y", 0, 60),
                                       id_range("y", 60, 80), spec);
    CHECK(out.fused_cls.macro_f1 == doctest::Approx(1.0));
    CHECK(out.fused_cls.macro_f1 > out.control_cls.macro_f1);
}

TEST_CASE("regression fusion lowers rmse when popularity is linear in intent") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 1.0);
    FeatureTable task, intent;
    std::map<std::string, double> labels;
    for (int i = 0; i < 80; ++i) {
        std::string id = "z" + std::to_string(i);
        double f1 = noise(rng), f2 = noise(rng);
        task.rows[id] = {noise(rng)};
        intent.rows[id] = {f1, f2};
        labels[id] = 2.0 * f1 - f2 + 0.05 * noise(rng);
    }
    FusionSpec spec;
    spec.task = FusionTask::Regression;
    spec.epochs = 400;
    FusionOutcome out = fuse_and_train(task, intent, labels, id_range("z", 0, 60),
                                       id_range("z", 60, 80), spec);
    CHECK(out.fused_reg.rmse < out.control_reg.rmse);
    CHECK(out.fused_reg.rmse < 0.5);
}

TEST_CASE("missing ids raise alignment errors") {
    FeatureTable task, intent;
    task.rows["a"] = {1.0};
    intent.rows["a"] = {1.0};
    std::map<std::string, double> labels{{"a", 1.0}, {"b", 0.0}};
    FusionSpec spec;
    spec.epochs = 1;
    try {
        fuse_and_train(task, intent, labels, {"a", "b"}, {"a"}, spec);
        FAIL("expected AlignmentError");
    } catch (const Error& e) {
        CHECK(e.code() == "AlignmentError");
        CHECK(std::string(e.what()).find("'b'") != std::string::npos);
    }
}

// ---- attribution -----------------------------------------------------------

TEST_CASE("attribution scores are non-negative and zero on masked rows") {
    auto cfg = synthetic::small_config();
    ModelGraph g = ModelGraph::init(cfg);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> dist(0.0, 1.0);
    ad::Mat w(6, cfg.encoder.d);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = dist(rng);
    ad::Mask mask{true, true, false, true, false, true};
    auto scores = attribution_scores(g, w, mask);
    REQUIRE(scores.size() == 6);
    for (size_t j = 0; j < scores.size(); ++j)
        for (double s : scores[j]) {
            CHECK(s >= 0.0);
            if (!mask[j]) CHECK(s == 0.0);
        }
    // unmasked content tokens should move at least one extractor
    double total = 0.0;
    for (size_t j = 0; j < scores.size(); ++j)
        if (mask[j]) total += scores[j][0] + scores[j][1] + scores[j][2];
    CHECK(total > 0.0);
}

TEST_CASE("a zeroed belief extractor attributes nothing to belief") {
    auto cfg = synthetic::small_config();
    ModelGraph g = ModelGraph::init(cfg);
    g.extractors[0].proj_w.setZero();
    g.extractors[0].proj_b.setZero();
    Corpus c = synthetic::make_corpus(1, 5);
    auto tokens = attribute(g, c.articles[0]);
    REQUIRE(!tokens.empty());
    for (const auto& t : tokens) {
        CHECK(t.scores[0] == 0.0);
        CHECK(t.scores[1] >= 0.0);
    }
}

TEST_CASE("attribution matches a perturbation oracle within 5 percent") {
    auto cfg = synthetic::small_config();
    ModelGraph g = ModelGraph::init(cfg);
    // move parameters off their tiny init so ||F_t||_1 has no sign kinks
    // within the probe step
    std::mt19937_64 rng(6);
    std::normal_distribution<double> dist(0.0, 0.1);
    g.for_each_param([&](const std::string&, ad::Mat& p) {
        for (Eigen::Index i = 0; i < p.size(); ++i) p(i) += dist(rng);
    });
    ad::Mat w(5, cfg.encoder.d);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = dist(rng) * 10.0;
    ad::Mask mask(5, true);

    auto l1 = [&](int t, const ad::Mat& wm) {
        ad::Tape tape;
        auto params = dmint::insert_params(tape, g);
        auto fwd = dmint::forward_embedded(tape, g, params, tape.input(wm), mask);
        std::array<int, 3> nodes{fwd.f_belief, fwd.f_desire, fwd.f_plan};
        return tape.value(tape.sum_abs(nodes[static_cast<size_t>(t)]))(0, 0);
    };

    auto scores = attribution_scores(g, w, mask);
    const double h = 1e-6;
    for (int t = 0; t < 3; ++t)
        for (Eigen::Index j = 0; j < w.rows(); ++j) {
            double sum_sq = 0.0;
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                ad::Mat up = w, dn = w;
                up(j, c) += h;
                dn(j, c) -= h;
                double fd = (l1(t, up) - l1(t, dn)) / (2 * h);
                sum_sq += fd * fd;
            }
            double oracle = std::sqrt(sum_sq);
            double got = scores[static_cast<size_t>(j)][static_cast<size_t>(t)];
            CHECK(std::abs(got - oracle) <= 0.05 * std::max(oracle, 1e-6));
        }
}

TEST_CASE("attribution jsonl validates and rejects bad records") {
    auto cfg = synthetic::small_config();
    ModelGraph g = ModelGraph::init(cfg);
    Corpus c = synthetic::make_corpus(1, 8);
    auto tokens = attribute(g, c.articles[0]);
    std::string jsonl = attribution_jsonl(c.articles[0].id, tokens);
    validate_attribution_jsonl(jsonl);  // no throw
    CHECK_THROWS_AS(validate_attribution_jsonl("{\"article_id\":\"a\"}\n"), Error);
    CHECK_THROWS_AS(validate_attribution_jsonl("not json\n"), Error);
    CHECK_THROWS_AS(validate_attribution_jsonl(
                        "{\"article_id\":\"a\",\"index\":0,\"token\":\"t\",\"belief\":-1,"
                        "\"desire\":0,\"plan\":0}\n"),
                    Error);
}

TEST_CASE("heatmap document contains every token once per dimension") {
    auto cfg = synthetic::small_config();
    ModelGraph g = ModelGraph::init(cfg);
    Corpus c = synthetic::make_corpus(1, 9);
    auto tokens = attribute(g, c.articles[0]);
    std::string html = attribution_html(c.articles[0].id, tokens);
    CHECK(html.find("<h2>belief</h2>") != std::string::npos);
    CHECK(html.find("<h2>desire</h2>") != std::string::npos);
    CHECK(html.find("<h2>plan</h2>") != std::string::npos);
    size_t count = 0, at = 0;
    while ((at = html.find("class=\"tok\"", at)) != std::string::npos) {
        ++count;
        ++at;
    }
    CHECK(count == 3 * tokens.size());
}

// ---- consistency tables ----------------------------------------------------

namespace {

NewsArticle labeled_article(const std::string& id, const std::string& topic, Stance stance,
                            Fairness fairness, std::set<Desire> desires, int posts, int depth) {
    NewsArticle a;
    a.id = id;
    a.topic = topic;
    a.title = "t";
    a.content = "c";
    a.domain = "d";
    a.date = "2021-01-01";
    IntentAnnotation ann;
    ann.annotator_id = "h";
    ann.belief.stance = stance;
    ann.plan.fairness = fairness;
    ann.desire.categories = std::move(desires);
    a.annotations.push_back(ann);
    for (int p = 0; p < posts; ++p)
        a.social.posts.push_back({"p" + std::to_string(p), "x", "", p == 0 ? depth : 0});
    return a;
}

}  // namespace

TEST_CASE("every against article unfair gives proportion 1") {
    Corpus c;
    c.vocab = Vocabulary::defaults();
    c.articles.push_back(labeled_article("a1", "t", Stance::Against, Fairness::Unfair,
                                         {Desire::PublicInterest}, 0, 0));
    c.articles.push_back(labeled_article("a2", "t", Stance::Against, Fairness::Unfair,
                                         {Desire::PublicInterest}, 0, 0));
    c.articles.push_back(labeled_article("a3", "t", Stance::Favor, Fairness::Fair,
                                         {Desire::PublicInterest}, 0, 0));
    auto rows = unfair_by_stance(c);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].group == "favor");
    CHECK(rows[0].unfair_proportion == doctest::Approx(0.0));
    CHECK(rows[1].group == "against");
    CHECK(rows[1].unfair_proportion == doctest::Approx(1.0));
    CHECK(rows[2].empty_group);  // no neutral articles
}

TEST_CASE("eight-article fixture matches hand tabulation") {
    Corpus c;
    c.vocab = Vocabulary::defaults();
    // against: 3 articles, 2 unfair; favor: 3 articles, 1 unfair; neutral: 2, 0 unfair
    c.articles.push_back(labeled_article("b1", "t1", Stance::Against, Fairness::Unfair,
                                         {Desire::PoliticalInterest}, 4, 3));
    c.articles.push_back(labeled_article("b2", "t1", Stance::Against, Fairness::Unfair,
                                         {Desire::PoliticalInterest, Desire::EconomicInterest},
                                         2, 1));
    c.articles.push_back(labeled_article("b3", "t1", Stance::Against, Fairness::Fair,
                                         {Desire::PublicInterest}, 6, 2));
    c.articles.push_back(labeled_article("b4", "t1", Stance::Favor, Fairness::Unfair,
                                         {Desire::EconomicInterest}, 0, 0));
    c.articles.push_back(labeled_article("b5", "t2", Stance::Favor, Fairness::Fair,
                                         {Desire::PublicInterest}, 3, 2));
    c.articles.push_back(labeled_article("b6", "t2", Stance::Favor, Fairness::Fair,
                                         {Desire::PsychologicalFulfillment}, 1, 1));
    c.articles.push_back(labeled_article("b7", "t2", Stance::Neutral, Fairness::Fair,
                                         {Desire::PublicInterest}, 5, 4));
    c.articles.push_back(labeled_article("b8", "t2", Stance::Neutral, Fairness::Fair,
                                         {Desire::PublicInterest, Desire::PoliticalInterest},
                                         2, 0));
    auto stance_rows = unfair_by_stance(c);
    CHECK(stance_rows[0].unfair_proportion == doctest::Approx(1.0 / 3.0));  // favor
    CHECK(stance_rows[1].unfair_proportion == doctest::Approx(2.0 / 3.0));  // against
    CHECK(stance_rows[2].unfair_proportion == doctest::Approx(0.0));        // neutral

    auto desire_rows = unfair_by_desire(c);
    // public: b3,b5,b7,b8 -> 0/4; political: b1,b2,b8 -> 2/3;
    // economic: b2,b4 -> 2/2; psychological: b6 -> 0/1
    CHECK(desire_rows[0].articles == 4);
    CHECK(desire_rows[0].unfair_proportion == doctest::Approx(0.0));
    CHECK(desire_rows[1].unfair_proportion == doctest::Approx(2.0 / 3.0));
    CHECK(desire_rows[2].unfair_proportion == doctest::Approx(1.0));
    CHECK(desire_rows[3].unfair_proportion == doctest::Approx(0.0));

    std::string csv = proportions_csv(stance_rows);
    CHECK(csv.find("against,3,0.6667,false") != std::string::npos);
}

TEST_CASE("engagement z-scores per topic match a direct computation") {
    Corpus c;
    c.vocab = Vocabulary::defaults();
    // one topic, post counts {4, 2, 6} -> z = {0, -1.2247, 1.2247}
    c.articles.push_back(labeled_article("e1", "tech", Stance::Favor, Fairness::Fair,
                                         {Desire::PublicInterest}, 4, 2));
    c.articles.push_back(labeled_article("e2", "tech", Stance::Favor, Fairness::Fair,
                                         {Desire::PoliticalInterest}, 2, 1));
    c.articles.push_back(labeled_article("e3", "tech", Stance::Favor, Fairness::Fair,
                                         {Desire::PublicInterest, Desire::PoliticalInterest},
                                         6, 3));
    auto rows = engagement_by_desire(c);
    REQUIRE(rows.size() == 4);
    double z = std::sqrt(3.0 / 2.0);
    CHECK(rows[0].desire == "public interest");
    CHECK(rows[0].avg_z_post_count == doctest::Approx((0.0 + z) / 2.0));
    CHECK(rows[1].avg_z_post_count == doctest::Approx((-z + z) / 2.0));
    CHECK(rows[2].empty_group);
    CHECK_FALSE(rows[0].zero_variance);
    // depth {2,1,3} -> z = {0,-z,z}
    CHECK(rows[0].avg_z_max_depth == doctest::Approx((0.0 + z) / 2.0));
}

TEST_CASE("identical engagement statistics set the zero-variance flag") {
    Corpus c;
    c.vocab = Vocabulary::defaults();
    for (int i = 0; i < 3; ++i)
        c.articles.push_back(labeled_article("v" + std::to_string(i), "one", Stance::Favor,
                                             Fairness::Fair, {Desire::PublicInterest}, 2, 1));
    auto rows = engagement_by_desire(c);
    CHECK(rows[0].zero_variance);
    CHECK(rows[0].avg_z_post_count == 0.0);
    std::string csv = engagement_csv(rows);
    CHECK(csv.find(",true\n") != std::string::npos);
}

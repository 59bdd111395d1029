#include <gtest/gtest.h>

#include <cmath>

#include "monoembed/pca.hpp"
#include "monoembed/projection.hpp"
#include "test_util.hpp"

namespace monoembed {
namespace {

LabeledCorpus corpus(const std::string& app, const std::vector<TermCounts>& terms) {
  LabeledCorpus c;
  c.app_name = app;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    ClassUnit u;
    u.id = static_cast<int>(i);
    u.fqn = "p.C" + std::to_string(i);
    u.terms = terms[i];
    c.classes.push_back(u);
  }
  c.calls.n = c.interactions.n = static_cast<int>(terms.size());
  return c;
}

ProjectionModel identity_model(const LabeledCorpus& c) {
  ProjectionModel m;
  m.base = fit_base_features({c}, "bow");
  m.dim_in = m.dim_out = m.base.dim_in();
  m.W.assign(static_cast<std::size_t>(m.dim_in) * m.dim_out, 0.0);
  for (int i = 0; i < m.dim_in; ++i) m.w(i, i) = 1.0;
  m.b.assign(m.dim_out, 0.0);
  return m;
}

}  // namespace

TEST(Projection, IdentityReproducesBaseFeatures) {
  const auto c = corpus("a", {{{"pet", 2}}, {{"owner", 1}, {"pet", 1}}, {{"visit", 4}}});
  const auto e = apply_projection(identity_model(c), c);
  EXPECT_EQ(e.values, embed_bow(c).values);
}

TEST(Projection, BiasOnlyModel) {
  const auto c = corpus("a", {{{"pet", 2}}, {{"owner", 1}}});
  auto m = identity_model(c);
  std::fill(m.W.begin(), m.W.end(), 0.0);
  m.b = {0.5, -2.0};
  const auto e = apply_projection(m, c);
  for (std::size_t r = 0; r < e.n(); ++r) {
    EXPECT_EQ(e.values(r, 0), 0.5);
    EXPECT_EQ(e.values(r, 1), -2.0);
  }
}

TEST(Projection, ZeroGradientLeavesParametersUnchanged) {
  // anchor == positive in feature space and the negative sits far away, so every hinge is inactive.
  const auto c = corpus("r", {{{"pet", 1}}, {{"pet", 1}}, {{"visit", 500}}});
  const std::vector<Triplet> ts{{"r", "p.C0", "p.C1", "p.C2"}};
  TrainConfig cfg;
  cfg.dim_out = 4;
  cfg.base_features = "bow";
  cfg.epochs = 0;
  const auto before = train_projection(ts, {c}, cfg);
  ASSERT_EQ(before.loss_history.size(), 1u);
  ASSERT_EQ(before.loss_history[0], 0.0);
  cfg.epochs = 5;
  const auto after = train_projection(ts, {c}, cfg);
  EXPECT_EQ(after.W, before.W);
  EXPECT_EQ(after.b, before.b);
  EXPECT_EQ(after.loss_history, std::vector<double>(6, 0.0));
}

TEST(Projection, TrainingIsSeededAndLossDrops) {
  const auto c = corpus("r", {{{"pet", 1}, {"shared", 2}},
                              {{"pet", 1}, {"vet", 1}, {"shared", 2}},
                              {{"owner", 1}, {"shared", 2}},
                              {{"owner", 1}, {"city", 1}, {"shared", 2}}});
  const std::vector<Triplet> ts{{"r", "p.C0", "p.C1", "p.C2"}, {"r", "p.C2", "p.C3", "p.C1"},
                                {"r", "p.C1", "p.C0", "p.C3"}, {"r", "p.C3", "p.C2", "p.C0"}};
  TrainConfig cfg;
  cfg.dim_out = 3;
  cfg.epochs = 40;
  cfg.lr = 0.05;
  const auto a = train_projection(ts, {c}, cfg);
  const auto b = train_projection(ts, {c}, cfg);
  EXPECT_EQ(model_to_json(a).dump(), model_to_json(b).dump());
  ASSERT_EQ(a.loss_history.size(), 41u);
  EXPECT_LT(a.loss_history.back(), a.loss_history.front());
  for (double v : a.b) EXPECT_EQ(v, 0.0);
  cfg.seed = 43;
  EXPECT_NE(model_to_json(train_projection(ts, {c}, cfg)).dump(), model_to_json(a).dump());
}

TEST(Projection, Errors) {
  const auto c = corpus("r", {{{"pet", 1}}, {{"owner", 1}}, {{"vet", 1}}});
  TrainConfig cfg;
  EXPECT_THROW(train_projection({}, {c}, cfg), Error);
  EXPECT_THROW(train_projection({{"r", "p.C0", "p.C1", "nope"}}, {c}, cfg), Error);
  EXPECT_THROW(train_projection({{"other", "p.C0", "p.C1", "p.C2"}}, {c}, cfg), Error);
  cfg.alpha = 0.0;
  EXPECT_THROW(train_projection({{"r", "p.C0", "p.C1", "p.C2"}}, {c}, cfg), Error);
}

TEST(Projection, NonFiniteLossIsFatal) {
  const auto c = corpus("r", {{{"pet", 1}}, {{"owner", 1}}, {{"vet", 1}}});
  TrainConfig cfg;
  // huge steps with a margin that keeps the hinge active drive W to infinity
  cfg.lr = 1e308;
  cfg.alpha = 1e300;
  cfg.epochs = 50;
  try {
    train_projection({{"r", "p.C0", "p.C1", "p.C2"}}, {c}, cfg);
    FAIL() << "expected a non-finite loss";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos);
  }
}

TEST(Projection, HeldOutClassGivesFiniteRow) {
  const auto train = corpus("r", {{{"pet", 1}}, {{"pet", 2}}, {{"owner", 1}}});
  TrainConfig cfg;
  cfg.dim_out = 5;
  cfg.epochs = 5;
  const auto m = train_projection({{"r", "p.C0", "p.C1", "p.C2"}}, {train}, cfg);
  const auto e = apply_projection(m, corpus("new", {{{"pet", 1}, {"unseen", 3}}, {{"unseen", 1}}}));
  ASSERT_EQ(e.m(), 5u);
  for (double v : e.values.data()) EXPECT_TRUE(std::isfinite(v));
  // only out-of-vocabulary terms: the input vector is zero, so the row is the bias
  for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(e.values(1, j), 0.0);
}

TEST(Projection, ModelJsonRoundTrip) {
  const auto c = corpus("r", {{{"pet", 1}}, {{"pet", 2}}, {{"owner", 1}}});
  TrainConfig cfg;
  cfg.dim_out = 2;
  cfg.epochs = 2;
  const auto m = train_projection({{"r", "p.C0", "p.C1", "p.C2"}}, {c}, cfg);
  testing::TempDir tmp;
  save_model(tmp.path() / "m.json", m);
  const auto back = load_model(tmp.path() / "m.json");
  EXPECT_EQ(back.W, m.W);
  EXPECT_EQ(back.b, m.b);
  EXPECT_EQ(back.base.vocabulary, m.base.vocabulary);
  EXPECT_EQ(back.base.idf, m.base.idf);
  EXPECT_EQ(back.loss_history, m.loss_history);
  EXPECT_EQ(apply_projection(back, c).values, apply_projection(m, c).values);

  auto j = model_to_json(m);
  j["W"].erase(j["W"].size() - 1);
  EXPECT_THROW(model_from_json(nlohmann::json::parse(j.dump())), Error);
}

TEST(Pca, TwoDimensionalInputIsRotationOfCentredData) {
  const auto x = Matrix::from_rows({{0, 0}, {2, 1}, {4, 3}, {-1, 5}, {3, -2}});
  const auto p = pca_project(x);
  ASSERT_EQ(p.rows(), 5u);
  ASSERT_EQ(p.cols(), 2u);
  // pairwise distances survive a rotation / reflection
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      const double d0 = std::hypot(x(i, 0) - x(j, 0), x(i, 1) - x(j, 1));
      const double d1 = std::hypot(p(i, 0) - p(j, 0), p(i, 1) - p(j, 1));
      EXPECT_NEAR(d0, d1, 1e-10);
    }
  }
  double s0 = 0, s1 = 0, mean0 = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    s0 += p(i, 0) * p(i, 0);
    s1 += p(i, 1) * p(i, 1);
    mean0 += p(i, 0);
  }
  EXPECT_NEAR(mean0, 0.0, 1e-10);
  EXPECT_GE(s0, s1);
}

TEST(Pca, ConstantMatrixGivesZeros) {
  const auto p = pca_project(Matrix(4, 3, 5.0));
  for (double v : p.data()) EXPECT_EQ(v, 0.0);
}

TEST(Pca, OneColumnPadsSecondAxis) {
  const auto p = pca_project(Matrix::from_rows({{1}, {2}, {4}}));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(p(i, 1), 0.0);
  EXPECT_NEAR(std::abs(p(2, 0) - p(0, 0)), 3.0, 1e-12);
}

}  // namespace monoembed

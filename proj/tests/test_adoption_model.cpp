#include <gtest/gtest.h>

#include "adoptsub/adoption_model.hpp"
#include "adoptsub/affinity.hpp"
#include "adoptsub/errors.hpp"
#include "adoptsub/numeric_oracle.hpp"
#include "test_support.hpp"

namespace adoptsub {
namespace {

using testing::h_reference;
using testing::random_params;

ModelParams market(double u_min, double u_max, double c, double e, double gamma = 1.0) {
  return {u_min, u_max, c, e, gamma};
}

TEST(ModelParams, RejectsInvalid) {
  EXPECT_THROW(market(2, 1, 1, 1).validate(), InvalidParameters);
  EXPECT_THROW(market(1, 1, 1, 1).validate(), InvalidParameters);
  EXPECT_THROW(market(1, 2, 1, -0.1).validate(), InvalidParameters);
  EXPECT_THROW(market(1, 2, -1, 1).validate(), InvalidParameters);
  EXPECT_THROW(market(1, 2, 1, 1, 0.0).validate(), InvalidParameters);
  EXPECT_THROW(market(1, 2, NAN, 1).validate(), InvalidParameters);
  EXPECT_NO_THROW(market(1, 2, 0, 0).validate());
  try {
    market(2, 1, 1, 1).validate();
  } catch (const InvalidParameters& err) {
    EXPECT_NE(std::string(err.what()).find("u_min < u_max"), std::string::npos);
  }
}

TEST(UniformAffinity, CcdfAndDensity) {
  const UniformAffinity u(1.0, 3.0);
  EXPECT_EQ(u.ccdf(0.0), 1.0);
  EXPECT_EQ(u.ccdf(1.0), 1.0);
  EXPECT_DOUBLE_EQ(u.ccdf(2.5), 0.25);
  EXPECT_EQ(u.ccdf(3.0), 0.0);
  EXPECT_EQ(u.ccdf(7.0), 0.0);
  EXPECT_DOUBLE_EQ(u.density(2.0), 0.5);
  EXPECT_EQ(u.density(3.5), 0.0);
  // Density integrates to one.
  double mass = 0.0;
  for (int i = 0; i < 2000; ++i) mass += u.density(1.0 + (i + 0.5) * 1e-3) * 1e-3;
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_THROW(UniformAffinity(1.0, 1.0), InvalidParameters);
}

TEST(WouldAdopt, TableValues) {
  const auto p = market(1, 2, 2.5, 2);
  EXPECT_EQ(would_adopt(0.25, p), 0.0);
  EXPECT_DOUBLE_EQ(would_adopt(0.5, p), 0.5);
  EXPECT_EQ(would_adopt(0.9, p), 1.0);
  // Defined off [0, 1] with the same formula.
  EXPECT_EQ(would_adopt(-3.0, p), 0.0);
  EXPECT_EQ(would_adopt(4.0, p), 1.0);
}

TEST(WouldAdopt, MatchesReferenceAndIsMonotone) {
  for (int k = 0; k < 200; ++k) {
    const auto p = random_params();
    double prev = -1.0;
    for (int i = -20; i <= 120; ++i) {
      const double x = i / 100.0;
      const double h = would_adopt(x, p);
      EXPECT_NEAR(h, h_reference(x, p), 1e-13);
      EXPECT_GE(h, prev);
      prev = h;
    }
  }
}

TEST(WouldAdopt, BandSlopeBound) {
  for (int k = 0; k < 100; ++k) {
    const auto p = random_params();
    const double slope = p.externality / (p.u_max - p.u_min);
    for (int i = 0; i < 100; ++i) {
      const double x = i / 100.0;
      const double dx = 1e-3;
      EXPECT_LE(would_adopt(x + dx, p) - would_adopt(x, p), slope * dx * (1 + 1e-9) + 1e-15);
    }
  }
}

TEST(InteriorEquilibrium, Values) {
  EXPECT_DOUBLE_EQ(interior_equilibrium(5.0, market(1, 2, 5, 2)), 3.0);
  EXPECT_DOUBLE_EQ(interior_equilibrium(2.5, market(1, 2, 2.5, 2)), 0.5);
  EXPECT_DOUBLE_EQ(interior_equilibrium(2.5, market(1, 2, 2.5, 3)), 0.25);
  EXPECT_THROW(interior_equilibrium(2.5, market(1, 2, 2.5, 1)), SingularParameters);
}

TEST(ClassifyEquilibria, ExampleTable) {
  struct Row {
    double c, e;
    int case_id;
    double interior, lo, hi;
  };
  // u = [1, 2]; the four orderings of c against u_max and u_min + e.
  const Row rows[] = {{5.0, 2.0, 1, 3.0, 1.5, 2.0},
                      {1.75, 0.5, 2, 0.5, -0.5, 1.5},
                      {2.5, 2.0, 3, 0.5, 0.25, 0.75},
                      {1.0, 0.5, 4, 2.0, -2.0, 0.0}};
  for (const auto& r : rows) {
    const auto rep = classify_equilibria(market(1, 2, r.c, r.e));
    EXPECT_EQ(rep.case_id, r.case_id);
    ASSERT_TRUE(rep.interior.has_value());
    EXPECT_NEAR(*rep.interior, r.interior, 1e-12);
    EXPECT_NEAR(*rep.band_low, r.lo, 1e-12);
    EXPECT_NEAR(*rep.band_high, r.hi, 1e-12);
  }
}

TEST(ClassifyEquilibria, Sets) {
  auto rep = classify_equilibria(market(1, 2, 5, 2));
  ASSERT_EQ(rep.equilibria.size(), 1u);
  EXPECT_EQ(rep.equilibria[0].level, 0.0);
  EXPECT_EQ(rep.equilibria[0].stability, Stability::kStable);

  rep = classify_equilibria(market(1, 2, 2.5, 2));
  ASSERT_EQ(rep.equilibria.size(), 3u);
  EXPECT_EQ(rep.equilibria[0].level, 0.0);
  EXPECT_DOUBLE_EQ(rep.equilibria[1].level, 0.5);
  EXPECT_EQ(rep.equilibria[1].stability, Stability::kUnstable);
  EXPECT_EQ(rep.equilibria[2].level, 1.0);
  EXPECT_EQ(rep.equilibria[2].stability, Stability::kStable);

  rep = classify_equilibria(market(1, 2, 1.75, 0));
  EXPECT_EQ(rep.case_id, 2);
  ASSERT_EQ(rep.equilibria.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.equilibria[0].level, 0.25);
  EXPECT_EQ(rep.equilibria[0].stability, Stability::kStable);
  EXPECT_FALSE(rep.band_low.has_value());
  EXPECT_FALSE(rep.band_high.has_value());
}

TEST(ClassifyEquilibria, BoundaryTieUsesFirstRow) {
  // c == u_max == 2 with u_min + e = 3: rows 3 and 4 both hold, row 3 wins.
  auto rep = classify_equilibria(market(1, 2, 2, 2));
  EXPECT_EQ(rep.case_id, 3);
  // c == u_max and c == u_min + e would make every level balanced.
  EXPECT_THROW(classify_equilibria(market(1, 2, 2, 1)), SingularParameters);
  // u_max == u_min + e with c != u_max: no interior point, report still works.
  rep = classify_equilibria(market(1, 2, 2.5, 1));
  EXPECT_EQ(rep.case_id, 1);
  EXPECT_FALSE(rep.interior.has_value());
  ASSERT_EQ(rep.equilibria.size(), 1u);
  EXPECT_EQ(rep.equilibria[0].level, 0.0);
}

TEST(StabilityOf, Examples) {
  const auto p = market(1, 2, 2.5, 2);
  EXPECT_EQ(stability_of(0.5, p), Stability::kUnstable);
  EXPECT_EQ(stability_of(0.0, p), Stability::kStable);
  EXPECT_EQ(stability_of(1.0, p), Stability::kStable);
  EXPECT_EQ(stability_of(0.25, market(1, 2, 1.75, 0)), Stability::kStable);
  EXPECT_THROW(stability_of(0.3, p), NotAnEquilibrium);
  EXPECT_STREQ(to_string(Stability::kUnstable), "unstable");
}

TEST(ClassifyEquilibria, ListedPointsAreFixedPoints) {
  for (int k = 0; k < 400; ++k) {
    const auto p = random_params();
    const auto rep = classify_equilibria(p);
    for (const auto& eq : rep.equilibria) {
      EXPECT_GE(eq.level, 0.0);
      EXPECT_LE(eq.level, 1.0);
      EXPECT_LE(std::abs(h_reference(eq.level, p) - eq.level), 1e-12);
    }
    const bool three = rep.equilibria.size() == 3 &&
                       rep.equilibria[1].stability == Stability::kUnstable;
    EXPECT_EQ(rep.case_id == 3, three) << "case " << rep.case_id;
    if (rep.case_id == 3) {
      EXPECT_LE(*rep.band_low, *rep.interior);
      EXPECT_LE(*rep.interior, *rep.band_high);
    }
  }
}

TEST(ClassifyEquilibria, AgreesWithBruteForce) {
  for (int k = 0; k < 300; ++k) {
    const auto p = random_params();
    const auto rep = classify_equilibria(p);
    const auto brute = brute_force_equilibria(p);
    ASSERT_EQ(rep.equilibria.size(), brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i) {
      EXPECT_NEAR(rep.equilibria[i].level, brute[i].level, 1e-9);
      EXPECT_EQ(rep.equilibria[i].stability, brute[i].stability);
    }
  }
}

}  // namespace
}  // namespace adoptsub

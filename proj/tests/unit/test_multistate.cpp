#include <doctest.h>

#include <cmath>

#include "survkit/multistate.hpp"
#include "survkit/univariate.hpp"
#include "test_helpers.hpp"

using namespace survkit;
using testkit::rec;

TEST_CASE("intensity increments on D3 match the hand enumeration") {
  const auto panel = testkit::panel_of(testkit::d3());
  const auto path = cumulative_intensity_matrix(panel);
  REQUIRE(path.times == std::vector<double>{1, 2});

  const auto da1 = path.increment(0);
  CHECK(da1(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(da1(0, 2) == 0.0);
  const auto da2 = path.increment(1);
  CHECK(da2(0, 2) == doctest::Approx(0.5).epsilon(1e-15));

  // rows sum to zero
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const auto da = path.increment(i);
    for (Eigen::Index h = 0; h < da.rows(); ++h) {
      CHECK(std::abs(da.row(h).sum()) <= 1e-15);
    }
  }
}

TEST_CASE("survival panels reduce to the univariate Nelson-Aalen") {
  const auto panel = testkit::panel_of(testkit::d1());
  const auto path = cumulative_intensity_matrix(panel);
  const auto na = nelson_aalen(panel, "alive", "dead");
  const auto cumulative =
      path.cumulative(*panel.state_index("alive"), *panel.state_index("dead"));
  REQUIRE(cumulative.times() == na.hazard.times());
  for (std::size_t i = 0; i < cumulative.size(); ++i) {
    CHECK(cumulative.values()[i] == na.hazard.values()[i]);
  }
}

TEST_CASE("Aalen-Johansen on D3: first row is (1/3, 1/3, 1/3)") {
  const auto panel = testkit::panel_of(testkit::d3());
  const auto path = aalen_johansen(cumulative_intensity_matrix(panel), 0, 2);
  const auto p = path.at(2);
  CHECK(p(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(p(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(p(0, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("two-state Aalen-Johansen equals Kaplan-Meier bit for bit") {
  for (auto records : {testkit::d1(), testkit::random_survival(21, 35)}) {
    const auto panel = testkit::panel_of(records);
    const auto km = kaplan_meier(panel);
    const auto path =
        aalen_johansen(cumulative_intensity_matrix(panel), 0,
                       panel.times().back());
    const auto alive = static_cast<Eigen::Index>(*panel.state_index("alive"));
    REQUIRE(path.times == km.survival.times());
    for (std::size_t i = 0; i < path.times.size(); ++i) {
      CHECK(path.matrices[i](alive, alive) == km.survival.values()[i]);
    }
  }
}

TEST_CASE("empty windows give the identity") {
  const auto panel = testkit::panel_of(testkit::d3());
  const auto intensities = cumulative_intensity_matrix(panel);
  const auto path = aalen_johansen(intensities, 1.5, 1.5);
  CHECK(path.times.empty());
  CHECK(path.at(1.5).isIdentity(0.0));
  CHECK_THROWS_AS(aalen_johansen(intensities, 2.0, 1.0), Error);
}

TEST_CASE("Chapman-Kolmogorov factorization at grid points") {
  const auto panel = testkit::panel_of(testkit::random_survival(31, 40));
  const auto intensities = cumulative_intensity_matrix(panel);
  const double end = panel.times().back();
  const auto full = aalen_johansen(intensities, 0, end);
  for (double u : {panel.times()[panel.times().size() / 3],
                   panel.times()[2 * panel.times().size() / 3]}) {
    const auto left = aalen_johansen(intensities, 0, u);
    const auto right = aalen_johansen(intensities, u, end);
    const Eigen::MatrixXd product = left.at(u) * right.at(end);
    CHECK((product - full.at(end)).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("transition matrices are stochastic along the path") {
  const auto panel = testkit::panel_of(testkit::random_survival(41, 50));
  const auto path = aalen_johansen(cumulative_intensity_matrix(panel), 0,
                                   panel.times().back());
  for (const auto& p : path.matrices) {
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      CHECK(std::abs(p.row(r).sum() - 1.0) <= 1e-10);
      for (Eigen::Index c = 0; c < p.cols(); ++c) {
        CHECK(p(r, c) >= -1e-15);
        CHECK(p(r, c) <= 1.0 + 1e-15);
      }
    }
  }
}

TEST_CASE("covariance of an empty window is zero") {
  const auto panel = testkit::panel_of(testkit::d3());
  const auto cov = aj_covariance(cumulative_intensity_matrix(panel), 0.5, 0.5);
  CHECK(cov.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("survival reduction: P11 variance equals the Greenwood variance") {
  for (auto records : {testkit::d1(), testkit::random_survival(55, 30)}) {
    const auto panel = testkit::panel_of(records);
    const auto km = kaplan_meier(panel);
    const auto intensities = cumulative_intensity_matrix(panel);
    const auto alive = static_cast<Eigen::Index>(*panel.state_index("alive"));
    const auto k = static_cast<Eigen::Index>(panel.states().size());
    for (double t : panel.times()) {
      const auto cov = aj_covariance(intensities, 0, t);
      const double var_p11 = cov(alive * k + alive, alive * k + alive);
      CHECK(var_p11 == doctest::Approx(km.variance(t)).epsilon(1e-10));
    }
  }
}

TEST_CASE("covariance matrices are symmetric with nonnegative diagonal") {
  const auto panel = testkit::panel_of(testkit::d3());
  const auto cov = aj_covariance(cumulative_intensity_matrix(panel), 0, 3);
  CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    CHECK(cov(i, i) >= -1e-15);
  }
}

TEST_CASE("D3 covariance against a direct Duhamel enumeration") {
  // Error propagation by hand over the two event times.
  //   time 1: Y=3, dN(1->2)=1, multinomial var(dA12) = (1/3)(2/3)/3 = 2/27;
  //           completed diagonal var(dA11) = 2/27, cov(dA11,dA13) = 0.
  //   time 2: Y=2, dN(1->3)=1, var(dA13) = (1/2)(1/2)/2 = 1/8.
  // err(P12) = dE12(1) [R(1,1)=1] + P11(0,1) dE12(2) [second term zero]
  //   -> var(P12(0,2)) = 2/27.
  // err(P13) = dE11(1) R(0,2) + dE13(1) + P11(0,1) dE13(2)
  //          = dE11(1)/2 + 0 + (2/3) dE13(2)
  //   -> var(P13(0,2)) = (1/4)(2/27) + (4/9)(1/8) = 1/54 + 1/18 = 2/27.
  const auto panel = testkit::panel_of(testkit::d3());
  const auto cov = aj_covariance(cumulative_intensity_matrix(panel), 0, 2);
  const Eigen::Index k = 3;
  CHECK(cov(1 * k + 0, 1 * k + 0) == doctest::Approx(2.0 / 27.0).epsilon(1e-12));
  CHECK(cov(2 * k + 0, 2 * k + 0) == doctest::Approx(2.0 / 27.0).epsilon(1e-12));
}

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <random>

#include "psmas/cost.hpp"
#include "psmas/error.hpp"
#include "support.hpp"

using namespace psmas;
using psmas::testing::gaussian_tail_quadrature;
using psmas::testing::kPi;

namespace {

CostParams six_agents(double epsilon, double alpha) {
  CostParams p;
  p.n = 6;
  p.L = 1000;
  p.R_bar = 300;
  p.epsilon = epsilon;
  p.alpha = alpha;
  return p;
}

double epsilon_star_oracle(double q, double d, double a, double l) {
  using big = boost::multiprecision::cpp_dec_float_50;
  const big two_pi = 2 * boost::math::constants::pi<big>();
  return static_cast<double>(two_pi / (big(1) - big(q) * big(d) / ((big(1) - big(a)) * big(l))));
}

}  // namespace

TEST(ActivationFraction, Examples) {
  EXPECT_EQ(activation_fraction(2 * kPi), 1.0);
  EXPECT_EQ(activation_fraction(kPi), 0.5);
  EXPECT_NEAR(activation_fraction(2 * kPi / 6), 1.0 / 6, 1e-15);
  EXPECT_THROW(activation_fraction(0.0), Error);
  EXPECT_THROW(activation_fraction(7.0), Error);
}

TEST(CostFull, Examples) {
  EXPECT_EQ(cost_full(6, 1000, 300), 7800);
  EXPECT_EQ(cost_full(0, 1000, 300), 0);
  EXPECT_EQ(cost_full(1, 0, 5), 5);
}

TEST(CostPsmas, Examples) {
  EXPECT_NEAR(cost_psmas(six_agents(kPi, 0.12)), 6000 * 0.56 + 900, 1e-9);
  EXPECT_NEAR(cost_psmas(six_agents(kPi, 1.0)), 6900, 1e-9);
  EXPECT_EQ(cost_psmas(six_agents(2 * kPi, 0.3)), 7800);
}

TEST(ReductionRatio, Examples) {
  EXPECT_NEAR(reduction_ratio(1e-12, 0.12), 0.88, 1e-12);
  EXPECT_EQ(reduction_ratio(2 * kPi, 0.4), 0.0);
  EXPECT_NEAR(reduction_ratio(0.5, 0.12), 0.88 * (1 - 0.5 / 6.283), 1e-3);
  EXPECT_NEAR(reduction_ratio(0.5, 0.12), 0.810, 1e-3);
}

TEST(DecomposeGains, Examples) {
  const auto g = decompose_gains(six_agents(kPi, 0.12));
  EXPECT_NEAR(g.scheduling, 900.0 / 7800, 1e-12);
  EXPECT_NEAR(g.compression, (6900.0 - 4260.0) / 7800, 1e-12);
  EXPECT_NEAR(g.total(), 0.4538, 1e-4);
  EXPECT_EQ(decompose_gains(six_agents(kPi, 1.0)).compression, 0.0);
  for (double a : {0.05, 0.12, 0.5, 0.99}) {
    EXPECT_EQ(decompose_gains(six_agents(kPi, a)).scheduling, g.scheduling);
  }
}

TEST(OptimalEpsilon, Examples) {
  const double e = optimal_epsilon(0.95, 0.04, 0.12, 50000);
  EXPECT_NEAR(e, 6.28319, 1e-4);
  EXPECT_NEAR(e / (2 * kPi) - 1, 8.636e-7, 1e-9);
  // The closed form lands near 2pi, nowhere near 0.52 rad.
  EXPECT_GT(std::fabs(e - 0.52), 5.0);
  EXPECT_EQ(optimal_epsilon(0.95, 0.0, 0.12, 50000), 2 * kPi);
  // Q_min delta_Q = 0.5 (1 - alpha) L_bar.
  EXPECT_NEAR(optimal_epsilon(1.0, 0.5 * 0.88 * 100, 0.12, 100), 4 * kPi, 1e-12);
}

TEST(OptimalEpsilon, Degenerate) {
  try {
    optimal_epsilon(1.0, 88.0, 0.12, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateDenominator);
  }
  EXPECT_THROW(optimal_epsilon(1.0, 1.0, 1.0, 100), Error);
}

TEST(OptimalEpsilon, MatchesHighPrecisionOracle) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> q(0.5, 1.0), d(0.0, 500.0), a(0.01, 0.95), l(1000.0, 100000.0);
  for (int k = 0; k < 200; ++k) {
    const double Q = q(rng), D = d(rng), A = a(rng), L = l(rng);
    const double oracle = epsilon_star_oracle(Q, D, A, L);
    EXPECT_LE(std::fabs(optimal_epsilon(Q, D, A, L) - oracle) / oracle, 1e-9);
  }
}

TEST(QualityBound, Examples) {
  EXPECT_NEAR(quality_bound(0.028, 0.3 * kPi, 0.12), 0.028 * 0.85 * 0.88, 1e-15);
  EXPECT_NEAR(quality_bound(0.028, 0.3 * kPi, 0.12), 0.02094, 1e-5);
  EXPECT_EQ(quality_bound(0.028, 2 * kPi, 0.12), 0.0);
  EXPECT_EQ(quality_bound(0.028, 1.0, 1.0), 0.0);
}

TEST(ViolationBound, Examples) {
  EXPECT_EQ(violation_probability_bound(0.0, 1.0), 0.5);
  EXPECT_NEAR(violation_probability_bound(0.98, 1.0), gaussian_tail_quadrature(0.98), 1e-12);
  EXPECT_NEAR(violation_probability_bound(0.98, 1.0), 0.16354, 1e-4);
  EXPECT_NEAR(violation_probability_bound(0.83, 1.0), gaussian_tail_quadrature(0.83), 1e-12);
  EXPECT_NEAR(violation_probability_bound(0.83, 1.0), 0.20327, 1e-4);
  // Far from the printed 0.003.
  EXPECT_GT(violation_probability_bound(0.83, 1.0), 0.2);
  try {
    violation_probability_bound(1.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveSigma);
  }
}

TEST(ViolationBound, MatchesQuadratureAndIsMonotone) {
  double prev = 1.0;
  for (double z = -6.0; z <= 6.0 + 1e-12; z += 0.01) {
    const double v = violation_probability_bound(z, 1.0);
    EXPECT_NEAR(v, gaussian_tail_quadrature(z), 1e-10) << z;
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(ExpectedViolations, Examples) {
  EXPECT_NEAR(expected_violations(0.003, 10, 5), 0.15, 1e-15);
  EXPECT_EQ(expected_violations(0.0, 10, 5), 0.0);
  EXPECT_NEAR(expected_violations(0.2033, 4, 3), 2.4396, 1e-12);
}

TEST(ClassifyRegime, Examples) {
  EXPECT_EQ(classify_regime(0.6, 0.5), Regime::Efficient);
  EXPECT_EQ(classify_regime(1.0, 0.95), Regime::VelocityFailure);
  EXPECT_EQ(classify_regime(0.2, 0.5), Regime::OverCompressed);
  EXPECT_EQ(classify_regime(1.2, 0.5), Regime::OverActivated);
  EXPECT_EQ(classify_regime(0.6, 0.89), Regime::OverActivated);
  EXPECT_EQ(classify_regime(2.0, 0.1), Regime::OverActivated);
  EXPECT_THROW(classify_regime(0.0, 0.5), Error);
  EXPECT_THROW(classify_regime(2.3, 0.5), Error);
  EXPECT_THROW(classify_regime(1.0, -0.1), Error);
}

TEST(ConvergenceFactor, Examples) {
  EXPECT_NEAR(convergence_factor(0.3 * kPi, 0.12), 0.868, 1e-12);
  EXPECT_LE(convergence_factor(0.3 * kPi, 0.12), 0.88);
  EXPECT_NEAR(convergence_factor(2 * kPi, 1e-12), 0.0, 1e-11);
  EXPECT_EQ(convergence_factor(1.0, 1.0), 1.0);
}

TEST(CostProperties, RandomParams) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eps(1e-6, 2 * kPi), alpha(1e-6, 1.0), n(1, 64), L(0, 1e5), R(0, 1e4);
  for (int k = 0; k < 5000; ++k) {
    CostParams p;
    p.n = std::floor(n(rng));
    p.L = L(rng);
    p.R_bar = R(rng);
    p.epsilon = eps(rng);
    p.alpha = alpha(rng);
    const double full = cost_full(p.n, p.L, p.R_bar);
    const auto g = decompose_gains(p);
    if (full > 0) {
      EXPECT_NEAR(1 - cost_psmas(p) / full, g.total(), 1e-12);
    }

    CostParams q = p;
    q.alpha = alpha(rng);
    EXPECT_EQ(decompose_gains(q).scheduling, g.scheduling);

    CostParams whole = p;
    whole.epsilon = 2 * kPi;
    EXPECT_EQ(cost_psmas(whole), full);

    CostParams no_resp = p;
    no_resp.R_bar = 0;
    if (p.n * p.L > 0) {
      EXPECT_NEAR(1 - cost_psmas(no_resp) / cost_full(p.n, p.L, 0), reduction_ratio(p.epsilon, p.alpha), 1e-12);
    }

    const double rho = reduction_ratio(p.epsilon, p.alpha);
    EXPECT_GE(rho, 0.0);
    EXPECT_LT(rho, 1.0);
    const double e2 = std::min(2 * kPi, p.epsilon * 1.1);
    const double a2 = std::min(1.0, p.alpha * 1.1);
    EXPECT_LE(reduction_ratio(e2, p.alpha), rho);
    EXPECT_LE(reduction_ratio(p.epsilon, a2), rho);

    if (p.alpha < 1.0) {
      const double c = convergence_factor(p.epsilon, p.alpha);
      EXPECT_GT(c, 0.0);
      EXPECT_LT(c, 1.0);
      if (e2 > p.epsilon) {
        EXPECT_LT(convergence_factor(e2, p.alpha), c);
      }
    }
  }
}

TEST(CostParamsValidate, Ranges) {
  CostParams p = six_agents(1.0, 0.12);
  EXPECT_NO_THROW(p.validate());
  p.alpha = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = six_agents(0.0, 0.12);
  EXPECT_THROW(p.validate(), Error);
  p = six_agents(1.0, 0.12);
  p.Q_min = 1.5;
  EXPECT_THROW(p.validate(), Error);
}

TEST(CostReport, Fields) {
  CostParams p = six_agents(kPi, 0.12);
  p.Q_min = 0.95;
  p.delta_Q = 0.04;
  p.C_Q = 0.028;
  p.L_bar = 50000;
  const auto r = make_cost_report(p, 0.85);
  EXPECT_NEAR(r.cost_psmas, 4260, 1e-9);
  EXPECT_EQ(r.cost_full, 7800);
  ASSERT_TRUE(r.epsilon_star);
  EXPECT_NEAR(*r.epsilon_star, 6.28319, 1e-4);
  EXPECT_FALSE(r.regime);  // pi > 2.2 is off the regime map
  p.epsilon = 0.6;
  EXPECT_EQ(make_cost_report(p, 0.5).regime, Regime::Efficient);
}

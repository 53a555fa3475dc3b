#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "dtcm/exact.hpp"
#include "dtcm/qspecial.hpp"

using namespace dtcm;

namespace {

ModelParams params(double g, int nb, int ns) { return ModelParams{g, nb, ns}; }

double sum_over_finals(const SpinConfig& initial, const ModelParams& p) {
  double total = 0.0;
  const int n = initial.size();
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c)
    total += transition_probability(initial, SpinConfig::from_index(c, n), p);
  return total;
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) { ::setenv(name, value, 1); }
  ~ScopedEnv() { ::unsetenv(name_); }

 private:
  const char* name_;
};

}  // namespace

TEST(SpinConfig, ParseAndIndex) {
  const auto c = SpinConfig::parse("101");
  EXPECT_EQ(c.size(), 3);
  EXPECT_TRUE(c.up(1));
  EXPECT_FALSE(c.up(2));
  EXPECT_EQ(c.down_count(), 1);
  EXPECT_EQ(c.index(), 5u);
  EXPECT_EQ(SpinConfig::from_index(5, 3), c);
  EXPECT_EQ(c.complement().to_string(), "010");
  EXPECT_EQ(c.with_flipped(2).to_string(), "111");
  EXPECT_THROW(SpinConfig::parse("10x"), std::invalid_argument);
  EXPECT_THROW(SpinConfig::parse(""), std::invalid_argument);
}

TEST(ModelParams, Validation) {
  EXPECT_THROW(params(-0.1, 0, 2).validate(), std::invalid_argument);
  EXPECT_THROW(params(0.1, -1, 2).validate(), std::invalid_argument);
  EXPECT_THROW(params(0.1, 0, 0).validate(), std::invalid_argument);
  EXPECT_THROW(params(std::nan(""), 0, 2).validate(), std::invalid_argument);
  EXPECT_DOUBLE_EQ(params(0.3, 2, 4).log_stay(3), -kTwoPi * 0.09 * 5);
}

TEST(Monomial, ParseAndPrint) {
  const auto m = Monomial::parse("p4*p5^2*p6*q5^3");
  EXPECT_EQ(m.degree(), 7u);
  EXPECT_EQ(m.to_string(), "p4*q5^3*p5^2*p6");
  EXPECT_EQ(Monomial::parse("q_2*p_2*q_3"), Monomial::parse("q2*p2*q3"));
  EXPECT_EQ(Monomial::parse("1").degree(), 0u);
  EXPECT_EQ(Monomial().to_string(), "1");
  EXPECT_THROW(Monomial::parse("r2"), std::invalid_argument);
  EXPECT_THROW(Monomial::parse("p0"), std::invalid_argument);
}

TEST(TransitionMonomial, ThreeSpinExample) {
  const auto m = transition_monomial(SpinConfig::parse("101"), SpinConfig::parse("000"));
  EXPECT_EQ(m, Monomial::parse("q2*p2*q3"));
  EXPECT_EQ(m.to_string(), "q2*p2*q3");
}

TEST(TransitionMonomial, SevenSpinSamples) {
  const auto i = SpinConfig::parse("0010100");
  EXPECT_EQ(transition_monomial(i, i), Monomial::parse("p5^5*p6^2"));
  EXPECT_EQ(transition_monomial(i, SpinConfig::parse("0110010")), Monomial::parse("p4*p5^2*p6*q5^3"));
  EXPECT_EQ(transition_monomial(i, SpinConfig::parse("1101111")), Monomial::parse("p4*q2*q3^3*q4*q5"));
  EXPECT_EQ(transition_monomial(i, SpinConfig::parse("1101011")), Monomial::parse("q3*q4^5*q5"));
  EXPECT_EQ(transition_monomial(i, SpinConfig::parse("1101011")).to_string(), "q3*q4^5*q5");
}

TEST(TransitionMonomial, IsIndependentOfCoupling) {
  // the monomial carries no g, so every evaluation comes from the same factors
  const auto i = SpinConfig::parse("0110");
  const auto f = SpinConfig::parse("1001");
  const auto m = transition_monomial(i, f);
  for (double g : {0.05, 0.3, 1.2})
    EXPECT_DOUBLE_EQ(transition_probability(i, f, params(g, 1, 4)), m.value(params(g, 1, 4)));
}

TEST(TransitionMonomial, LengthMismatch) {
  EXPECT_THROW(transition_monomial(SpinConfig::parse("10"), SpinConfig::parse("101")), std::invalid_argument);
  EXPECT_THROW(transition_probability(SpinConfig::parse("10"), SpinConfig::parse("10"), params(0.1, 0, 3)),
               std::invalid_argument);
}

TEST(TransitionProbability, FrozenValues) {
  // 50-digit evaluation of the three factors
  EXPECT_NEAR(transition_probability(SpinConfig::parse("101"), SpinConfig::parse("000"), params(0.3, 0, 3)),
              0.17850044074237012346, 1e-15);
  EXPECT_NEAR(transition_probability(SpinConfig::parse("0010100"), SpinConfig::parse("1101011"), params(0.5, 0, 7)),
              0.98141673281584614417, 1e-15);
}

TEST(TransitionProbability, ZeroCoupling) {
  const auto p = params(0.0, 2, 4);
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t b = 0; b < 16; ++b) {
      const double v = transition_probability(SpinConfig::from_index(a, 4), SpinConfig::from_index(b, 4), p);
      EXPECT_EQ(v, a == b ? 1.0 : 0.0);
    }
  }
}

TEST(TransitionProbability, NormalisedProperty) {
  for (int ns = 1; ns <= 10; ++ns) {
    for (double g : {0.05, 0.2, 0.5, 1.0, 2.0}) {
      for (int nb : {0, 3}) {
        const auto p = params(g, nb, ns);
        // every initial state for small N_s, a spread of them beyond
        const std::uint64_t count = std::uint64_t{1} << ns;
        const std::uint64_t stride = ns <= 6 ? 1 : count / 13 + 1;
        for (std::uint64_t c = 0; c < count; c += stride)
          EXPECT_NEAR(sum_over_finals(SpinConfig::from_index(c, ns), p), 1.0, 1e-12) << ns << " " << g;
      }
    }
  }
}

TEST(TransitionProbability, MonotoneInCoupling) {
  for (const char* text : {"0010100", "1", "10", "0101", "111000"}) {
    const auto i = SpinConfig::parse(text);
    double last_diag = 2.0, last_anti = -1.0;
    for (double g = 0.0; g <= 2.0; g += 0.01) {
      const auto p = params(g, 1, i.size());
      const double diag = transition_probability(i, i, p);
      const double anti = transition_probability(i, i.complement(), p);
      EXPECT_LE(diag, last_diag);
      EXPECT_GE(anti, last_anti);
      last_diag = diag;
      last_anti = anti;
    }
  }
}

TEST(ComplementSymmetry, ThreeSpinExample) {
  const auto i = SpinConfig::parse("101");
  const auto f = SpinConfig::parse("000");
  EXPECT_TRUE(verify_complement_symmetry(i, f));
  EXPECT_EQ(transition_monomial(i.complement(), f.complement()), Monomial::parse("q2*p2*q1"));
  EXPECT_EQ(transition_monomial(i, f).reflected(3), Monomial::parse("q2*p2*q1"));
}

TEST(ComplementSymmetry, ExhaustiveSmall) {
  for (int ns = 1; ns <= 5; ++ns) {
    const std::uint64_t count = std::uint64_t{1} << ns;
    for (std::uint64_t a = 0; a < count; ++a) {
      for (std::uint64_t b = 0; b < count; ++b) {
        const auto i = SpinConfig::from_index(a, ns), f = SpinConfig::from_index(b, ns);
        ASSERT_TRUE(verify_complement_symmetry(i, f)) << i.to_string() << " -> " << f.to_string();
        if (a == b) {
          const auto m = transition_monomial(i, f);
          for (const auto& factor : m.factors()) EXPECT_EQ(factor.kind, FactorKind::stay);
        }
      }
    }
  }
}

TEST(ForwardDistribution, TwoSpinTable) {
  for (double g : {0.1, 0.5, 1.0}) {
    const double x = std::exp(-kTwoPi * g * g);
    const auto d = forward_distribution(params(g, 0, 2));
    EXPECT_NEAR(d.prob(0), x * x, 1e-15);
    EXPECT_NEAR(d.prob(1), x * (1 - x * x), 1e-15);
    EXPECT_NEAR(d.prob(2), (1 - x) * (1 - x * x), 1e-15);
    EXPECT_EQ(d.process(), Process::forward);
  }
}

TEST(InverseDistribution, TwoSpinTable) {
  for (double g : {0.1, 0.5, 1.0}) {
    const double x = std::exp(-kTwoPi * g * g);
    const auto d = inverse_distribution(params(g, 0, 2));
    EXPECT_NEAR(d.prob(0), (1 - x) * (1 - x * x), 1e-15);
    EXPECT_NEAR(d.prob(1), x * (1 + x) * (1 - x * x), 1e-15);
    EXPECT_NEAR(d.prob(2), std::pow(x, 4), 1e-15);
    EXPECT_EQ(d.process(), Process::inverse);
  }
}

TEST(PolarisedDistributions, ZeroCouplingPointMass) {
  const auto f = forward_distribution(params(0.0, 2, 5));
  const auto i = inverse_distribution(params(0.0, 2, 5));
  EXPECT_EQ(f.prob(0), 1.0);
  EXPECT_EQ(i.prob(5), 1.0);
  EXPECT_EQ(f.total(), 1.0);
  EXPECT_EQ(i.total(), 1.0);
}

TEST(PolarisedDistributions, MatchBruteForceMarginal) {
  for (int ns = 1; ns <= 8; ++ns) {
    for (double g : {0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0}) {
      for (int nb : {0, 1, 4}) {
        const auto p = params(g, nb, ns);
        const auto fwd = forward_distribution(p);
        const auto inv = inverse_distribution(p);
        const auto bf_fwd = polarization_marginal(SpinConfig::all_up(ns), p);
        const auto bf_inv = polarization_marginal(SpinConfig::all_down(ns), p);
        for (std::size_t nu = 0; nu < fwd.size(); ++nu) {
          EXPECT_NEAR(fwd.prob(nu), bf_fwd.prob(nu), 1e-12) << ns << " " << g << " " << nb;
          EXPECT_NEAR(inv.prob(nu), bf_inv.prob(nu), 1e-12) << ns << " " << g << " " << nb;
        }
      }
    }
  }
}

TEST(PolarisedDistributions, MatchRawSums) {
  for (int ns = 1; ns <= 12; ++ns) {
    for (double g : {0.05, 0.2, 0.4, 1.0}) {
      for (int nb : {0, 2}) {
        const auto p = params(g, nb, ns);
        const auto fwd = forward_distribution(p), raw_fwd = forward_distribution_rawsum(p);
        const auto inv = inverse_distribution(p), raw_inv = inverse_distribution_rawsum(p);
        for (std::size_t nu = 0; nu < fwd.size(); ++nu) {
          EXPECT_NEAR(fwd.prob(nu), raw_fwd.prob(nu), 1e-12);
          EXPECT_NEAR(inv.prob(nu), raw_inv.prob(nu), 1e-12);
        }
      }
    }
  }
}

TEST(RawSums, ThreeSpinsTight) {
  const auto p = params(0.4, 0, 3);
  const auto fwd = forward_distribution(p), raw = forward_distribution_rawsum(p);
  const auto inv = inverse_distribution(p), raw_inv = inverse_distribution_rawsum(p);
  for (std::size_t nu = 0; nu < 4; ++nu) {
    EXPECT_NEAR(fwd.prob(nu), raw.prob(nu), 1e-13);
    EXPECT_NEAR(inv.prob(nu), raw_inv.prob(nu), 1e-13);
  }
  // nu = 0: one composition, p_1^{2S}
  EXPECT_NEAR(raw.prob(0), std::exp(3 * p.log_stay(1)), 1e-16);
}

TEST(RawSums, SizeGuard) {
  EXPECT_THROW(forward_distribution_rawsum(params(0.2, 0, 31)), std::length_error);
  EXPECT_NO_THROW(forward_distribution_rawsum(params(0.2, 0, 31), 31));
  {
    ScopedEnv env("DTCM_MAX_BRUTEFORCE_NS", "4");
    EXPECT_THROW(inverse_distribution_rawsum(params(0.2, 0, 5)), std::length_error);
    EXPECT_THROW(polarization_marginal(SpinConfig::all_up(5), params(0.2, 0, 5)), std::length_error);
  }
  {
    ScopedEnv env("DTCM_MAX_BRUTEFORCE_NS", "zero");
    EXPECT_THROW(bruteforce_spin_limit(20), std::invalid_argument);
  }
  EXPECT_THROW(polarization_marginal(SpinConfig::all_up(21), params(0.2, 0, 21)), std::length_error);
}

TEST(PolarisedDistributions, QBernsteinIdentity) {
  for (int ns : {1, 2, 5, 17, 60, 400}) {
    for (double g : {0.01, 0.1, 0.3, 0.8}) {
      for (int nb : {0, 3}) {
        const auto p = params(g, nb, ns);
        const QParam x = p.x();
        const auto fwd = forward_distribution(p);
        const auto bern = q_binomial_distribution(QBinomialDistSpec{ns, (nb + 1) * x.log(), x});
        for (int nu = 0; nu <= ns; ++nu) {
          const double a = fwd.prob(static_cast<std::size_t>(nu));
          const double b = bern.prob(static_cast<std::size_t>(ns - nu));
          if (a == 0.0 && b == 0.0) continue;
          EXPECT_NEAR(a / b, 1.0, 1e-12) << ns << " " << g << " " << nu;
        }
      }
    }
  }
}

TEST(PolarisedDistributions, LargeSpinIsStable) {
  const auto p = params(0.1, 0, 2000);
  for (const auto& d : {forward_distribution(p), inverse_distribution(p)}) {
    for (double lp : d.log_probs()) {
      EXPECT_FALSE(std::isnan(lp));
      EXPECT_LT(lp, 1e-12);
    }
    EXPECT_NEAR(d.total(), 1.0, 1e-9);
  }
}

TEST(PartitionFunction, Examples) {
  const QParam x = QParam::from_value(0.5);
  EXPECT_EQ(partition_function(0, 7, x), 1.0);
  EXPECT_EQ(partition_function(0, 1, QParam::from_value(1.0)), 1.0);
  for (int n = 0; n <= 20; ++n) EXPECT_NEAR(partition_function(n, 1, x), 1.0, 1e-15);
  EXPECT_NEAR(partition_function(2, 2, x), 1.75, 1e-15);
  EXPECT_NEAR(partition_function_bruteforce(2, 2, x), 1.75, 1e-15);
  EXPECT_THROW(partition_function(-1, 2, x), std::domain_error);
  EXPECT_THROW(partition_function(1, 0, x), std::domain_error);
}

TEST(PartitionFunction, ProductMatchesBruteForce) {
  for (double xv : {0.1, 0.5, 0.9, 1.0}) {
    const QParam x = QParam::from_value(xv);
    for (int levels = 1; levels <= 8; ++levels) {
      for (int n = 0; n <= 15; ++n) {
        const double z = partition_function(n, levels, x);
        EXPECT_NEAR(partition_function_bruteforce(n, levels, x) / z, 1.0, 1e-13);
        EXPECT_NEAR(std::exp(log_partition_function(n, levels, x)) / z, 1.0, 1e-13);
      }
    }
  }
}

TEST(PartitionFunction, RecursionProperty) {
  for (double xv : {0.2, 0.77, 0.999}) {
    const QParam x = QParam::from_value(xv);
    for (int levels : {1, 3, 10, 50}) {
      for (int n = 1; n <= 100; ++n) {
        const double lhs = partition_function(n, levels, x);
        const double rhs = partition_function(n - 1, levels, x) * x.one_minus_pow(n + levels - 1) / x.one_minus_pow(n);
        EXPECT_NEAR(lhs / rhs, 1.0, 1e-13);
      }
    }
  }
}

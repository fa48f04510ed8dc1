#include <gtest/gtest.h>

#include "formkit/lebesgue.hpp"
#include "test_support.hpp"

using namespace formkit;
using formkit::testing::absolutely_continuous_part;
using formkit::testing::Gen;
using formkit::testing::min_eig;
using formkit::testing::naive_parallel_sum;
using formkit::testing::rel_err;

namespace {

CMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const CMatrix kOnes = m2(1, 1, 1, 1);
const PositiveForm kTheta10(m2(1, 0, 0, 0));

// Ω of any kind with Ψ ∈ M(Ω) and Θ of random rank; no absolute continuity.
struct Triple {
  Form omega;
  PositiveForm theta;
  PositiveForm psi;
};

Triple random_triple(Gen& gen, Eigen::Index n) {
  auto [omega, psi] = gen.form_with_majorant(n, gen.integer(0, static_cast<int>(n)));
  return {Form(omega), PositiveForm(gen.psd(n, gen.integer(0, static_cast<int>(n)))),
          PositiveForm(psi)};
}

}  // namespace

TEST(LebesgueDecompose, IdentityThetaIsRegular) {
  Gen gen(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = gen.integer(1, 6);
    auto [omega, psi] = gen.form_with_majorant(n, gen.integer(1, static_cast<int>(n)));
    const auto split = lebesgue_decompose(Form(omega), PositiveForm::identity(n), PositiveForm(psi));
    EXPECT_EQ(split.P.norm(), 0);
    EXPECT_EQ(split.omega_s.matrix().norm(), 0);
    EXPECT_LE(rel_err(split.omega_r.matrix(), omega), 1e-10);
  }
}

TEST(LebesgueDecompose, FullySingularExample) {
  const PositiveForm psi(kOnes);
  const auto split = lebesgue_decompose(psi.form(), kTheta10, psi);
  EXPECT_LE(split.omega_r.matrix().norm(), 1e-15);
  EXPECT_LE((split.omega_s.matrix() - kOnes).norm(), 1e-15);
  const auto check = check_split(split);
  EXPECT_LE(check.witness_theta, 1e-8);
  EXPECT_LE(check.witness_omega, 1e-8);
  EXPECT_TRUE(check.regular.regular);
}

TEST(LebesgueDecompose, BlockDiagonalExample) {
  const PositiveForm psi(m2(3, 0, 0, 5));
  const auto split = lebesgue_decompose(psi.form(), kTheta10, psi);
  EXPECT_LE((split.omega_r.matrix() - m2(3, 0, 0, 0)).norm(), 1e-14);
  EXPECT_LE((split.omega_s.matrix() - m2(0, 0, 0, 5)).norm(), 1e-14);
  EXPECT_LE(rel_err(split.omega_r.matrix(), absolutely_continuous_part(psi.matrix(), kTheta10.matrix())),
            1e-14);
}

TEST(LebesgueDecompose, DegenerateInputs) {
  const Eigen::Index n = 3;
  auto split = lebesgue_decompose(Form::zero(n), PositiveForm(CMatrix(CMatrix::Identity(n, n))),
                                  PositiveForm::zero(n));
  EXPECT_EQ(split.omega_r.matrix().norm(), 0);
  EXPECT_EQ(split.omega_s.matrix().norm(), 0);

  Gen gen(42);
  auto [omega, psi] = gen.form_with_majorant(n, 2);
  split = lebesgue_decompose(Form(omega), PositiveForm::zero(n), PositiveForm(psi));
  EXPECT_LE(split.omega_r.matrix().norm(), 1e-14 * omega.norm());
  EXPECT_LE(rel_err(split.omega_s.matrix(), omega), 1e-12);
}

TEST(LebesgueDecompose, RefusesNonMajorant) {
  try {
    lebesgue_decompose(Complex(2) * Form::identity(2), kTheta10, PositiveForm::identity(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInClassM);
  }
}

TEST(LebesgueDecompose, RandomSplitsSatisfyEveryInvariant) {
  Gen gen(43);
  for (int trial = 0; trial < 150; ++trial) {
    const Triple t = random_triple(gen, gen.integer(1, 8));
    const auto split = lebesgue_decompose(t.omega, t.theta, t.psi);
    const auto check = check_split(split);
    EXPECT_LE(check.additivity, 1e-10);
    EXPECT_TRUE(check.regular.regular) << "residual " << check.regular.representation_residual;
    EXPECT_LE(check.witness_theta, 1e-8);
    EXPECT_LE(check.witness_omega, 1e-8);
    // P is an orthogonal projector.
    EXPECT_LE((split.P * split.P - split.P).norm(), 1e-10);
    EXPECT_LE((CMatrix(split.P.adjoint()) - split.P).norm(), 1e-12);
  }
}

TEST(LebesgueDecompose, PositiveCaseAgreesWithSchurOracle) {
  // With Ω = Ψ the regular part is the Θ-absolutely continuous part of Ψ.
  Gen gen(44);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = gen.integer(1, 6);
    const PositiveForm psi(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const PositiveForm theta(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const auto split = lebesgue_decompose(psi.form(), theta, psi);
    const CMatrix oracle = absolutely_continuous_part(psi.matrix(), theta.matrix());
    EXPECT_LE((split.omega_r.matrix() - oracle).norm(), 1e-8 * std::max(1.0, psi.norm()));
  }
}

TEST(SingularityWitness, Examples) {
  const PositiveForm psi(kOnes);
  const auto split = lebesgue_decompose(psi.form(), kTheta10, psi);
  const CVector e1 = CVector::Unit(2, 0);
  const CVector w = singularity_witness(split.omega_s, kTheta10, split, e1);
  EXPECT_NEAR(std::abs(w(0)), 0, 1e-15);
  EXPECT_NEAR(kTheta10(w), 0, 1e-15);
  const CVector d = w - e1;
  EXPECT_NEAR(std::abs(split.omega_s(d, d)), 0, 1e-15);
  // (ξ′ − ξ) ⊥ (1, 1) fixes ξ′ = (0, 1).
  EXPECT_NEAR(std::abs(w(1) - Complex(1)), 0, 1e-15);

  // A vector already in N(Θ) and inside the singular block is its own witness.
  const PositiveForm blocks(m2(3, 0, 0, 5));
  const auto split2 = lebesgue_decompose(blocks.form(), kTheta10, blocks);
  const CVector e2 = CVector::Unit(2, 1);
  EXPECT_LE((singularity_witness(split2.omega_s, kTheta10, split2, e2) - e2).norm(), 1e-15);
}

TEST(SingularityWitness, RegularCaseGivesZeroVector) {
  Gen gen(45);
  auto [omega, psi] = gen.form_with_majorant(4, 3);
  const auto split = lebesgue_decompose(Form(omega), PositiveForm::identity(4), PositiveForm(psi));
  const CVector xi = gen.complex_matrix(4, 1);
  EXPECT_EQ(singularity_witness(split.omega_s, PositiveForm::identity(4), split, xi).norm(), 0);
}

TEST(SingularityWitness, RejectsForeignSingularPart) {
  const PositiveForm psi(kOnes);
  const auto split = lebesgue_decompose(psi.form(), kTheta10, psi);
  try {
    singularity_witness(Form::identity(2), kTheta10, split, CVector::Unit(2, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WitnessResidualTooLarge);
  }
}

TEST(PositiveLebesgue, Examples) {
  auto parts = positive_lebesgue(PositiveForm(kOnes), kTheta10);
  EXPECT_EQ(parts.psi_a.matrix().norm(), 0);
  EXPECT_LE((parts.psi_s.matrix() - kOnes).norm(), 1e-14);

  parts = positive_lebesgue(PositiveForm(m2(0, 0, 0, 1)), kTheta10);
  EXPECT_EQ(parts.psi_a.matrix().norm(), 0);
  EXPECT_LE((parts.psi_s.matrix() - m2(0, 0, 0, 1)).norm(), 1e-15);

  Gen gen(46);
  const PositiveForm psi(gen.psd(4, 3));
  parts = positive_lebesgue(psi, PositiveForm::identity(4));
  EXPECT_LE(rel_err(parts.psi_a.matrix(), psi.matrix()), 1e-12);
  EXPECT_EQ(parts.psi_s.matrix().norm(), 0);
}

TEST(PositiveLebesgue, RandomPairs) {
  Gen gen(47);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = gen.integer(1, 6);
    const PositiveForm psi(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const PositiveForm theta(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const auto parts = positive_lebesgue(psi, theta);
    const double scale = std::max(1.0, psi.norm());
    EXPECT_LE((parts.psi_a.matrix() + parts.psi_s.matrix() - psi.matrix()).norm(), 1e-10 * scale);
    EXPECT_TRUE(is_absolutely_continuous(parts.psi_a, theta));
    EXPECT_TRUE(is_mutually_singular(parts.psi_s, theta));
    EXPECT_LE((parts.psi_a.matrix() - absolutely_continuous_part(psi.matrix(), theta.matrix())).norm(),
              1e-8 * scale);
  }
}

TEST(ParallelSum, Examples) {
  EXPECT_LE((parallel_sum(PositiveForm::identity(2), PositiveForm::identity(2)).matrix() -
             0.5 * CMatrix::Identity(2, 2))
                .norm(),
            1e-15);
  EXPECT_LE(parallel_sum(kTheta10, PositiveForm(m2(0, 0, 0, 1))).matrix().norm(), 1e-15);

  const PositiveForm a = PositiveForm::identity(2), b(kOnes);
  const CMatrix s = parallel_sum(a, b).matrix();
  // I(I + B)⁻¹B with B = 2·(1,1)(1,1)^T/2: eigenvalue 2 ↦ 2/3 on (1,1), 0 on (1,−1).
  EXPECT_LE((s - kOnes / 3.0).norm(), 1e-15);
  EXPECT_GE(min_eig(a.matrix() - s), -1e-15);
  EXPECT_GE(min_eig(b.matrix() - s), -1e-15);
}

TEST(ParallelSum, MatchesDefinitionAndOrdering) {
  Gen gen(48);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = gen.integer(1, 7);
    const PositiveForm a(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const PositiveForm b(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const CMatrix s = parallel_sum(a, b).matrix();
    const double scale = std::max(1.0, std::max(a.norm(), b.norm()));
    EXPECT_LE((s - naive_parallel_sum(a.matrix(), b.matrix())).norm(), 1e-9 * scale);
    EXPECT_LE((s - parallel_sum(b, a).matrix()).norm(), 1e-9 * scale);
    EXPECT_GE(min_eig(a.matrix() - s), -1e-9 * scale);
    EXPECT_GE(min_eig(b.matrix() - s), -1e-9 * scale);
    // Scaled version agrees with the definition at moderate n.
    const double mult = gen.uniform(0.5, 50);
    const CMatrix scaled = scaled_parallel_sum(a, b, mult).matrix();
    EXPECT_LE((scaled - naive_parallel_sum(a.matrix(), mult * b.matrix())).norm(),
              1e-8 * scale * mult);
  }
}

TEST(MutualSingularity, Examples) {
  EXPECT_TRUE(is_mutually_singular(kTheta10, PositiveForm(m2(0, 0, 0, 1))));
  EXPECT_FALSE(is_mutually_singular(PositiveForm::identity(2), PositiveForm::identity(2)));
  EXPECT_TRUE(is_mutually_singular(PositiveForm(kOnes), kTheta10));
  // Ψ:(nΘ) = 0 for every n in that last pair.
  for (double n : {1.0, 8.0, 1024.0})
    EXPECT_LE(scaled_parallel_sum(PositiveForm(kOnes), kTheta10, n).matrix().norm(), 1e-15);
}

TEST(MutualSingularity, EquivalentToVanishingAcPart) {
  Gen gen(49);
  int singular = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const Eigen::Index n = gen.integer(1, 6);
    // Generic ranges meet iff the ranks add up to more than n, so both verdicts occur.
    const PositiveForm psi(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const PositiveForm theta(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const bool ms = is_mutually_singular(psi, theta);
    const CMatrix oracle = absolutely_continuous_part(psi.matrix(), theta.matrix());
    EXPECT_EQ(ms, oracle.norm() <= 1e-9 * std::max(psi.norm(), 1e-300)) << "trial " << trial;
    EXPECT_EQ(ms, positive_lebesgue(psi, theta).psi_a.matrix().norm() <= 1e-9 * psi.norm());
    singular += ms;
  }
  EXPECT_GT(singular, 10);
  EXPECT_LT(singular, 110);
}

TEST(ParallelSumLimit, ConvergesToAcPart) {
  Gen gen(50);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index n = gen.integer(1, 6);
    const PositiveForm psi(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const PositiveForm theta(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const auto lim = parallel_sum_limit(psi, theta);
    EXPECT_LE(rel_err(lim.limit.matrix(), positive_lebesgue(psi, theta).psi_a.matrix()), 1e-6);
    EXPECT_LE(lim.n, std::ldexp(1.0, 40));
  }
}

TEST(ParallelSumLimit, ExactCasesStopEarly) {
  const auto lim = parallel_sum_limit(PositiveForm(kOnes), kTheta10);
  EXPECT_TRUE(lim.converged);
  EXPECT_EQ(lim.limit.matrix().norm(), 0);
  EXPECT_LE(lim.n, 4);
}

TEST(Maximality, Examples) {
  Gen gen(51);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = gen.integer(1, 6);
    const PositiveForm psi(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const PositiveForm theta(gen.psd(n, gen.integer(0, static_cast<int>(n))));
    const PositiveForm psi_a = positive_lebesgue(psi, theta).psi_a;
    EXPECT_TRUE(maximality_check(psi_a, psi, theta));
    EXPECT_TRUE(maximality_check(0.3 * psi_a, psi, theta));
    EXPECT_TRUE(maximality_check(0.7 * psi_a, psi, theta));
    EXPECT_TRUE(maximality_check(scaled_parallel_sum(psi, theta, 1024), psi, theta));
  }
}

TEST(Maximality, RefusesNonMinorants) {
  try {
    maximality_check(PositiveForm::identity(2), PositiveForm(kOnes), PositiveForm::identity(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionFails);
  }
  try {
    // Ψ itself is a minorant but not Θ-absolutely continuous.
    maximality_check(PositiveForm(kOnes), PositiveForm(kOnes), kTheta10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionFails);
  }
}

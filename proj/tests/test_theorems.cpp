#include <gtest/gtest.h>

#include <functional>

#include "oplens/classifiers.hpp"
#include "oplens/error.hpp"
#include "oplens/generators.hpp"
#include "oplens/theorems.hpp"
#include "test_util.hpp"

using namespace oplens;
using namespace oplens::testing;

namespace {

const ToleranceContext kCtx;
const Complex kI(0.0, 1.0);

ComplexMatrix sixth_root() { return std::polar(1.0, kPi / 3.0) * identity(2); }
ComplexMatrix shear() { return mat2(1, 1, 0, 1); }
ComplexMatrix jordan() { return mat2(0, 1, 0, 0); }

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const OperatorError& e) {
        return e.code();
    }
    return ErrorCode::InternalInconsistency;
}

const Predicate& hypothesis(const TheoremVerdict& v, const std::string& name) {
    for (const auto& h : v.hypotheses) {
        if (h.name == name) return h;
    }
    throw std::runtime_error("no hypothesis " + name);
}

}  // namespace

TEST(LownerHeinz, Examples) {
    EXPECT_TRUE(check_lowner_heinz(diag({4.0, 9.0}), diag({1.0, 4.0}), 0.5, kCtx));
    EXPECT_TRUE(check_lowner_heinz(diag({4.0, 9.0}), diag({1.0, 4.0}), 1.0, kCtx));
    EXPECT_EQ(code_of([] { (void)check_lowner_heinz(diag({1.0, 1.0}), diag({2.0, 0.0}), 0.5, kCtx); }),
              ErrorCode::PreconditionViolated);
    EXPECT_EQ(code_of([] { (void)check_lowner_heinz(identity(2), identity(2), 1.5, kCtx); }),
              ErrorCode::PreconditionViolated);
}

TEST(LownerHeinz, RandomPairs) {
    Rng rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        const int dim = 1 + trial % 8;
        const ComplexMatrix b = random_psd(dim, rng, 1 + static_cast<int>(rng.below(dim)));
        ComplexMatrix a = b + random_psd(dim, rng, 1 + static_cast<int>(rng.below(dim)));
        a = (a + a.adjoint()) * 0.5;
        const double p = rng.uniform();
        EXPECT_TRUE(check_lowner_heinz(a, b, p, kCtx)) << "trial " << trial << " p " << p;
    }
}

TEST(LownerHeinz, CommutingPairAgainstDiagonalOracle) {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = 2 + trial % 5;
        const ComplexMatrix u = random_unitary(dim, rng);
        RealVector lb(dim), la(dim);
        for (int i = 0; i < dim; ++i) {
            lb(i) = rng.uniform(0.0, 2.0);
            la(i) = lb(i) + rng.uniform(0.0, 2.0);
        }
        const ComplexMatrix a = u * la.cast<Complex>().asDiagonal() * u.adjoint();
        const ComplexMatrix b = u * lb.cast<Complex>().asDiagonal() * u.adjoint();
        EXPECT_TRUE(check_lowner_heinz((a + a.adjoint()) * 0.5, (b + b.adjoint()) * 0.5, 0.3, kCtx));
        // Entrywise on the shared eigenbasis.
        for (int i = 0; i < dim; ++i) EXPECT_LE(std::pow(lb(i), 0.3), std::pow(la(i), 0.3));
    }
}

TEST(Kato, Examples) {
    Rng rng(3);
    const ComplexVector x = random_vector(3, rng);
    const ComplexVector y = random_vector(3, rng);
    EXPECT_TRUE(check_kato(identity(3), x, y, 0.4, kCtx));
    const ComplexMatrix h = random_hermitian(3, rng);
    EXPECT_TRUE(check_kato(h, x, x, 1.0, kCtx));
    EXPECT_EQ(code_of([&] { (void)check_kato(h, x, y, 1.5, kCtx); }), ErrorCode::BadDomain);
    EXPECT_EQ(code_of([&] { (void)check_kato(h, random_vector(2, rng), y, 0.5, kCtx); }),
              ErrorCode::DimensionMismatch);
}

TEST(Kato, RandomDraws) {
    Rng rng(4);
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = 1 + trial % 8;
        ComplexMatrix t = random_matrix(dim, rng);
        if (trial % 3 == 0) t.col(0).setZero();  // singular T
        const ComplexVector x = random_vector(dim, rng);
        const ComplexVector y = random_vector(dim, rng);
        const double alpha = trial % 10 == 0 ? static_cast<double>(trial % 20 == 0) : rng.uniform();
        EXPECT_TRUE(check_kato(t, x, y, alpha, kCtx)) << "trial " << trial;
    }
}

TEST(FugledePutnam, Examples) {
    const ComplexMatrix d = diag({1.0, 2.0});
    EXPECT_TRUE(check_fuglede_putnam(diag({3.0, kI}), d, d, kCtx));
    Rng rng(5);
    const ComplexMatrix u = random_unitary(3, rng);
    const ComplexMatrix n = u * random_vector(3, rng).asDiagonal() * u.adjoint();
    EXPECT_TRUE(check_fuglede_putnam(identity(3), n, n, kCtx));
    EXPECT_EQ(code_of([] { (void)check_fuglede_putnam(identity(2), jordan(), jordan(), kCtx); }),
              ErrorCode::PreconditionViolated);
}

TEST(FugledePutnam, IntertwinedEigenspaces) {
    // N = V diag(d) V*, M = W diag(d) W*, T = W X V* with X block diagonal on
    // the repeated eigenvalues of d, so that TN = MT.
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 2 + trial % 6;
        ComplexVector d(dim);
        const Complex repeated = rng.complex_normal();
        for (int i = 0; i < dim; ++i) d(i) = i < 2 ? repeated : rng.complex_normal();
        ComplexMatrix x = ComplexMatrix::Zero(dim, dim);
        x.topLeftCorner(2, 2) = random_matrix(2, rng);
        for (int i = 2; i < dim; ++i) x(i, i) = rng.complex_normal();
        const ComplexMatrix v = random_unitary(dim, rng);
        const ComplexMatrix w = random_unitary(dim, rng);
        const ComplexMatrix n = v * d.asDiagonal() * v.adjoint();
        const ComplexMatrix m = w * d.asDiagonal() * w.adjoint();
        const ComplexMatrix t = w * x * v.adjoint();
        EXPECT_TRUE(check_fuglede_putnam(t, m, n, kCtx)) << "trial " << trial;
    }
}

TEST(CommutingNormalProduct, SharedEigenbasis) {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const int dim = 2 + trial % 5;
        const ComplexMatrix u = random_unitary(dim, rng);
        const ComplexMatrix m = u * random_vector(dim, rng).asDiagonal() * u.adjoint();
        const ComplexMatrix n = u * random_vector(dim, rng).asDiagonal() * u.adjoint();
        EXPECT_TRUE(check_commuting_normal_product(m, n, kCtx));
    }
    EXPECT_THROW((void)check_commuting_normal_product(diag({1.0, 2.0}), mat2(0, 1, 1, 0), kCtx), OperatorError);
}

TEST(CotHalfAngle, Examples) {
    EXPECT_NEAR(cot_halfangle(kPi / 2.0), 1.0, 1e-15);
    EXPECT_NEAR(cot_halfangle(kPi / 3.0), std::sqrt(3.0), 1e-15);
    const double near_pi = cot_halfangle(std::nextafter(kPi, 0.0));
    EXPECT_GT(near_pi, 0.0);
    EXPECT_LT(near_pi, 1e-15);
    EXPECT_EQ(code_of([] { (void)cot_halfangle(0.0); }), ErrorCode::BadDomain);
    EXPECT_EQ(code_of([] { (void)cot_halfangle(kPi); }), ErrorCode::BadDomain);
}

TEST(CotHalfAngle, GridAgainstLongDoubleOracle) {
    const int n = 10000;
    for (int i = 1; i < n; ++i) {
        const double x = kPi * i / n;
        const long double half = static_cast<long double>(x) / 2.0L;
        const double expected = static_cast<double>(std::cos(half) / std::sin(half));
        EXPECT_NEAR(cot_halfangle(x), expected, 1e-12 * std::abs(expected)) << "x " << x;
    }
}

TEST(DyadicProfile, Examples) {
    const auto sh = dyadic_accretivity_profile(shear(), 2, kCtx);
    ASSERT_EQ(sh.size(), 3u);
    EXPECT_NEAR(sh[0].min_eig, 0.5, 1e-14);
    EXPECT_NEAR(sh[1].min_eig, 0.0, 1e-14);
    EXPECT_NEAR(sh[2].min_eig, -1.0, 1e-14);
    EXPECT_TRUE(sh[0].accretive);
    EXPECT_TRUE(sh[1].accretive);
    EXPECT_FALSE(sh[2].accretive);

    const auto root = dyadic_accretivity_profile(sixth_root(), 1, kCtx);
    EXPECT_NEAR(root[0].min_eig, 0.5, 1e-14);
    EXPECT_NEAR(root[1].min_eig, -0.5, 1e-14);

    for (const auto& e : dyadic_accretivity_profile(diag({1.0, 3.0}), 5, kCtx)) EXPECT_GE(e.min_eig, 0.0);
    EXPECT_THROW((void)dyadic_accretivity_profile(shear(), 63, kCtx), OperatorError);
}

TEST(DyadicBound, Formula) {
    // ||Re T|| = 1: ceil(log2(pi / (1e-10 + 1e-12 * ||T||))) + 1.
    const ComplexMatrix t = identity(2);
    const double expected = std::ceil(std::log2(kPi / kCtx.tau(t))) + 1.0;
    EXPECT_EQ(dyadic_bound(t, kCtx), static_cast<int>(expected));
    EXPECT_EQ(dyadic_bound(ComplexMatrix::Zero(2, 2), kCtx), 1);
    ToleranceContext tiny;
    tiny.atol = 1e-300;
    tiny.rtol = 0.0;
    EXPECT_EQ(dyadic_bound(1e150 * identity(2), tiny), kMaxDyadicLevel);
}

TEST(Certificate, Examples) {
    const PositivityCertificate psd = positivity_certificate(diag({1.0, 2.0}), kCtx);
    EXPECT_EQ(psd.kind, CertificateKind::direct_psd);

    const PositivityCertificate sh = positivity_certificate(shear(), kCtx);
    ASSERT_EQ(sh.kind, CertificateKind::violation);
    EXPECT_EQ(*sh.violation_k, 2);
    EXPECT_EQ(sh.checked_k, 1);
    const ComplexVector& x = *sh.violation_direction;
    EXPECT_NEAR(x.norm(), 1.0, 1e-14);
    EXPECT_LT(x.dot(mat_power(shear(), 4) * x).real(), -kCtx.tau(shear()));

    const PositivityCertificate root = positivity_certificate(sixth_root(), kCtx);
    ASSERT_EQ(root.kind, CertificateKind::violation);
    EXPECT_EQ(*root.violation_k, 1);
    EXPECT_EQ(root.checked_k, 0);
}

TEST(Certificate, KindMatchesDirectTestOnGenerators) {
    for (GenClass cls : all_gen_classes()) {
        for (int s = 0; s < 10; ++s) {
            GenSpec spec;
            spec.cls = cls;
            spec.dim = 2 + s % 5;
            spec.seed = static_cast<std::uint64_t>(s + 300);
            const ComplexMatrix t = generate(spec);
            const PositivityCertificate c = positivity_certificate(t, kCtx);
            EXPECT_EQ(c.kind == CertificateKind::direct_psd, is_psd(t, kCtx));
            EXPECT_NE(c.kind, CertificateKind::dyadic_sector);
            if (c.kind == CertificateKind::violation) {
                const int k = *c.violation_k;
                EXPECT_LE(k, dyadic_bound(t, kCtx));
                EXPECT_EQ(c.checked_k, k - 1);
                const ComplexVector& x = *c.violation_direction;
                if (k <= 5) {
                    const ComplexMatrix p = mat_power(t, std::uint64_t{1} << k);
                    EXPECT_LT(x.dot(p * x).real(), 0.0);
                }
                EXPECT_LT(c.witness_value, 0.0);
            }
        }
    }
}

TEST(Verify, UnknownIdAndBadParams) {
    TheoremParams params;
    EXPECT_EQ(code_of([&] { (void)verify_theorem("nope", shear(), params, kCtx); }), ErrorCode::UnknownTheorem);
    params.k = 0;
    EXPECT_EQ(code_of([&] { (void)verify_theorem("square_normal_odd_accretive_ascent_normal", shear(), params, kCtx); }),
              ErrorCode::BadParams);
    params = TheoremParams{};
    params.p = 2;
    params.q = 4;
    EXPECT_EQ(code_of([&] { (void)verify_theorem("coprime_powers_normal", shear(), params, kCtx); }),
              ErrorCode::NotCoprime);
    EXPECT_EQ(theorem_ids().size(), 15u);
}

TEST(Verify, HalfPlaneSquareNormalExamples) {
    const TheoremParams params;
    const TheoremVerdict good = verify_theorem("halfplane_square_normal", diag({1.0, -kI}), params, kCtx);
    EXPECT_TRUE(good.hypotheses_hold());
    EXPECT_TRUE(good.conclusion.holds);
    EXPECT_TRUE(good.consistent);

    const TheoremVerdict vac = verify_theorem("halfplane_square_normal", mat2(1, 1, 0, -1), params, kCtx);
    EXPECT_FALSE(hypothesis(vac, "halfplane").holds);
    EXPECT_TRUE(hypothesis(vac, "square_normal").holds);
    EXPECT_FALSE(vac.conclusion.holds);
    EXPECT_TRUE(vac.consistent);
}

TEST(Verify, CoprimePowersNeedAscent) {
    const TheoremVerdict v = verify_theorem("coprime_powers_normal", jordan(), TheoremParams{}, kCtx);
    EXPECT_FALSE(hypothesis(v, "ascent_le_1").holds);
    EXPECT_TRUE(hypothesis(v, "p_power_normal").holds);
    EXPECT_TRUE(hypothesis(v, "q_power_normal").holds);
    EXPECT_FALSE(v.conclusion.holds);
    EXPECT_TRUE(v.consistent);
    EXPECT_EQ(v.witness.at("bezout_n"), 5.0);
}

TEST(Verify, SixthRootScalarHasPsdPowersButIsNotPsd) {
    TheoremParams params;
    params.p = 6;
    params.q = 7;
    const TheoremVerdict v = verify_theorem("coprime_powers_psd", sixth_root(), params, kCtx);
    EXPECT_TRUE(hypothesis(v, "p_power_psd").holds);
    EXPECT_FALSE(hypothesis(v, "q_power_psd").holds);
    EXPECT_FALSE(v.conclusion.holds);
    EXPECT_TRUE(v.consistent);
}

TEST(Verify, SoundOnGenerators) {
    for (GenClass cls : all_gen_classes()) {
        for (int s = 0; s < 4; ++s) {
            GenSpec spec;
            spec.cls = cls;
            spec.dim = 2 + s % 4;
            spec.seed = static_cast<std::uint64_t>(s + 700);
            spec.scale = s % 2 == 0 ? 1.0 : 4.0;
            const ComplexMatrix t = generate(spec);
            for (const auto& id : theorem_ids()) {
                const TheoremVerdict v = verify_theorem(id, t, TheoremParams{}, kCtx);
                EXPECT_TRUE(v.consistent) << id << " class " << to_string(cls) << " seed " << spec.seed;
            }
        }
    }
}

TEST(Equivalence, Examples) {
    const EquivalenceResult psd = equivalence_suite(diag({1.0, 2.0}), kCtx);
    for (bool c : psd.conditions) EXPECT_TRUE(c);
    EXPECT_TRUE(psd.agreement);

    const EquivalenceResult root = equivalence_suite(sixth_root(), kCtx);
    EXPECT_FALSE(root.conditions[0]);
    EXPECT_FALSE(root.conditions[3]);
    EXPECT_FALSE(root.conditions[5]);
    EXPECT_TRUE(root.agreement);

    const EquivalenceResult sh = equivalence_suite(shear(), kCtx);
    EXPECT_FALSE(sh.conditions[0]);
    EXPECT_FALSE(sh.conditions[4]);
    EXPECT_TRUE(sh.agreement);

    EXPECT_EQ(code_of([] { (void)equivalence_suite(shear(), kCtx, 7, 3); }), ErrorCode::BadParams);
    EXPECT_EQ(code_of([] { (void)equivalence_suite(shear(), kCtx, 64, 0); }), ErrorCode::BadParams);
}

TEST(Facts, CatalogVerifies) {
    for (const auto& entry : catalog()) {
        for (const auto& [fact, expected] : entry.facts) {
            EXPECT_EQ(evaluate_fact(entry.matrix, fact, kCtx), expected) << entry.label << " " << fact;
        }
    }
    EXPECT_EQ(code_of([] { (void)evaluate_fact(shear(), "bogus", kCtx); }), ErrorCode::BadParams);
}

TEST(Fuzzer, DeterministicAndEmptyOnShortRun) {
    const FuzzResult a = question_fuzzer(2, 3, 4, 300, 7, kCtx);
    const FuzzResult b = question_fuzzer(2, 3, 4, 300, 7, kCtx);
    EXPECT_EQ(a.log, b.log);
    EXPECT_EQ(a.candidates, 0);
    EXPECT_EQ(a.trials, 300);
    EXPECT_NE(a.log, question_fuzzer(2, 3, 4, 300, 8, kCtx).log);
    EXPECT_EQ(code_of([] { (void)question_fuzzer(2, 4, 4, 10, 7, kCtx); }), ErrorCode::NotCoprime);
    EXPECT_NE(derive_seed(7, 0), derive_seed(7, 1));
}

TEST(Fuzzer, NormalSpecimenIsNotACandidate) {
    Rng rng(8);
    const ComplexMatrix u = random_unitary(4, rng);
    ComplexVector d(4);
    for (int i = 0; i < 4; ++i) d(i) = std::polar(1.0, 0.1 * i);
    const FuzzScore s = score_specimen(u * d.asDiagonal() * u.adjoint(), 2, 3, kCtx);
    EXPECT_TRUE(s.hypotheses_hold);
    EXPECT_LE(s.normal_residual, 1e-13);
    EXPECT_FALSE(s.candidate);

    const FuzzScore j = score_specimen(jordan(), 2, 3, kCtx);
    EXPECT_FALSE(j.hypotheses_hold);
    EXPECT_FALSE(j.candidate);
}

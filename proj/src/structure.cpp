#include "oplens/structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <tuple>
#include <utility>

#include "oplens/classifiers.hpp"

namespace oplens {

StructureIndices indices(const ComplexMatrix& t, const ToleranceContext& ctx) {
    validate_matrix(t);
    const double threshold = ctx.tau(t);
    const int dim = static_cast<int>(t.rows());
    const std::vector<int> kernels = kernel_chain(t, threshold);
    const std::vector<int> cokernels = kernel_chain(t.adjoint(), threshold);

    StructureIndices out;
    for (int k : kernels) out.rank_profile.push_back(dim - k);
    out.ascent = static_cast<int>(kernels.size()) - 2;
    out.descent = static_cast<int>(cokernels.size()) - 2;
    if (out.ascent != out.descent) {
        throw OperatorError(ErrorCode::InternalInconsistency,
                            "ascent " + std::to_string(out.ascent) + " differs from descent " +
                                std::to_string(out.descent));
    }
    return out;
}

bool asc_le_1(const ComplexMatrix& t, const ToleranceContext& ctx) {
    validate_matrix(t);
    const double threshold = ctx.tau(t);
    const ComplexMatrix k1 = kernel_basis(t, threshold);
    if (k1.cols() == 0) return true;
    const ComplexMatrix complement = identity(t.rows()) - k1 * k1.adjoint();
    return kernel_basis(complement * t, threshold).cols() == k1.cols();
}

bool is_injective(const ComplexMatrix& t, const ToleranceContext& ctx) {
    validate_matrix(t);
    return kernel_basis(t, ctx.tau(t)).cols() == 0;
}

std::int64_t gcd(std::int64_t a, std::int64_t b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b != 0) {
        const std::int64_t r = a % b;
        a = b;
        b = r;
    }
    return a;
}

BezoutPair bezout(std::int64_t p, std::int64_t q) {
    if (p < 2 || q < 2) throw OperatorError(ErrorCode::BadParams, "bezout needs p, q >= 2");
    if (gcd(p, q) != 1) {
        throw OperatorError(ErrorCode::NotCoprime,
                            std::to_string(p) + " and " + std::to_string(q) + " are not coprime");
    }
    // Iterative extended Euclid: old_s * p + old_t * q = old_r.
    std::int64_t old_r = p, r = q, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        const std::int64_t quotient = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - quotient * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - quotient * s);
        std::tie(old_t, t) = std::make_pair(t, old_t - quotient * t);
    }
    // All solutions are (k + j q, l - j p); the two nearest zero bracket it.
    std::int64_t k0 = ((old_s % q) + q) % q;
    auto candidate = [&](std::int64_t k) {
        BezoutPair b{p, q, k, (1 - k * p) / q, 0};
        b.n = std::llabs(b.k) * p + std::llabs(b.l) * q;
        return b;
    };
    const BezoutPair a = candidate(k0);
    const BezoutPair b = candidate(k0 - q);
    if (std::llabs(a.k) != std::llabs(b.k)) return std::llabs(a.k) < std::llabs(b.k) ? a : b;
    return a.n <= b.n ? a : b;
}

PowerPairNormality power_pair_normality(const ComplexMatrix& t, std::int64_t p, std::int64_t q,
                                        const ToleranceContext& ctx) {
    validate_matrix(t);
    PowerPairNormality out;
    out.pair = bezout(p, q);
    const auto& bz = out.pair;

    const auto tn = scaled_power(t, static_cast<std::uint64_t>(bz.n), ctx);
    const auto tn1 = scaled_power(t, static_cast<std::uint64_t>(bz.n + 1), ctx);
    const auto norm_n = power_normal(tn, ctx);
    const auto norm_n1 = power_normal(tn1, ctx);
    out.tn_normal = norm_n.holds;
    out.tn1_normal = norm_n1.holds;
    out.tn_residual = norm_n.residual;
    out.tn1_residual = norm_n1.residual;

    // Both factorisations checked on T / ||T|| so the comparison is unit scale.
    const double norm = spectral_norm(t);
    const ComplexMatrix base = norm > 0.0 ? ComplexMatrix(t / norm) : ComplexMatrix(t);
    const ComplexMatrix tp = mat_power(base, static_cast<std::uint64_t>(p));
    const ComplexMatrix tq = mat_power(base, static_cast<std::uint64_t>(q));
    auto pw = [](const ComplexMatrix& m, std::int64_t e) { return mat_power(m, static_cast<std::uint64_t>(e)); };
    const ComplexMatrix lhs_n = mat_power(base, static_cast<std::uint64_t>(bz.n));
    const ComplexMatrix rhs_n = pw(tp, std::llabs(bz.k)) * pw(tq, std::llabs(bz.l));
    const ComplexMatrix lhs_n1 = mat_power(base, static_cast<std::uint64_t>(bz.n + 1));
    const ComplexMatrix rhs_n1 = pw(tp, std::llabs(bz.k) + bz.k) * pw(tq, std::llabs(bz.l) + bz.l);
    out.factorisation_residual =
        std::max(spectral_norm(lhs_n - rhs_n), spectral_norm(lhs_n1 - rhs_n1));
    // Accumulated roundoff grows with the number of products, about n of them.
    out.factorisation_ok =
        out.factorisation_residual <= ctx.unit_tau() * static_cast<double>(bz.n + 1);
    return out;
}

}  // namespace oplens

#pragma once

#include <cstdint>
#include <vector>

#include "oplens/linalg.hpp"

namespace oplens {

struct StructureIndices {
    int ascent = 0;
    int descent = 0;
    std::vector<int> rank_profile;  // rank T^0, T^1, ... through the first repeat
};

/// k p + l q = 1 with n = |k| p + |l| q, so n + 1 = (|k|+k) p + (|l|+l) q.
struct BezoutPair {
    std::int64_t p = 0;
    std::int64_t q = 0;
    std::int64_t k = 0;
    std::int64_t l = 0;
    std::int64_t n = 0;
};

/// Ranks of T^n without forming the power: ker T^(n+1) = ker((I - P_n) T)
/// where P_n projects onto ker T^n. Every step thresholds singular values of
/// a matrix no larger than T at tau(T), so contractive powers do not
/// collapse. Descent comes from the same recursion on T*; the two must agree.
[[nodiscard]] StructureIndices indices(const ComplexMatrix& t, const ToleranceContext& ctx);

/// ker T = ker T^2, i.e. ascent <= 1 (injective matrices qualify).
[[nodiscard]] bool asc_le_1(const ComplexMatrix& t, const ToleranceContext& ctx);

/// ker T = {0} at tolerance tau(T).
[[nodiscard]] bool is_injective(const ComplexMatrix& t, const ToleranceContext& ctx);

[[nodiscard]] std::int64_t gcd(std::int64_t a, std::int64_t b);

/// Extended Euclid, normalised to the smallest |k| (ties broken by smaller n).
/// Throws BadParams for p or q < 2 and NotCoprime when gcd(p, q) != 1.
[[nodiscard]] BezoutPair bezout(std::int64_t p, std::int64_t q);

struct PowerPairNormality {
    BezoutPair pair;
    bool tn_normal = false;
    bool tn1_normal = false;
    double tn_residual = 0.0;
    double tn1_residual = 0.0;
    /// ||T^n - (T^p)^|k| (T^q)^|l||| and the T^(n+1) analogue, relative to ||T||^n.
    double factorisation_residual = 0.0;
    bool factorisation_ok = false;
};

[[nodiscard]] PowerPairNormality power_pair_normality(const ComplexMatrix& t, std::int64_t p,
                                                      std::int64_t q, const ToleranceContext& ctx);

}  // namespace oplens

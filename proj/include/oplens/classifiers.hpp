#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>
#include <string_view>

#include "oplens/linalg.hpp"

namespace oplens {

enum class OperatorClass {
    positive,
    self_adjoint,
    normal,
    quasinormal,
    hyponormal,
    paranormal,
    accretive,
};

inline constexpr std::array<OperatorClass, 7> kAllClasses = {
    OperatorClass::positive,    OperatorClass::self_adjoint, OperatorClass::normal,
    OperatorClass::quasinormal, OperatorClass::hyponormal,   OperatorClass::paranormal,
    OperatorClass::accretive,
};

/// positive => self_adjoint => normal => quasinormal => hyponormal => paranormal
inline constexpr std::array<OperatorClass, 6> kImplicationChain = {
    OperatorClass::positive,    OperatorClass::self_adjoint, OperatorClass::normal,
    OperatorClass::quasinormal, OperatorClass::hyponormal,   OperatorClass::paranormal,
};

std::string_view to_string(OperatorClass c) noexcept;

/// Outcome of one membership test: holds iff residual <= threshold.
struct Membership {
    bool holds = false;
    double residual = 0.0;
    double threshold = 0.0;
};

struct ClassificationReport {
    std::map<OperatorClass, bool> flags;
    std::map<OperatorClass, double> residuals;
    std::map<OperatorClass, double> thresholds;
    ToleranceContext tol_used;

    [[nodiscard]] bool flag(OperatorClass c) const { return flags.at(c); }
    [[nodiscard]] double residual(OperatorClass c) const { return residuals.at(c); }
};

// Membership tests with residuals. The residual of an inequality-type class
// is how far the relevant minimum eigenvalue sits below zero.
[[nodiscard]] Membership psd_membership(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] Membership self_adjoint_membership(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] Membership accretive_membership(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] Membership normal_membership(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] Membership quasinormal_membership(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] Membership hyponormal_membership(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] Membership paranormal_membership(const ComplexMatrix& m, const ToleranceContext& ctx);

[[nodiscard]] bool is_psd(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] bool is_self_adjoint(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] bool is_accretive(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] bool is_normal(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] bool is_quasinormal(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] bool is_hyponormal(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] bool is_paranormal(const ComplexMatrix& m, const ToleranceContext& ctx);

/// A <= B in the Loewner order, i.e. B - A is PSD. The threshold scales with
/// max(||A||, ||B||). Throws NotHermitian if either side is not Hermitian.
[[nodiscard]] bool loewner_le(const ComplexMatrix& a, const ComplexMatrix& b, const ToleranceContext& ctx);

/// Throws InternalInconsistency if the implication chain is violated.
[[nodiscard]] ClassificationReport classify(const ComplexMatrix& m, const ToleranceContext& ctx);

// Predicates on powers T^m held by a ScaledPower. They are decided on the
// unit-norm representative with threshold unit_tau(); a negligible power is
// the zero matrix and satisfies all of them.
[[nodiscard]] Membership power_accretive(const ScaledPower& p, const ToleranceContext& ctx);
[[nodiscard]] Membership power_psd(const ScaledPower& p, const ToleranceContext& ctx);
[[nodiscard]] Membership power_normal(const ScaledPower& p, const ToleranceContext& ctx);

/// Predicates on the powers of one matrix T.
///
/// When T is normal the powers are decided eigenvalue by eigenvalue from a
/// Schur factorisation: Re T^m >= 0 iff cos(m arg lambda) >= 0 for every
/// eigenvalue above tau(T), tested to unit_tau() relative to |lambda|^m.
/// Forming T^m instead would bury an eigenvalue smaller than the dominant one
/// below roundoff once m is large. Other matrices go through the unit-scale
/// ScaledPower predicates above.
class PowerFamily {
public:
    PowerFamily(const ComplexMatrix& t, const ToleranceContext& ctx);

    [[nodiscard]] bool spectral() const { return spectral_; }
    [[nodiscard]] const ScaledPower& power(std::uint64_t m);

    [[nodiscard]] Membership accretive(std::uint64_t m);
    [[nodiscard]] Membership psd(std::uint64_t m);
    [[nodiscard]] Membership normal(std::uint64_t m);

    /// Unit x with Re <T^m x, x> < 0 when accretive(m) fails.
    [[nodiscard]] std::optional<ComplexVector> accretive_witness(std::uint64_t m);

private:
    [[nodiscard]] std::vector<Complex> unit_eigen_powers(std::uint64_t m) const;

    const ComplexMatrix& t_;
    const ToleranceContext& ctx_;
    bool spectral_ = false;
    ComplexMatrix schur_vectors_;
    std::vector<Complex> phases_;  // lambda / |lambda|, or 0 for |lambda| <= tau
    PowerLadder ladder_;
    std::vector<ScaledPower> consecutive_;
    std::map<std::uint64_t, ScaledPower> sparse_;
};

}  // namespace oplens

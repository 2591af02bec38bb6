#pragma once

// Executable checks of the structure results: positivity from powers and
// accretivity, normality from normal powers, the dyadic positivity
// certificate and the classical inequalities they rest on.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oplens/linalg.hpp"
#include "oplens/numrange.hpp"

namespace oplens {

// ---- inequalities -------------------------------------------------------

/// 0 <= B <= A implies B^p <= A^p for p in [0, 1]. Throws
/// PreconditionViolated when the hypothesis or the range of p fails.
[[nodiscard]] bool check_lowner_heinz(const ComplexMatrix& a, const ComplexMatrix& b, double p,
                                      const ToleranceContext& ctx);

/// |<Tx, y>|^2 <= <(T*T)^alpha x, x> <(TT*)^(1-alpha) y, y>, compared with
/// slack (atol + rtol ||T||^2) ||x||^2 ||y||^2.
[[nodiscard]] bool check_kato(const ComplexMatrix& t, const ComplexVector& x, const ComplexVector& y,
                              double alpha, const ToleranceContext& ctx);

/// Multiplier on the intertwining tolerance allowed for the conclusion.
inline constexpr double kFugledeSlack = 10.0;

/// For normal M, N with TN = MT, checks TN* = M*T. Throws
/// PreconditionViolated when M or N is not normal or TN != MT.
[[nodiscard]] bool check_fuglede_putnam(const ComplexMatrix& t, const ComplexMatrix& m, const ComplexMatrix& n,
                                        const ToleranceContext& ctx);

/// Commuting normal matrices have a normal product.
[[nodiscard]] bool check_commuting_normal_product(const ComplexMatrix& m, const ComplexMatrix& n,
                                                  const ToleranceContext& ctx);

/// cot(x/2) as cot x + sqrt(1 + cot^2 x), rearranged for negative cot x so
/// the value stays accurate as x approaches pi. Throws BadDomain outside (0, pi).
[[nodiscard]] double cot_halfangle(double x);

// ---- dyadic positivity ---------------------------------------------------

struct ProfileEntry {
    int k = 0;               // exponent 2^k
    double min_eig = 0.0;    // lambda_min(Re T^(2^k)); inf/0 outside double range
    double unit_min_eig = 0.0;  // same for T^(2^k) / ||T^(2^k)||
    bool accretive = false;  // decided on the unit representative
};

/// Re T^(2^k) for k = 0..n_max by repeated squaring.
[[nodiscard]] std::vector<ProfileEntry> dyadic_accretivity_profile(const ComplexMatrix& t, int n_max,
                                                                   const ToleranceContext& ctx);

/// Largest dyadic level checked before the sector argument forces
/// ||Im T|| <= tau: ceil(log2(pi ||Re T|| / tau)) + 1, at least 1. Capped at
/// kMaxDyadicLevel so that 2^k stays a 64-bit exponent.
inline constexpr int kMaxDyadicLevel = 62;
[[nodiscard]] int dyadic_bound(const ComplexMatrix& t, const ToleranceContext& ctx);

enum class CertificateKind { direct_psd, dyadic_sector, violation };
[[nodiscard]] std::string to_string(CertificateKind k);

struct PositivityCertificate {
    CertificateKind kind = CertificateKind::violation;
    int checked_k = 0;
    std::optional<SectorCertificate> sector;
    std::optional<int> violation_k;
    std::optional<ComplexVector> violation_direction;
    /// Re <T^(2^k) x, x> at the witness, evaluated on T^(2^k) / ||T^(2^k)||.
    double witness_value = 0.0;
    std::vector<ProfileEntry> profile;
};

/// direct_psd when T is PSD; otherwise the first dyadic level whose real part
/// is not PSD, with a unit eigenvector witness. If every level through
/// dyadic_bound passes, T must be PSD up to a relaxed tolerance of 100 tau;
/// failing that throws InternalInconsistency.
[[nodiscard]] PositivityCertificate positivity_certificate(const ComplexMatrix& t, const ToleranceContext& ctx);

// ---- theorem verdicts ----------------------------------------------------

struct TheoremParams {
    int k = 1;       // odd exponent 2k + 1; k >= 1
    int p = 2;
    int q = 3;
    int k0 = 3;      // start of the tail in the eventual-accretivity result
    int n = 3;       // dyadic depth for the sector bound
    int k_max = 64;  // truncation of "for every k"
};

struct Predicate {
    std::string name;
    bool holds = false;
    double residual = 0.0;
    bool truncated = false;
};

struct TheoremVerdict {
    std::string id;
    std::vector<Predicate> hypotheses;
    Predicate conclusion;
    bool consistent = true;
    std::map<std::string, double> witness;
    std::vector<std::string> details;

    [[nodiscard]] bool hypotheses_hold() const;
};

[[nodiscard]] const std::vector<std::string>& theorem_ids();

/// Dispatches on the theorem id. Throws UnknownTheorem for an unknown id
/// and BadParams for exponents outside their range.
[[nodiscard]] TheoremVerdict verify_theorem(const std::string& id, const ComplexMatrix& t,
                                            const TheoremParams& params, const ToleranceContext& ctx);

struct EquivalenceResult {
    std::array<bool, 7> conditions{};
    std::array<std::string, 7> names;
    std::map<std::string, double> witness;  // exponents found by the searches
    int k_max = 0;
    int k0 = 0;
    int dyadic_levels = 0;
    bool agreement = false;
};

/// Seven conditions that are each equivalent to T >= 0. Families over all k
/// are evaluated for k <= k_max together with the dyadic exponents 2^j up to
/// dyadic_bound. Throws BadParams for k_max < 8 or k0 < 1.
[[nodiscard]] EquivalenceResult equivalence_suite(const ComplexMatrix& t, const ToleranceContext& ctx,
                                                  int k_max = 64, int k0 = 3);

/// Named facts about a matrix used by the catalog: "psd", "normal",
/// "accretive", "power_psd:m", "power_normal:m", "re_power_psd:m",
/// "ascent:m", "zero_interior_numrange", "equivalent_conditions".
/// Throws BadParams for an unknown name.
[[nodiscard]] bool evaluate_fact(const ComplexMatrix& t, const std::string& fact, const ToleranceContext& ctx);

// ---- open question search ------------------------------------------------

struct FuzzScore {
    double asc_penalty = 0.0;
    double power_normal_residual = 0.0;  // ||(T^p)*(T^p) - T^p(T^p)*|| on the unit power
    double re_power_negative = 0.0;      // max(0, -lambda_min(Re T^q)) on the unit power
    double normal_residual = 0.0;        // ||T*T - TT*||
    double score = 0.0;
    bool hypotheses_hold = false;
    bool candidate = false;
};

[[nodiscard]] FuzzScore score_specimen(const ComplexMatrix& t, int p, int q, const ToleranceContext& ctx);

struct FuzzResult {
    std::vector<std::string> log;  // one record per line, no trailing newline
    int candidates = 0;
    int trials = 0;
};

/// Seeded search over near-hypothesis matrices for a non-normal T with
/// asc(T) <= 1, T^p normal and Re T^q >= 0. Trial i draws from its own
/// seed, so the log is a pure function of the arguments.
[[nodiscard]] FuzzResult question_fuzzer(int p, int q, int dim, int trials, std::uint64_t seed,
                                         const ToleranceContext& ctx);

/// splitmix64 of (seed, index); the per-trial seed of the fuzzer.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace oplens

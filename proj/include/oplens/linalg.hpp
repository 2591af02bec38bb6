#pragma once

// Dense complex matrix arithmetic and Hermitian spectral primitives.
//
// Every order statement ("M >= 0", "M = M*") is decided against the
// scale-aware threshold tau(M) = atol + rtol * ||M||_2 carried by a
// ToleranceContext.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "oplens/error.hpp"

namespace oplens {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct ToleranceContext {
    double atol = 1e-10;
    double rtol = 1e-12;
    int angle_grid = 720;  // half-plane scan resolution
    int max_power = 64;    // cap for power searches
    int max_refine = 40;   // bisection / golden-section depth

    /// atol + rtol * ||m||_2
    [[nodiscard]] double tau(const ComplexMatrix& m) const;
    [[nodiscard]] double tau_of_norm(double norm) const { return atol + rtol * norm; }

    /// Threshold for a relation that is a polynomial of degree `degree` in M
    /// (M*M - MM* has degree 2, MM*M - M*M^2 degree 3, ...). A degree-d product
    /// perturbed by tau in each factor moves by at most d * tau * ||M||^(d-1),
    /// which keeps the class implication chain exact at the threshold.
    [[nodiscard]] double tau_degree(double norm, int degree) const;

    /// tau for a matrix normalised to unit spectral norm.
    [[nodiscard]] double unit_tau() const { return atol + rtol; }

    /// Throws BadParams when a field is out of range.
    void validate() const;
};

struct HermitianEig {
    RealVector eigenvalues;     // ascending
    ComplexMatrix eigenvectors; // unitary, columns match eigenvalues
};

/// Throws InvalidMatrix unless m is square, non-empty and finite.
void validate_matrix(const ComplexMatrix& m);

[[nodiscard]] ComplexMatrix identity(Eigen::Index dim);
[[nodiscard]] ComplexMatrix adjoint(const ComplexMatrix& m);
[[nodiscard]] ComplexMatrix real_part(const ComplexMatrix& m);
[[nodiscard]] ComplexMatrix imag_part(const ComplexMatrix& m);

/// Largest singular value, from the spectrum of M*M. Works for rectangular
/// blocks; the empty matrix has norm 0.
[[nodiscard]] double spectral_norm(const ComplexMatrix& m);

/// ||M - M*||_2
[[nodiscard]] double hermitian_residual(const ComplexMatrix& m);

/// Eigen-decomposition of a matrix that is Hermitian within tau(M). The
/// Hermitian part is decomposed, so the result is exactly Hermitian.
[[nodiscard]] HermitianEig hermitian_eig(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] double min_eig_hermitian(const ComplexMatrix& m, const ToleranceContext& ctx);
[[nodiscard]] double max_eig_hermitian(const ComplexMatrix& m, const ToleranceContext& ctx);

/// Eigenvalues of the Hermitian part, no precondition; ascending.
[[nodiscard]] RealVector hermitian_part_eigenvalues(const ComplexMatrix& m);

/// M^k by repeated squaring; M^0 = I.
[[nodiscard]] ComplexMatrix mat_power(const ComplexMatrix& m, std::uint64_t k);

/// Principal square root of a PSD matrix. Eigenvalues in [-tau, 0) are
/// clamped to zero; ||R^2 - M||_2 <= kSqrtResidualFactor * tau(M).
inline constexpr double kSqrtResidualFactor = 4.0;
[[nodiscard]] ComplexMatrix psd_sqrt(const ComplexMatrix& m, const ToleranceContext& ctx);

/// M^p for PSD M and real p >= 0, through the spectral decomposition.
/// 0^0 is taken as 1 so that M^0 = I.
[[nodiscard]] ComplexMatrix psd_power(const ComplexMatrix& m, double p, const ToleranceContext& ctx);

/// Moore-Penrose inverse; singular values at or below tau(M) count as zero.
[[nodiscard]] ComplexMatrix pseudo_inverse(const ComplexMatrix& m, const ToleranceContext& ctx);

[[nodiscard]] RealVector singular_values(const ComplexMatrix& m);

/// Orthonormal basis (columns) of the numerical kernel {x : ||Mx|| <= threshold}.
[[nodiscard]] ComplexMatrix kernel_basis(const ComplexMatrix& m, double threshold);

/// Dimensions of ker M^0, ker M^1, ... up to the first repeat, through the
/// recursion ker M^(n+1) = ker((I - P_n) M) with P_n the projector onto
/// ker M^n. Each step thresholds singular values at `threshold`.
[[nodiscard]] std::vector<int> kernel_chain(const ComplexMatrix& m, double threshold);

/// A power T^m held as (unit-norm matrix, log of its norm). When T is
/// numerically nilpotent (its kernel chain at tau(T) fills the space) the
/// powers from the nilpotency index on are marked negligible and treated as
/// the zero matrix; any other power is kept, however small.
struct ScaledPower {
    std::uint64_t exponent = 0;
    ComplexMatrix unit;
    double log_norm = 0.0;
    bool negligible = false;

    /// The power itself; may overflow to inf for large exponents.
    [[nodiscard]] ComplexMatrix value() const;
};

/// Walks T^m upward by single steps or by squaring, renormalising after
/// every product so that exponents in the billions stay representable.
class PowerLadder {
public:
    PowerLadder(const ComplexMatrix& t, const ToleranceContext& ctx);

    [[nodiscard]] const ScaledPower& current() const { return current_; }
    void step();    // T^m -> T^(m+1)
    void square();  // T^m -> T^(2m)

private:
    void renormalise(ComplexMatrix product, double log_scale);

    ComplexMatrix base_unit_;
    double log_base_norm_ = 0.0;
    std::uint64_t nilpotent_index_ = 0;  // 0: not nilpotent
    ScaledPower current_;
};

[[nodiscard]] ScaledPower scaled_power(const ComplexMatrix& t, std::uint64_t m,
                                       const ToleranceContext& ctx);

}  // namespace oplens

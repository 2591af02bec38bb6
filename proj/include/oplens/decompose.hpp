#pragma once

// Constructive finite-dimensional versions of two structure results:
//
//  * the 2x2 block criterion for positivity relative to the leading
//    coordinate subspace, and
//  * the unitary model of a square root of a normal matrix,
//
//        U* T U = [ A  0  0 ]
//                 [ 0  B  C ]
//                 [ 0  0 -B ]
//
//    with A, B normal, C >= 0 injective and BC = CB.

#include <string>
#include <utility>
#include <vector>

#include "oplens/linalg.hpp"

namespace oplens {

struct BlockPartition {
    Eigen::Index s_dim = 0;
    ComplexMatrix t11, t12, t21, t22;

    [[nodiscard]] ComplexMatrix reassemble() const;
};

/// Throws BadPartition unless 0 <= s_dim <= dim.
[[nodiscard]] BlockPartition partition(const ComplexMatrix& t, Eigen::Index s_dim);

struct BlockPositivityVerdict {
    bool psd = false;          // conjunction of the four conditions
    bool cond_i = false;       // T11 >= 0
    bool cond_ii = false;      // T21 = T12*
    bool cond_iii = false;     // R(T12) inside R(T11^{1/2})
    bool cond_iv = false;      // F = T22 - X*X >= 0, X = (T11^{1/2})^+ T12
    double f_min_eig = 0.0;    // lambda_min(F); 0 when F is empty
    double range_residual = 0.0;
    bool direct_psd = false;   // is_psd(T), the cross-check
    [[nodiscard]] bool agrees() const { return psd == direct_psd; }
};

/// Range inclusion is tested against sqrt(tau * ||T||): for PSD T a coupling
/// to an eigenvalue of T11 below tau can be as large as that, while an
/// indefinite T whose coupling stays under it is PSD within tau as well.
[[nodiscard]] BlockPositivityVerdict block_positivity_check(const ComplexMatrix& t, Eigen::Index s_dim,
                                                            const ToleranceContext& ctx);

struct CanonicalSqrtDecomposition {
    ComplexMatrix u;
    Eigen::Index a_dim = 0;
    Eigen::Index b_dim = 0;  // dims are (a, b, b)
    ComplexMatrix a;
    ComplexMatrix b;
    ComplexMatrix c;
    double residual = 0.0;

    /// blockdiag(A, [[B, C], [0, -B]])
    [[nodiscard]] ComplexMatrix model() const;
};

/// Square root of mu chosen in the closed upper half-plane (i sqrt|mu| for
/// negative real mu); it has non-negative real part whenever Im mu >= 0.
[[nodiscard]] Complex upper_branch_sqrt(Complex mu);

/// Builds the canonical model of T, given that T^2 is normal.
///
/// 1. T^2 is split into spectral subspaces E_mu by a Schur factorisation
///    with eigenvalues clustered at tau(T^2); T leaves each one invariant.
/// 2. On E_mu with mu != 0, J = T|E / sqrt(mu) is an involution. In an
///    orthonormal basis adapted to ran (I + J)/2 it reads [[I, X], [0, -I]];
///    the singular values of X are 2 cot of the principal angles between
///    the two eigenspaces of J. Zero angles-off-orthogonal give A, the rest
///    give 2x2 blocks [[sqrt(mu), c], [0, -sqrt(mu)]] with c > 0.
/// 3. On E_0, T squares to zero; its singular pairs give blocks
///    [[0, s], [0, 0]] and the rest of the kernel goes to A.
///
/// Throws SquareNotNormal, or IllConditioned when clusters of T^2 sit
/// closer than 10 tau or an invariant subspace check fails.
[[nodiscard]] CanonicalSqrtDecomposition sqrt_normal_decompose(const ComplexMatrix& t,
                                                               const ToleranceContext& ctx);

struct CanonicalCheck {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool ok = false;
};

struct CanonicalFormReport {
    std::vector<CanonicalCheck> checks;
    [[nodiscard]] bool passes() const;
    [[nodiscard]] const CanonicalCheck& check(const std::string& name) const;
};

/// Residual of every invariant of the model against T. Reconstruction is
/// held to 1e-8 ||T|| (or tau(T) if larger), the block properties to tau(T).
[[nodiscard]] CanonicalFormReport verify_canonical_form(const CanonicalSqrtDecomposition& d,
                                                        const ComplexMatrix& t,
                                                        const ToleranceContext& ctx);

/// (T T* T, T* T^2) for T = blockdiag(A, [[B, C], [0, -B]]) by direct
/// multiplication. Throws DimensionMismatch unless B, C are the same square
/// size, and NotHermitian unless C is Hermitian.
[[nodiscard]] std::pair<ComplexMatrix, ComplexMatrix> remark_block_identities(const ComplexMatrix& a,
                                                                               const ComplexMatrix& b,
                                                                               const ComplexMatrix& c,
                                                                               const ToleranceContext& ctx);

/// The same pair assembled from closed-form block expressions:
///
///   T T* T = [ AA*A  0            0                  ]
///            [ 0     BB*B + C^2B  BB*C + C^3 + CB*B  ]
///            [ 0     -BCB         -BC^2 - BB*B       ]
///
///   T* T^2 = [ A*A^2  0      0                   ]
///            [ 0      B*B^2  B*(BC - CB)         ]
///            [ 0      CB^2   C(BC - CB) - B*B^2  ]
///
/// With BC = CB the right-hand column of T* T^2 reduces to (0, -B*B^2).
/// The (2,3) block of T T* T carries +CB*B: expanding (BB* + C^2) C + (-CB*)(-B).
[[nodiscard]] std::pair<ComplexMatrix, ComplexMatrix> remark_block_formulas(const ComplexMatrix& a,
                                                                             const ComplexMatrix& b,
                                                                             const ComplexMatrix& c);

}  // namespace oplens

#include "oplens/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oplens {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidMatrix: return "InvalidMatrix";
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::InternalInconsistency: return "InternalInconsistency";
        case ErrorCode::BadAngle: return "BadAngle";
        case ErrorCode::BadPartition: return "BadPartition";
        case ErrorCode::NotCoprime: return "NotCoprime";
        case ErrorCode::SquareNotNormal: return "SquareNotNormal";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::BadDomain: return "BadDomain";
        case ErrorCode::UnknownTheorem: return "UnknownTheorem";
        case ErrorCode::BadParams: return "BadParams";
        case ErrorCode::BadSpec: return "BadSpec";
    }
    return "Unknown";
}

double ToleranceContext::tau(const ComplexMatrix& m) const {
    return tau_of_norm(spectral_norm(m));
}

double ToleranceContext::tau_degree(double norm, int degree) const {
    return degree * tau_of_norm(norm) * std::pow(norm, degree - 1);
}

void ToleranceContext::validate() const {
    if (!(atol > 0.0) || !std::isfinite(atol)) {
        throw OperatorError(ErrorCode::BadParams, "atol must be positive and finite");
    }
    if (!(rtol >= 0.0) || !std::isfinite(rtol)) {
        throw OperatorError(ErrorCode::BadParams, "rtol must be non-negative and finite");
    }
    if (angle_grid < 1 || max_power < 1 || max_refine < 1) {
        throw OperatorError(ErrorCode::BadParams, "angle_grid, max_power and max_refine must be positive");
    }
}

void validate_matrix(const ComplexMatrix& m) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
        throw OperatorError(ErrorCode::InvalidMatrix, "matrix must be square with dim >= 1");
    }
    if (!m.allFinite()) {
        throw OperatorError(ErrorCode::InvalidMatrix, "matrix has non-finite entries");
    }
}

ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }

ComplexMatrix real_part(const ComplexMatrix& m) { return (m + m.adjoint()) * 0.5; }

ComplexMatrix imag_part(const ComplexMatrix& m) { return (m - m.adjoint()) * Complex(0.0, -0.5); }

double spectral_norm(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    // The Gram matrix of the smaller side keeps the eigenproblem small.
    ComplexMatrix gram = m.rows() < m.cols() ? ComplexMatrix(m * m.adjoint())
                                             : ComplexMatrix(m.adjoint() * m);
    gram = (gram + gram.adjoint()).eval() * 0.5;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

double hermitian_residual(const ComplexMatrix& m) { return spectral_norm(m - m.adjoint()); }

namespace {

void require_hermitian(const ComplexMatrix& m, const ToleranceContext& ctx) {
    validate_matrix(m);
    const double residual = hermitian_residual(m);
    if (residual > ctx.tau(m)) {
        throw OperatorError(ErrorCode::NotHermitian,
                            "||M - M*|| = " + std::to_string(residual) + " exceeds tolerance");
    }
}

}  // namespace

HermitianEig hermitian_eig(const ComplexMatrix& m, const ToleranceContext& ctx) {
    require_hermitian(m, ctx);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(real_part(m));
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eig_hermitian(const ComplexMatrix& m, const ToleranceContext& ctx) {
    return hermitian_eig(m, ctx).eigenvalues(0);
}

double max_eig_hermitian(const ComplexMatrix& m, const ToleranceContext& ctx) {
    const auto eig = hermitian_eig(m, ctx);
    return eig.eigenvalues(eig.eigenvalues.size() - 1);
}

RealVector hermitian_part_eigenvalues(const ComplexMatrix& m) {
    if (m.size() == 0) return RealVector(0);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(real_part(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

ComplexMatrix mat_power(const ComplexMatrix& m, std::uint64_t k) {
    ComplexMatrix result = identity(m.rows());
    ComplexMatrix base = m;
    while (k > 0) {
        if (k & 1U) result = (result * base).eval();
        k >>= 1U;
        if (k > 0) base = (base * base).eval();
    }
    return result;
}

namespace {

template <typename Fn>
ComplexMatrix psd_function(const ComplexMatrix& m, const ToleranceContext& ctx, Fn fn) {
    const auto eig = hermitian_eig(m, ctx);
    const double tol = ctx.tau(m);
    if (eig.eigenvalues(0) < -tol) {
        throw OperatorError(ErrorCode::NotPSD,
                            "minimum eigenvalue " + std::to_string(eig.eigenvalues(0)) + " below -tau");
    }
    RealVector mapped(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < mapped.size(); ++i) {
        // Eigenvalues within tau of zero are treated as zero; x^p is not
        // Lipschitz there and roundoff would be amplified.
        const double lam = eig.eigenvalues(i);
        mapped(i) = fn(lam <= tol ? 0.0 : lam);
    }
    return eig.eigenvectors * mapped.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace

ComplexMatrix psd_sqrt(const ComplexMatrix& m, const ToleranceContext& ctx) {
    return psd_function(m, ctx, [](double x) { return std::sqrt(x); });
}

ComplexMatrix psd_power(const ComplexMatrix& m, double p, const ToleranceContext& ctx) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
        throw OperatorError(ErrorCode::BadDomain, "psd_power exponent must be finite and >= 0");
    }
    return psd_function(m, ctx, [p](double x) { return std::pow(x, p); });
}

ComplexMatrix pseudo_inverse(const ComplexMatrix& m, const ToleranceContext& ctx) {
    if (m.size() == 0) return ComplexMatrix(m.cols(), m.rows());
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double cutoff = ctx.tau(m);
    const auto& sv = svd.singularValues();
    ComplexMatrix inv_sigma = ComplexMatrix::Zero(m.cols(), m.rows());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) inv_sigma(i, i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv_sigma * svd.matrixU().adjoint();
}

RealVector singular_values(const ComplexMatrix& m) {
    if (m.size() == 0) return RealVector(0);
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues();
}

ComplexMatrix kernel_basis(const ComplexMatrix& m, double threshold) {
    if (m.cols() == 0) return ComplexMatrix(0, 0);
    if (m.rows() == 0) return identity(m.cols());
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > threshold) ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

ComplexMatrix ScaledPower::value() const {
    if (negligible) return ComplexMatrix::Zero(unit.rows(), unit.cols());
    return unit * std::exp(log_norm);
}

std::vector<int> kernel_chain(const ComplexMatrix& m, double threshold) {
    const Eigen::Index dim = m.rows();
    std::vector<int> dims{0};
    ComplexMatrix basis(dim, 0);
    for (Eigen::Index step = 0; step <= dim; ++step) {
        const ComplexMatrix complement = identity(dim) - basis * basis.adjoint();
        basis = kernel_basis(complement * m, threshold);
        dims.push_back(static_cast<int>(basis.cols()));
        if (dims[dims.size() - 1] == dims[dims.size() - 2]) break;
    }
    return dims;
}

PowerLadder::PowerLadder(const ComplexMatrix& t, const ToleranceContext& ctx) {
    validate_matrix(t);
    const double norm = spectral_norm(t);
    log_base_norm_ = norm > 0.0 ? std::log(norm) : 0.0;
    base_unit_ = norm > 0.0 ? ComplexMatrix(t / norm) : ComplexMatrix(t);
    const std::vector<int> chain = kernel_chain(t, ctx.tau(t));
    if (chain.back() == t.rows()) {
        nilpotent_index_ = static_cast<std::uint64_t>(
            std::find(chain.begin(), chain.end(), static_cast<int>(t.rows())) - chain.begin());
    }
    current_.exponent = 0;
    current_.unit = identity(t.rows());
    current_.log_norm = 0.0;
}

void PowerLadder::renormalise(ComplexMatrix product, double log_scale) {
    // log_scale is log ||(T/||T||)^m|| before this product's own norm.
    const double norm = spectral_norm(product);
    const bool past_index = nilpotent_index_ > 0 && current_.exponent >= nilpotent_index_;
    if (past_index || norm == 0.0) {
        current_.negligible = true;
        current_.unit = ComplexMatrix::Zero(product.rows(), product.cols());
        current_.log_norm = -std::numeric_limits<double>::infinity();
        return;
    }
    current_.log_norm = log_scale + std::log(norm) + static_cast<double>(current_.exponent) * log_base_norm_;
    current_.unit = product / norm;
}

void PowerLadder::step() {
    const double log_relative =
        current_.log_norm - static_cast<double>(current_.exponent) * log_base_norm_;
    current_.exponent += 1;
    if (current_.negligible) return;
    renormalise(current_.unit * base_unit_, log_relative);
}

void PowerLadder::square() {
    if (current_.exponent == 0) return;
    const double log_relative =
        current_.log_norm - static_cast<double>(current_.exponent) * log_base_norm_;
    current_.exponent *= 2;
    if (current_.negligible) return;
    renormalise(current_.unit * current_.unit, 2.0 * log_relative);
}

ScaledPower scaled_power(const ComplexMatrix& t, std::uint64_t m, const ToleranceContext& ctx) {
    PowerLadder ladder(t, ctx);
    if (m == 0) return ladder.current();
    // Binary expansion from the top bit: square, then step on set bits.
    int top = 63;
    while (((m >> top) & 1U) == 0) --top;
    ladder.step();
    for (int bit = top - 1; bit >= 0; --bit) {
        ladder.square();
        if ((m >> bit) & 1U) ladder.step();
    }
    return ladder.current();
}

}  // namespace oplens

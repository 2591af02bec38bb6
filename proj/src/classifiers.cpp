#include "oplens/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace oplens {

std::string_view to_string(OperatorClass c) noexcept {
    switch (c) {
        case OperatorClass::positive: return "positive";
        case OperatorClass::self_adjoint: return "self_adjoint";
        case OperatorClass::normal: return "normal";
        case OperatorClass::quasinormal: return "quasinormal";
        case OperatorClass::hyponormal: return "hyponormal";
        case OperatorClass::paranormal: return "paranormal";
        case OperatorClass::accretive: return "accretive";
    }
    return "unknown";
}

namespace {

Membership make(double residual, double threshold) {
    return {residual <= threshold, residual, threshold};
}

double negative_part(double x) { return std::max(0.0, -x); }

double min_hermitian_eig(const ComplexMatrix& h) { return hermitian_part_eigenvalues(h)(0); }

}  // namespace

Membership psd_membership(const ComplexMatrix& m, const ToleranceContext& ctx) {
    validate_matrix(m);
    const double residual = std::max(hermitian_residual(m), negative_part(min_hermitian_eig(m)));
    return make(residual, ctx.tau(m));
}

Membership self_adjoint_membership(const ComplexMatrix& m, const ToleranceContext& ctx) {
    validate_matrix(m);
    return make(hermitian_residual(m), ctx.tau(m));
}

Membership accretive_membership(const ComplexMatrix& m, const ToleranceContext& ctx) {
    validate_matrix(m);
    const ComplexMatrix re = real_part(m);
    return make(negative_part(min_hermitian_eig(re)), ctx.tau(re));
}

Membership normal_membership(const ComplexMatrix& m, const ToleranceContext& ctx) {
    validate_matrix(m);
    const ComplexMatrix commutator = m.adjoint() * m - m * m.adjoint();
    return make(spectral_norm(commutator), ctx.tau_degree(spectral_norm(m), 2));
}

Membership quasinormal_membership(const ComplexMatrix& m, const ToleranceContext& ctx) {
    validate_matrix(m);
    const ComplexMatrix gram = m.adjoint() * m;
    const ComplexMatrix diff = m * gram - gram * m;  // T T*T - T*T T
    return make(spectral_norm(diff), ctx.tau_degree(spectral_norm(m), 3));
}

Membership hyponormal_membership(const ComplexMatrix& m, const ToleranceContext& ctx) {
    validate_matrix(m);
    const ComplexMatrix self_commutator = m.adjoint() * m - m * m.adjoint();
    return make(negative_part(min_hermitian_eig(self_commutator)),
                ctx.tau_degree(spectral_norm(m), 2));
}

Membership paranormal_membership(const ComplexMatrix& m, const ToleranceContext& ctx) {
    validate_matrix(m);
    // ||Tx||^2 <= ||T^2 x|| for unit x  <=>  T*^2 T^2 - 2 lam T*T + lam^2 >= 0
    // for every lam > 0 (minimise the quadratic in lam at lam = ||Tx||^2).
    const double norm = spectral_norm(m);
    const double threshold = ctx.tau_degree(norm, 4);
    if (norm == 0.0) return make(0.0, threshold);

    const ComplexMatrix sq = m * m;
    const ComplexMatrix quartic = sq.adjoint() * sq;
    const ComplexMatrix gram = m.adjoint() * m;
    const ComplexMatrix eye = identity(m.rows());
    auto family_min = [&](double lam) {
        return min_hermitian_eig(quartic - 2.0 * lam * gram + lam * lam * eye);
    };

    constexpr int kGrid = 64;
    const double upper = 2.0 * norm * norm;
    const double step = upper / kGrid;
    double best_lam = step;
    double best = family_min(step);
    for (int i = 2; i <= kGrid; ++i) {
        const double lam = step * i;
        const double value = family_min(lam);
        if (value < best) {
            best = value;
            best_lam = lam;
        }
    }
    // Golden-section refinement of the minimum around the best grid point.
    double lo = std::max(best_lam - step, step * 1e-6);
    double hi = std::min(best_lam + step, upper);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = family_min(x1);
    double f2 = family_min(x2);
    for (int it = 0; it < ctx.max_refine; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = family_min(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = family_min(x2);
        }
    }
    best = std::min({best, f1, f2});
    return make(negative_part(best), threshold);
}

bool is_psd(const ComplexMatrix& m, const ToleranceContext& ctx) { return psd_membership(m, ctx).holds; }
bool is_self_adjoint(const ComplexMatrix& m, const ToleranceContext& ctx) {
    return self_adjoint_membership(m, ctx).holds;
}
bool is_accretive(const ComplexMatrix& m, const ToleranceContext& ctx) {
    return accretive_membership(m, ctx).holds;
}
bool is_normal(const ComplexMatrix& m, const ToleranceContext& ctx) { return normal_membership(m, ctx).holds; }
bool is_quasinormal(const ComplexMatrix& m, const ToleranceContext& ctx) {
    return quasinormal_membership(m, ctx).holds;
}
bool is_hyponormal(const ComplexMatrix& m, const ToleranceContext& ctx) {
    return hyponormal_membership(m, ctx).holds;
}
bool is_paranormal(const ComplexMatrix& m, const ToleranceContext& ctx) {
    return paranormal_membership(m, ctx).holds;
}

bool loewner_le(const ComplexMatrix& a, const ComplexMatrix& b, const ToleranceContext& ctx) {
    validate_matrix(a);
    validate_matrix(b);
    if (a.rows() != b.rows()) {
        throw OperatorError(ErrorCode::DimensionMismatch, "loewner_le operands differ in size");
    }
    for (const ComplexMatrix* side : {&a, &b}) {
        if (hermitian_residual(*side) > ctx.tau(*side)) {
            throw OperatorError(ErrorCode::NotHermitian, "loewner_le operand is not Hermitian");
        }
    }
    const double scale = std::max(spectral_norm(a), spectral_norm(b));
    return min_hermitian_eig(b - a) >= -ctx.tau_of_norm(scale);
}

ClassificationReport classify(const ComplexMatrix& m, const ToleranceContext& ctx) {
    ClassificationReport report;
    report.tol_used = ctx;
    auto record = [&](OperatorClass c, const Membership& mem) {
        report.flags[c] = mem.holds;
        report.residuals[c] = mem.residual;
        report.thresholds[c] = mem.threshold;
    };
    record(OperatorClass::positive, psd_membership(m, ctx));
    record(OperatorClass::self_adjoint, self_adjoint_membership(m, ctx));
    record(OperatorClass::normal, normal_membership(m, ctx));
    record(OperatorClass::quasinormal, quasinormal_membership(m, ctx));
    record(OperatorClass::hyponormal, hyponormal_membership(m, ctx));
    record(OperatorClass::paranormal, paranormal_membership(m, ctx));
    record(OperatorClass::accretive, accretive_membership(m, ctx));

    for (std::size_t i = 0; i + 1 < kImplicationChain.size(); ++i) {
        const auto stronger = kImplicationChain[i];
        const auto weaker = kImplicationChain[i + 1];
        if (report.flags[stronger] && !report.flags[weaker]) {
            throw OperatorError(ErrorCode::InternalInconsistency,
                                std::string(to_string(stronger)) + " flagged without " +
                                    std::string(to_string(weaker)) + "; check the tolerance settings");
        }
    }
    return report;
}

Membership power_accretive(const ScaledPower& p, const ToleranceContext& ctx) {
    if (p.negligible) return make(0.0, ctx.unit_tau());
    return make(negative_part(min_hermitian_eig(p.unit)), ctx.unit_tau());
}

Membership power_psd(const ScaledPower& p, const ToleranceContext& ctx) {
    if (p.negligible) return make(0.0, ctx.unit_tau());
    const double residual = std::max(hermitian_residual(p.unit), negative_part(min_hermitian_eig(p.unit)));
    return make(residual, ctx.unit_tau());
}

Membership power_normal(const ScaledPower& p, const ToleranceContext& ctx) {
    if (p.negligible) return make(0.0, ctx.tau_degree(1.0, 2));
    const ComplexMatrix& u = p.unit;
    return make(spectral_norm(u.adjoint() * u - u * u.adjoint()), ctx.tau_degree(1.0, 2));
}

namespace {

Complex unit_power(Complex z, std::uint64_t m) {
    Complex result(1.0, 0.0);
    while (m > 0) {
        if (m & 1U) {
            result *= z;
            result /= std::abs(result);
        }
        z *= z;
        z /= std::abs(z);
        m >>= 1U;
    }
    return result;
}

constexpr std::uint64_t kConsecutiveLimit = 512;

}  // namespace

PowerFamily::PowerFamily(const ComplexMatrix& t, const ToleranceContext& ctx)
    : t_(t), ctx_(ctx), ladder_(t, ctx) {
    spectral_ = normal_membership(t, ctx).holds;
    if (!spectral_) return;
    Eigen::ComplexSchur<ComplexMatrix> schur(t);
    schur_vectors_ = schur.matrixU();
    const double tau = ctx.tau(t);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
        const Complex lambda = schur.matrixT()(i, i);
        const double mod = std::abs(lambda);
        phases_.push_back(mod <= tau ? Complex(0.0, 0.0) : lambda / mod);
    }
}

const ScaledPower& PowerFamily::power(std::uint64_t m) {
    if (m < kConsecutiveLimit) {
        while (consecutive_.size() <= m) {
            consecutive_.push_back(ladder_.current());
            ladder_.step();
        }
        return consecutive_[m];
    }
    auto it = sparse_.find(m);
    if (it == sparse_.end()) it = sparse_.emplace(m, scaled_power(t_, m, ctx_)).first;
    return it->second;
}

std::vector<Complex> PowerFamily::unit_eigen_powers(std::uint64_t m) const {
    std::vector<Complex> out;
    for (const Complex& phase : phases_) {
        out.push_back(phase == Complex(0.0, 0.0) ? phase : unit_power(phase, m));
    }
    return out;
}

Membership PowerFamily::accretive(std::uint64_t m) {
    if (!spectral_) return power_accretive(power(m), ctx_);
    double residual = 0.0;
    for (const Complex& z : unit_eigen_powers(m)) residual = std::max(residual, negative_part(z.real()));
    return make(residual, ctx_.unit_tau());
}

Membership PowerFamily::psd(std::uint64_t m) {
    if (!spectral_) return power_psd(power(m), ctx_);
    double residual = 0.0;
    for (const Complex& z : unit_eigen_powers(m)) {
        residual = std::max({residual, negative_part(z.real()), std::abs(z.imag())});
    }
    return make(residual, ctx_.unit_tau());
}

Membership PowerFamily::normal(std::uint64_t m) {
    if (!spectral_) return power_normal(power(m), ctx_);
    return make(0.0, ctx_.tau_degree(1.0, 2));
}

std::optional<ComplexVector> PowerFamily::accretive_witness(std::uint64_t m) {
    if (accretive(m).holds) return std::nullopt;
    if (spectral_) {
        const std::vector<Complex> z = unit_eigen_powers(m);
        std::size_t worst = 0;
        for (std::size_t i = 1; i < z.size(); ++i) {
            if (z[i].real() < z[worst].real()) worst = i;
        }
        return ComplexVector(schur_vectors_.col(static_cast<Eigen::Index>(worst)));
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(real_part(power(m).unit));
    return ComplexVector(eig.eigenvectors().col(0));
}

}  // namespace oplens

#include "oplens/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "oplens/classifiers.hpp"

namespace oplens {

ComplexMatrix BlockPartition::reassemble() const {
    const Eigen::Index dim = t11.rows() + t22.rows();
    ComplexMatrix out(dim, dim);
    out.topLeftCorner(s_dim, s_dim) = t11;
    out.topRightCorner(s_dim, dim - s_dim) = t12;
    out.bottomLeftCorner(dim - s_dim, s_dim) = t21;
    out.bottomRightCorner(dim - s_dim, dim - s_dim) = t22;
    return out;
}

BlockPartition partition(const ComplexMatrix& t, Eigen::Index s_dim) {
    validate_matrix(t);
    const Eigen::Index dim = t.rows();
    if (s_dim < 0 || s_dim > dim) {
        throw OperatorError(ErrorCode::BadPartition, "s_dim must lie in [0, dim]");
    }
    const Eigen::Index rest = dim - s_dim;
    return {s_dim, t.topLeftCorner(s_dim, s_dim), t.topRightCorner(s_dim, rest),
            t.bottomLeftCorner(rest, s_dim), t.bottomRightCorner(rest, rest)};
}

BlockPositivityVerdict block_positivity_check(const ComplexMatrix& t, Eigen::Index s_dim,
                                              const ToleranceContext& ctx) {
    const BlockPartition blocks = partition(t, s_dim);
    const double norm = spectral_norm(t);
    const double tol = ctx.tau_of_norm(norm);
    const Eigen::Index rest = t.rows() - s_dim;

    BlockPositivityVerdict v;
    v.direct_psd = is_psd(t, ctx);

    // T11^{1/2} and its pseudo-inverse share the eigenvectors of Re T11;
    // eigenvalues at or below tau count as zero for both.
    ComplexMatrix root_pinv = ComplexMatrix::Zero(s_dim, s_dim);
    ComplexMatrix range_projector = ComplexMatrix::Zero(s_dim, s_dim);
    if (s_dim > 0) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(real_part(blocks.t11));
        const RealVector& lam = eig.eigenvalues();
        const ComplexMatrix& vecs = eig.eigenvectors();
        v.cond_i = hermitian_residual(blocks.t11) <= tol && lam(0) >= -tol;
        RealVector inv_root = RealVector::Zero(s_dim);
        RealVector keep = RealVector::Zero(s_dim);
        for (Eigen::Index i = 0; i < s_dim; ++i) {
            if (lam(i) > tol) {
                inv_root(i) = 1.0 / std::sqrt(lam(i));
                keep(i) = 1.0;
            }
        }
        root_pinv = vecs * inv_root.cast<Complex>().asDiagonal() * vecs.adjoint();
        range_projector = vecs * keep.cast<Complex>().asDiagonal() * vecs.adjoint();
    } else {
        v.cond_i = true;
    }

    v.cond_ii = spectral_norm(blocks.t21 - blocks.t12.adjoint()) <= tol;

    v.range_residual = spectral_norm((identity(s_dim) - range_projector) * blocks.t12);
    v.cond_iii = v.range_residual <= std::max(tol, std::sqrt(tol * norm));

    if (rest > 0) {
        const ComplexMatrix x = root_pinv * blocks.t12;
        const ComplexMatrix f = blocks.t22 - x.adjoint() * x;
        v.f_min_eig = hermitian_part_eigenvalues(f)(0);
        v.cond_iv = hermitian_residual(f) <= tol && v.f_min_eig >= -tol;
    } else {
        v.cond_iv = true;
    }

    v.psd = v.cond_i && v.cond_ii && v.cond_iii && v.cond_iv;
    return v;
}

ComplexMatrix CanonicalSqrtDecomposition::model() const {
    const Eigen::Index dim = a_dim + 2 * b_dim;
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m.topLeftCorner(a_dim, a_dim) = a;
    m.block(a_dim, a_dim, b_dim, b_dim) = b;
    m.block(a_dim, a_dim + b_dim, b_dim, b_dim) = c;
    m.block(a_dim + b_dim, a_dim + b_dim, b_dim, b_dim) = -b;
    return m;
}

Complex upper_branch_sqrt(Complex mu) {
    Complex s = std::sqrt(mu);
    if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() < 0.0)) s = -s;
    return s;
}

namespace {

struct Cluster {
    Complex centre;
    std::vector<Eigen::Index> members;
    bool zero = false;
};

/// Single-linkage clusters of the eigenvalues at distance <= merge_tol, with
/// zero as an extra anchor. Refuses when two clusters (or a cluster and zero)
/// come within refuse_tol.
std::vector<Cluster> cluster_eigenvalues(const ComplexVector& mu, double merge_tol, double refuse_tol) {
    const Eigen::Index n = mu.size();
    // Node n is the origin.
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n + 1));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    auto point = [&](Eigen::Index i) { return i == n ? Complex(0.0, 0.0) : mu(i); };
    for (Eigen::Index i = 0; i <= n; ++i) {
        for (Eigen::Index j = i + 1; j <= n; ++j) {
            if (std::abs(point(i) - point(j)) <= merge_tol) parent[find(i)] = find(j);
        }
    }
    for (Eigen::Index i = 0; i <= n; ++i) {
        for (Eigen::Index j = i + 1; j <= n; ++j) {
            if (find(i) != find(j) && std::abs(point(i) - point(j)) <= refuse_tol) {
                throw OperatorError(ErrorCode::IllConditioned,
                                    "eigenvalues of T^2 too close to separate spectral subspaces");
            }
        }
    }

    std::vector<Cluster> clusters;
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(n + 1), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index root = find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<Eigen::Index>(clusters.size());
            clusters.push_back({});
        }
        clusters[slot[root]].members.push_back(i);
    }
    for (auto& c : clusters) {
        c.zero = find(c.members.front()) == find(n);
        Complex sum(0.0, 0.0);
        for (auto i : c.members) sum += mu(i);
        c.centre = c.zero ? Complex(0.0, 0.0) : sum / static_cast<double>(c.members.size());
    }
    std::sort(clusters.begin(), clusters.end(), [](const Cluster& x, const Cluster& y) {
        if (x.centre.real() != y.centre.real()) return x.centre.real() < y.centre.real();
        return x.centre.imag() < y.centre.imag();
    });
    return clusters;
}

struct Pieces {
    std::vector<ComplexVector> a_cols;
    std::vector<ComplexVector> first;
    std::vector<ComplexVector> second;
    std::vector<Complex> labels;
    std::vector<double> couplings;
};

void split_nonzero(const ComplexMatrix& basis, const ComplexMatrix& t, Complex mu, double c_floor,
                   Pieces& out) {
    const Eigen::Index m = basis.cols();
    const Complex s = upper_branch_sqrt(mu);
    const ComplexMatrix involution = basis.adjoint() * t * basis / s;
    const ComplexMatrix idempotent = (identity(m) + involution) * 0.5;

    // Nonzero singular values of an idempotent are >= 1.
    Eigen::JacobiSVD<ComplexMatrix> svd_p(idempotent, Eigen::ComputeFullU);
    Eigen::Index r = 0;
    while (r < m && svd_p.singularValues()(r) >= 0.5) ++r;
    const ComplexMatrix range = basis * svd_p.matrixU().leftCols(r);
    const ComplexMatrix range_perp = basis * svd_p.matrixU().rightCols(m - r);

    if (r == 0 || r == m) {
        for (Eigen::Index j = 0; j < m; ++j) out.a_cols.push_back(basis * svd_p.matrixU().col(j));
        return;
    }

    const ComplexMatrix coupling = range.adjoint() * t * range_perp / s;  // X
    Eigen::JacobiSVD<ComplexMatrix> svd_x(coupling, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& sigma = svd_x.singularValues();
    const double mod = std::abs(s);
    Eigen::Index pairs = 0;
    while (pairs < sigma.size() && mod * sigma(pairs) > c_floor) ++pairs;

    const ComplexMatrix left = range * svd_x.matrixU();
    const ComplexMatrix right = range_perp * svd_x.matrixV();
    const Complex phase = std::polar(1.0, -std::arg(s));
    for (Eigen::Index i = 0; i < pairs; ++i) {
        out.first.push_back(left.col(i));
        out.second.push_back(right.col(i) * phase);
        out.labels.push_back(s);
        out.couplings.push_back(mod * sigma(i));
    }
    for (Eigen::Index j = pairs; j < left.cols(); ++j) out.a_cols.push_back(left.col(j));
    for (Eigen::Index j = pairs; j < right.cols(); ++j) out.a_cols.push_back(right.col(j));
}

void split_nilpotent(const ComplexMatrix& basis, const ComplexMatrix& t, double c_floor, Pieces& out) {
    const Eigen::Index m = basis.cols();
    const ComplexMatrix local = basis.adjoint() * t * basis;
    Eigen::JacobiSVD<ComplexMatrix> svd(local, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& sigma = svd.singularValues();
    Eigen::Index pairs = 0;
    while (pairs < sigma.size() && sigma(pairs) > c_floor) ++pairs;
    if (2 * pairs > m) {
        throw OperatorError(ErrorCode::IllConditioned, "T is not square-zero on the kernel of T^2");
    }

    ComplexMatrix paired(m, 2 * pairs);
    paired << svd.matrixU().leftCols(pairs), svd.matrixV().leftCols(pairs);
    for (Eigen::Index i = 0; i < pairs; ++i) {
        out.first.push_back(basis * svd.matrixU().col(i));
        out.second.push_back(basis * svd.matrixV().col(i));
        out.labels.push_back(Complex(0.0, 0.0));
        out.couplings.push_back(sigma(i));
    }
    if (pairs == 0) {
        for (Eigen::Index j = 0; j < m; ++j) out.a_cols.push_back(basis.col(j));
        return;
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(paired);
    const ComplexMatrix full_q = qr.householderQ();
    const ComplexMatrix rest = basis * full_q.rightCols(m - 2 * pairs);
    for (Eigen::Index j = 0; j < rest.cols(); ++j) out.a_cols.push_back(rest.col(j));
}

}  // namespace

CanonicalSqrtDecomposition sqrt_normal_decompose(const ComplexMatrix& t, const ToleranceContext& ctx) {
    validate_matrix(t);
    const ComplexMatrix square = t * t;
    if (!normal_membership(square, ctx).holds) {
        throw OperatorError(ErrorCode::SquareNotNormal, "T^2 is not normal within tolerance");
    }
    const Eigen::Index dim = t.rows();
    const double norm_t = spectral_norm(t);
    const double tau_t = ctx.tau_of_norm(norm_t);
    const double tau_sq = ctx.tau(square);
    const double subspace_tol = std::max(tau_t, 1e-8 * norm_t);

    Eigen::ComplexSchur<ComplexMatrix> schur(square);
    const ComplexMatrix& q = schur.matrixU();
    const ComplexVector mu = schur.matrixT().diagonal();
    const auto clusters = cluster_eigenvalues(mu, tau_sq, 10.0 * tau_sq);

    Pieces pieces;
    for (const auto& cluster : clusters) {
        ComplexMatrix basis(dim, static_cast<Eigen::Index>(cluster.members.size()));
        for (std::size_t j = 0; j < cluster.members.size(); ++j) {
            basis.col(static_cast<Eigen::Index>(j)) = q.col(cluster.members[j]);
        }
        const ComplexMatrix leak = t * basis - basis * (basis.adjoint() * t * basis);
        if (spectral_norm(leak) > subspace_tol) {
            throw OperatorError(ErrorCode::IllConditioned, "spectral subspace of T^2 is not T-invariant");
        }
        if (cluster.zero) {
            split_nilpotent(basis, t, tau_t, pieces);
        } else {
            split_nonzero(basis, t, cluster.centre, tau_t, pieces);
        }
    }

    CanonicalSqrtDecomposition d;
    d.a_dim = static_cast<Eigen::Index>(pieces.a_cols.size());
    d.b_dim = static_cast<Eigen::Index>(pieces.first.size());
    d.u.resize(dim, dim);
    Eigen::Index col = 0;
    for (const auto& v : pieces.a_cols) d.u.col(col++) = v;
    for (const auto& v : pieces.first) d.u.col(col++) = v;
    for (const auto& v : pieces.second) d.u.col(col++) = v;

    const ComplexMatrix ua = d.u.leftCols(d.a_dim);
    d.a = ua.adjoint() * t * ua;
    d.b = ComplexMatrix::Zero(d.b_dim, d.b_dim);
    d.c = ComplexMatrix::Zero(d.b_dim, d.b_dim);
    for (Eigen::Index i = 0; i < d.b_dim; ++i) {
        d.b(i, i) = pieces.labels[static_cast<std::size_t>(i)];
        d.c(i, i) = pieces.couplings[static_cast<std::size_t>(i)];
    }
    d.residual = spectral_norm(d.u.adjoint() * t * d.u - d.model());

    const auto report = verify_canonical_form(d, t, ctx);
    for (const char* name : {"reconstruction", "unitarity"}) {
        if (!report.check(name).ok) {
            throw OperatorError(ErrorCode::IllConditioned,
                                std::string("canonical model failed the ") + name + " check");
        }
    }
    return d;
}

bool CanonicalFormReport::passes() const {
    return std::all_of(checks.begin(), checks.end(), [](const CanonicalCheck& c) { return c.ok; });
}

const CanonicalCheck& CanonicalFormReport::check(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return c;
    }
    throw OperatorError(ErrorCode::BadParams, "no canonical check named " + name);
}

CanonicalFormReport verify_canonical_form(const CanonicalSqrtDecomposition& d, const ComplexMatrix& t,
                                          const ToleranceContext& ctx) {
    validate_matrix(t);
    CanonicalFormReport report;
    auto add_le = [&](std::string name, double value, double threshold) {
        report.checks.push_back({std::move(name), value, threshold, value <= threshold});
    };
    const Eigen::Index dim = t.rows();
    const double norm_t = spectral_norm(t);
    const double tau_t = ctx.tau_of_norm(norm_t);

    const bool shapes_ok = d.u.rows() == dim && d.u.cols() == dim && d.a_dim + 2 * d.b_dim == dim &&
                           d.a.rows() == d.a_dim && d.a.cols() == d.a_dim && d.b.rows() == d.b_dim &&
                           d.b.cols() == d.b_dim && d.c.rows() == d.b_dim && d.c.cols() == d.b_dim;
    report.checks.push_back({"dimensions", shapes_ok ? 0.0 : 1.0, 0.0, shapes_ok});
    if (!shapes_ok) return report;

    add_le("reconstruction", spectral_norm(d.u.adjoint() * t * d.u - d.model()),
           std::max(tau_t, 1e-8 * norm_t));
    add_le("unitarity", spectral_norm(d.u.adjoint() * d.u - identity(dim)), 1e-8);

    auto normal_res = [](const ComplexMatrix& m) {
        return m.size() == 0 ? 0.0 : spectral_norm(m.adjoint() * m - m * m.adjoint());
    };
    auto deg2 = [&](const ComplexMatrix& m) { return ctx.tau_degree(spectral_norm(m), 2); };
    add_le("a_normal", normal_res(d.a), deg2(d.a));
    add_le("b_normal", normal_res(d.b), deg2(d.b));
    add_le("c_hermitian", hermitian_residual(d.c), tau_t);

    if (d.b_dim > 0) {
        const double c_min = hermitian_part_eigenvalues(d.c)(0);
        report.checks.push_back({"c_injective", c_min, tau_t, c_min > tau_t});
        add_le("bc_commute", spectral_norm(d.b * d.c - d.c * d.b), tau_t);
        Eigen::ComplexEigenSolver<ComplexMatrix> eig(d.b, false);
        double lowest_imag = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < d.b_dim; ++i) lowest_imag = std::min(lowest_imag, eig.eigenvalues()(i).imag());
        add_le("b_upper_half_plane", std::max(0.0, -lowest_imag), tau_t);
        add_le("b_hermitian_part_nonneg", std::max(0.0, -hermitian_part_eigenvalues(d.b)(0)), tau_t);
    } else {
        for (const char* name : {"c_injective", "bc_commute", "b_upper_half_plane", "b_hermitian_part_nonneg"}) {
            report.checks.push_back({name, 0.0, tau_t, true});
        }
    }
    return report;
}

namespace {

void check_remark_blocks(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || c.rows() != c.cols() || b.rows() != c.rows()) {
        throw OperatorError(ErrorCode::DimensionMismatch, "A, B, C must be square with B, C the same size");
    }
}

ComplexMatrix assemble(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) {
    CanonicalSqrtDecomposition d;
    d.a_dim = a.rows();
    d.b_dim = b.rows();
    d.a = a;
    d.b = b;
    d.c = c;
    return d.model();
}

}  // namespace

std::pair<ComplexMatrix, ComplexMatrix> remark_block_identities(const ComplexMatrix& a, const ComplexMatrix& b,
                                                               const ComplexMatrix& c,
                                                               const ToleranceContext& ctx) {
    check_remark_blocks(a, b, c);
    if (c.size() > 0 && hermitian_residual(c) > ctx.tau(c)) {
        throw OperatorError(ErrorCode::NotHermitian, "C must be Hermitian");
    }
    const ComplexMatrix t = assemble(a, b, c);
    const ComplexMatrix ts = t.adjoint();
    return {t * ts * t, ts * t * t};
}

std::pair<ComplexMatrix, ComplexMatrix> remark_block_formulas(const ComplexMatrix& a, const ComplexMatrix& b,
                                                             const ComplexMatrix& c) {
    check_remark_blocks(a, b, c);
    const Eigen::Index na = a.rows();
    const Eigen::Index nb = b.rows();
    const Eigen::Index dim = na + 2 * nb;
    const ComplexMatrix as = a.adjoint();
    const ComplexMatrix bs = b.adjoint();
    const ComplexMatrix b2 = b * b;
    const ComplexMatrix c2 = c * c;
    const ComplexMatrix comm = b * c - c * b;

    ComplexMatrix left = ComplexMatrix::Zero(dim, dim);
    left.topLeftCorner(na, na) = a * as * a;
    left.block(na, na, nb, nb) = b * bs * b + c2 * b;
    left.block(na, na + nb, nb, nb) = b * bs * c + c2 * c + c * bs * b;
    left.block(na + nb, na, nb, nb) = -b * c * b;
    left.block(na + nb, na + nb, nb, nb) = -b * c2 - b * bs * b;

    ComplexMatrix right = ComplexMatrix::Zero(dim, dim);
    right.topLeftCorner(na, na) = as * a * a;
    right.block(na, na, nb, nb) = bs * b2;
    right.block(na, na + nb, nb, nb) = bs * comm;
    right.block(na + nb, na, nb, nb) = c * b2;
    right.block(na + nb, na + nb, nb, nb) = c * comm - bs * b2;
    return {left, right};
}

}  // namespace oplens

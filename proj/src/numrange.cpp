#include "oplens/numrange.hpp"

#include <cmath>

namespace oplens {

namespace {

double wrap_angle(double theta) {
    double w = std::fmod(theta, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    if (w >= 2.0 * kPi) w = 0.0;
    return w;
}

HalfPlaneWitness search_best(const ComplexMatrix& t, const ToleranceContext& ctx) {
    const int grid = ctx.angle_grid;
    const double step = 2.0 * kPi / grid;
    double best_theta = 0.0;
    double best = rotated_min_eig(t, 0.0);
    for (int j = 1; j < grid; ++j) {
        const double theta = step * j;
        const double value = rotated_min_eig(t, theta);
        if (value > best) {  // strict: the smallest angle wins ties
            best = value;
            best_theta = theta;
        }
    }

    double lo = best_theta - step;
    double hi = best_theta + step;
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = rotated_min_eig(t, x1);
    double f2 = rotated_min_eig(t, x2);
    for (int it = 0; it < ctx.max_refine; ++it) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = rotated_min_eig(t, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = rotated_min_eig(t, x2);
        }
    }
    const double refined_theta = f1 > f2 ? x1 : x2;
    const double refined = std::max(f1, f2);
    if (refined > best) {
        best = refined;
        best_theta = refined_theta;
    }
    return HalfPlaneWitness{wrap_angle(best_theta), best};
}

std::optional<HalfPlaneWitness> search_halfplane(const ComplexMatrix& t, double threshold,
                                                 const ToleranceContext& ctx) {
    const HalfPlaneWitness best = search_best(t, ctx);
    if (best.min_eig < -threshold) return std::nullopt;
    return best;
}

}  // namespace

ComplexMatrix rotate(const ComplexMatrix& t, double theta) { return t * std::polar(1.0, theta); }

double rotated_min_eig(const ComplexMatrix& t, double theta) {
    return hermitian_part_eigenvalues(rotate(t, theta))(0);
}

double support(const ComplexMatrix& t, double theta, const ToleranceContext& /*ctx*/) {
    validate_matrix(t);
    const RealVector eig = hermitian_part_eigenvalues(rotate(t, -theta));
    return eig(eig.size() - 1);
}

std::vector<Complex> boundary_points(const ComplexMatrix& t, int m, const ToleranceContext& /*ctx*/) {
    validate_matrix(t);
    if (m < 3) throw OperatorError(ErrorCode::BadParams, "boundary_points needs m >= 3");
    std::vector<Complex> points;
    points.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const double theta = 2.0 * kPi * j / m;
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(real_part(rotate(t, -theta)));
        const ComplexVector x = solver.eigenvectors().col(t.rows() - 1);
        points.push_back(x.dot(t * x));  // x* T x
    }
    return points;
}

HalfPlaneWitness best_rotation(const ComplexMatrix& t, const ToleranceContext& ctx) {
    validate_matrix(t);
    return search_best(t, ctx);
}

std::optional<HalfPlaneWitness> halfplane_witness(const ComplexMatrix& t, const ToleranceContext& ctx) {
    validate_matrix(t);
    return search_halfplane(t, ctx.tau(t), ctx);
}

std::optional<HalfPlaneWitness> halfplane_witness(const ScaledPower& p, const ToleranceContext& ctx) {
    if (p.negligible) return HalfPlaneWitness{0.0, 0.0};
    return search_halfplane(p.unit, ctx.unit_tau(), ctx);
}

std::optional<SectorCertificate> sector_contains(const ComplexMatrix& t, double alpha,
                                                 const ToleranceContext& ctx) {
    validate_matrix(t);
    if (!(alpha > 0.0) || alpha > kPi / 2.0) {
        throw OperatorError(ErrorCode::BadAngle, "sector half-angle must lie in (0, pi/2]");
    }
    const double phi = kPi / 2.0 - alpha;
    const double tol = ctx.tau(t);
    const HalfPlaneWitness upper{wrap_angle(phi), rotated_min_eig(t, phi)};
    const HalfPlaneWitness lower{wrap_angle(-phi), rotated_min_eig(t, -phi)};
    if (upper.min_eig < -tol || lower.min_eig < -tol) return std::nullopt;
    return SectorCertificate{alpha, upper, lower};
}

}  // namespace oplens

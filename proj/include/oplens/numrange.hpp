#pragma once

// Numerical-range geometry through rotated Hermitian parts. For a unit
// vector x, Re(e^{i theta} <Tx, x>) = <Re(e^{i theta} T) x, x>, so every
// half-plane question about W(T) is a minimum-eigenvalue question.

#include <optional>
#include <vector>

#include "oplens/linalg.hpp"

namespace oplens {

inline constexpr double kPi = 3.14159265358979323846;

struct HalfPlaneWitness {
    double theta = 0.0;    // in [0, 2 pi)
    double min_eig = 0.0;  // lambda_min(Re(e^{i theta} T))
};

struct SectorCertificate {
    double alpha = 0.0;  // half-angle of {z : |arg z| <= alpha}
    HalfPlaneWitness upper;  // phi = +(pi/2 - alpha)
    HalfPlaneWitness lower;  // phi = -(pi/2 - alpha), reported in [0, 2 pi)
};

/// e^{i theta} T
[[nodiscard]] ComplexMatrix rotate(const ComplexMatrix& t, double theta);

/// lambda_min(Re(e^{i theta} T))
[[nodiscard]] double rotated_min_eig(const ComplexMatrix& t, double theta);

/// h(theta) = max Re(e^{-i theta} z) over W(T) = lambda_max(Re(e^{-i theta} T)).
[[nodiscard]] double support(const ComplexMatrix& t, double theta, const ToleranceContext& ctx);

/// m boundary points <T x_theta, x_theta> where x_theta is the top
/// eigenvector of Re(e^{-i theta} T), theta = 2 pi j / m. Requires m >= 3.
[[nodiscard]] std::vector<Complex> boundary_points(const ComplexMatrix& t, int m,
                                                   const ToleranceContext& ctx);

/// The angle maximising lambda_min(Re(e^{i theta} T)) found by the search
/// below, whether or not the maximum is non-negative.
[[nodiscard]] HalfPlaneWitness best_rotation(const ComplexMatrix& t, const ToleranceContext& ctx);

/// Searches theta for Re(e^{i theta} T) >= -tau: a grid of ctx.angle_grid
/// angles, then golden-section refinement around the best one. An empty
/// result means no certificate at this resolution, not that none exists.
[[nodiscard]] std::optional<HalfPlaneWitness> halfplane_witness(const ComplexMatrix& t,
                                                                const ToleranceContext& ctx);

/// Same search on a power held at unit scale (threshold unit_tau()).
[[nodiscard]] std::optional<HalfPlaneWitness> halfplane_witness(const ScaledPower& p,
                                                                const ToleranceContext& ctx);

/// W(T) inside the closed sector |arg z| <= alpha: the sector is the
/// intersection of two closed half-planes through the origin, so two PSD
/// checks decide it exactly. Throws BadAngle unless 0 < alpha <= pi/2.
[[nodiscard]] std::optional<SectorCertificate> sector_contains(const ComplexMatrix& t, double alpha,
                                                               const ToleranceContext& ctx);

}  // namespace oplens

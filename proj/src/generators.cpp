#include "oplens/generators.hpp"

#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "oplens/numrange.hpp"

namespace oplens {

namespace {

struct ClassName {
    GenClass cls;
    const char* name;
};

constexpr ClassName kClassNames[] = {
    {GenClass::normal, "normal"},
    {GenClass::psd, "psd"},
    {GenClass::self_adjoint, "self_adjoint"},
    {GenClass::accretive, "accretive"},
    {GenClass::sqrt_of_normal, "sqrt_of_normal"},
    {GenClass::nilpotent2, "nilpotent2"},
    {GenClass::unitary, "unitary"},
    {GenClass::generic, "generic"},
    {GenClass::near_hypothesis, "near_hypothesis"},
};

ComplexMatrix conjugate_diagonal(const ComplexVector& d, Rng& rng) {
    const ComplexMatrix u = random_unitary(static_cast<int>(d.size()), rng);
    return u * d.asDiagonal() * u.adjoint();
}

ComplexMatrix hermitian_with_spectrum(const RealVector& d, Rng& rng) {
    const ComplexMatrix m = conjugate_diagonal(d.cast<Complex>(), rng);
    return (m + m.adjoint()) * 0.5;
}

ComplexMatrix sample_normal(int dim, Rng& rng) {
    ComplexVector d(dim);
    for (int i = 0; i < dim; ++i) d(i) = std::polar(rng.uniform(0.5, 1.5), rng.uniform(0.0, 2.0 * kPi));
    return conjugate_diagonal(d, rng);
}

ComplexMatrix sample_psd(int dim, Rng& rng) {
    RealVector d(dim);
    for (int i = 0; i < dim; ++i) d(i) = rng.uniform(0.0, 1.5);
    // A quarter of the samples get an exact kernel.
    if (dim >= 2 && rng.below(4) == 0) d(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(dim)))) = 0.0;
    return hermitian_with_spectrum(d, rng);
}

ComplexMatrix sample_self_adjoint(int dim, Rng& rng) {
    RealVector d(dim);
    for (int i = 0; i < dim; ++i) d(i) = rng.uniform(-1.5, 1.5);
    return hermitian_with_spectrum(d, rng);
}

ComplexMatrix sample_sqrt_of_normal(int dim, Rng& rng) {
    const int b_dim = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(dim / 2)));
    const int a_dim = dim - 2 * b_dim;
    ComplexMatrix model = ComplexMatrix::Zero(dim, dim);
    if (a_dim > 0) model.topLeftCorner(a_dim, a_dim) = sample_normal(a_dim, rng);
    for (int i = 0; i < b_dim; ++i) {
        // B diagonal in the closed first quadrant, occasionally zero.
        Complex b = std::polar(rng.uniform(0.3, 1.5), rng.uniform(0.0, kPi / 2.0));
        if (rng.below(6) == 0) b = 0.0;
        const double c = rng.uniform(0.3, 1.5);
        const int r = a_dim + i;
        model(r, r) = b;
        model(r, r + b_dim) = c;
        model(r + b_dim, r + b_dim) = -b;
    }
    const ComplexMatrix w = random_unitary(dim, rng);
    return w * model * w.adjoint();
}

ComplexMatrix sample_nilpotent2(int dim, Rng& rng) {
    const int top = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(dim / 2)));
    ComplexMatrix model = ComplexMatrix::Zero(dim, dim);
    for (int i = 0; i < top; ++i) {
        for (int j = top; j < dim; ++j) model(i, j) = rng.complex_normal();
    }
    const ComplexMatrix w = random_unitary(dim, rng);
    return w * model * w.adjoint();
}

ComplexMatrix sample_generic(int dim, Rng& rng) {
    ComplexMatrix m(dim, dim);
    for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) m(i, j) = rng.complex_normal();
    }
    return m / std::sqrt(static_cast<double>(dim));
}

ComplexMatrix sample_near_hypothesis(int dim, int q, Rng& rng) {
    // Normal base whose q-th power has eigenvalues in the open right
    // half-plane, plus non-normal noise of size 1e-9 .. 1e-3.
    constexpr double margin = 0.05;
    ComplexVector d(dim);
    for (int i = 0; i < dim; ++i) {
        const double branch = 2.0 * kPi * static_cast<double>(rng.below(static_cast<std::uint64_t>(q))) / q;
        const double angle = rng.uniform(-(kPi / 2.0 - margin), kPi / 2.0 - margin) / q + branch;
        d(i) = std::polar(rng.uniform(0.5, 1.5), angle);
    }
    const ComplexMatrix base = conjugate_diagonal(d, rng);
    const double eps = std::pow(10.0, -rng.uniform(3.0, 9.0));
    return base + eps * sample_generic(dim, rng);
}

}  // namespace

std::string to_string(GenClass c) {
    for (const auto& entry : kClassNames) {
        if (entry.cls == c) return entry.name;
    }
    return "unknown";
}

GenClass parse_gen_class(std::string_view name) {
    for (const auto& entry : kClassNames) {
        if (name == entry.name) return entry.cls;
    }
    throw OperatorError(ErrorCode::BadSpec, "unknown generator class '" + std::string(name) + "'");
}

const std::vector<GenClass>& all_gen_classes() {
    static const std::vector<GenClass> classes = [] {
        std::vector<GenClass> out;
        for (const auto& entry : kClassNames) out.push_back(entry.cls);
        return out;
    }();
    return classes;
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return radius * std::cos(2.0 * kPi * u2);
}

Complex Rng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) * std::sqrt(0.5);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) return 0;
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
}

ComplexMatrix random_unitary(int dim, Rng& rng) {
    ComplexMatrix z(dim, dim);
    for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) z(i, j) = rng.complex_normal();
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    for (int j = 0; j < dim; ++j) {
        const double mod = std::abs(r(j, j));
        if (mod > 0.0) q.col(j) *= r(j, j) / mod;
    }
    return q;
}

ComplexMatrix generate(const GenSpec& spec) {
    if (spec.dim < 1 || spec.dim > kMaxGenDim) {
        throw OperatorError(ErrorCode::BadSpec, "dim must lie in [1, 16]");
    }
    if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) {
        throw OperatorError(ErrorCode::BadSpec, "scale must be positive and finite");
    }
    if ((spec.cls == GenClass::sqrt_of_normal || spec.cls == GenClass::nilpotent2) && spec.dim < 2) {
        throw OperatorError(ErrorCode::BadSpec, to_string(spec.cls) + " needs dim >= 2");
    }
    if (spec.cls == GenClass::near_hypothesis && (spec.p < 2 || spec.q < 2)) {
        throw OperatorError(ErrorCode::BadSpec, "near_hypothesis needs p, q >= 2");
    }
    Rng rng(spec.seed);
    const int n = spec.dim;
    ComplexMatrix m;
    switch (spec.cls) {
        case GenClass::normal: m = sample_normal(n, rng); break;
        case GenClass::psd: m = sample_psd(n, rng); break;
        case GenClass::self_adjoint: m = sample_self_adjoint(n, rng); break;
        case GenClass::accretive: {
            const ComplexMatrix h = sample_psd(n, rng);
            const ComplexMatrix k = sample_self_adjoint(n, rng);
            m = h + Complex(0.0, 1.0) * k;
            break;
        }
        case GenClass::sqrt_of_normal: m = sample_sqrt_of_normal(n, rng); break;
        case GenClass::nilpotent2: m = sample_nilpotent2(n, rng); break;
        case GenClass::unitary: m = random_unitary(n, rng); break;
        case GenClass::generic: m = sample_generic(n, rng); break;
        case GenClass::near_hypothesis: m = sample_near_hypothesis(n, spec.q, rng); break;
    }
    return m * spec.scale;
}

std::vector<CatalogEntry> catalog() {
    std::vector<CatalogEntry> out;

    out.push_back({"sixth_root_scalar", std::polar(1.0, kPi / 3.0) * identity(2),
                   {{"power_psd:6", true}, {"re_power_psd:7", true}, {"psd", false}, {"normal", true}}});

    ComplexMatrix jordan = ComplexMatrix::Zero(2, 2);
    jordan(0, 1) = 1.0;
    out.push_back({"jordan2", jordan, {{"power_normal:2", true}, {"normal", false}, {"ascent:2", true}}});

    ComplexMatrix shear(2, 2);
    shear << 1.0, 1.0, 0.0, 1.0;
    out.push_back({"shear",
                   shear,
                   {{"accretive", true},
                    {"re_power_psd:2", true},
                    {"re_power_psd:4", false},
                    {"normal", false},
                    {"ascent:0", true}}});

    ComplexMatrix involution(2, 2);
    involution << 1.0, 1.0, 0.0, -1.0;
    out.push_back({"involution_like",
                   involution,
                   {{"power_normal:2", true}, {"normal", false}, {"zero_interior_numrange", true}}});

    ComplexMatrix psd2 = ComplexMatrix::Zero(2, 2);
    psd2(0, 0) = 1.0;
    psd2(1, 1) = 2.0;
    out.push_back({"psd2", psd2, {{"psd", true}, {"equivalent_conditions", true}}});
    return out;
}

}  // namespace oplens

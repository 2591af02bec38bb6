#include "oplens/theorems.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "oplens/classifiers.hpp"
#include "oplens/generators.hpp"
#include "oplens/structure.hpp"

namespace oplens {

// ---- inequalities -------------------------------------------------------

bool check_lowner_heinz(const ComplexMatrix& a, const ComplexMatrix& b, double p, const ToleranceContext& ctx) {
    validate_matrix(a);
    validate_matrix(b);
    if (!(p >= 0.0 && p <= 1.0)) throw OperatorError(ErrorCode::PreconditionViolated, "p must lie in [0, 1]");
    if (a.rows() != b.rows()) throw OperatorError(ErrorCode::PreconditionViolated, "A and B differ in size");
    if (!is_psd(a, ctx) || !is_psd(b, ctx) || !loewner_le(b, a, ctx)) {
        throw OperatorError(ErrorCode::PreconditionViolated, "needs 0 <= B <= A");
    }
    return loewner_le(psd_power(b, p, ctx), psd_power(a, p, ctx), ctx);
}

bool check_kato(const ComplexMatrix& t, const ComplexVector& x, const ComplexVector& y, double alpha,
                const ToleranceContext& ctx) {
    validate_matrix(t);
    if (x.size() != t.cols() || y.size() != t.rows()) {
        throw OperatorError(ErrorCode::DimensionMismatch, "vector sizes must match T");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw OperatorError(ErrorCode::BadDomain, "alpha must lie in [0, 1]");
    const ComplexMatrix gram = t.adjoint() * t;
    const ComplexMatrix cogram = t * t.adjoint();
    const double lhs = std::norm(y.dot(t * x));
    const double rx = x.dot(psd_power(gram, alpha, ctx) * x).real();
    const double ry = y.dot(psd_power(cogram, 1.0 - alpha, ctx) * y).real();
    const double norm = spectral_norm(t);
    const double slack = (ctx.atol + ctx.rtol * norm * norm) * x.squaredNorm() * y.squaredNorm();
    return lhs <= rx * ry + slack;
}

bool check_fuglede_putnam(const ComplexMatrix& t, const ComplexMatrix& m, const ComplexMatrix& n,
                          const ToleranceContext& ctx) {
    validate_matrix(m);
    validate_matrix(n);
    if (t.rows() != m.rows() || t.cols() != n.cols()) {
        throw OperatorError(ErrorCode::DimensionMismatch, "T must map the space of N into that of M");
    }
    if (!is_normal(m, ctx) || !is_normal(n, ctx)) {
        throw OperatorError(ErrorCode::PreconditionViolated, "M and N must be normal");
    }
    const double scale = std::max({spectral_norm(t), spectral_norm(m), spectral_norm(n)});
    const double tol = ctx.tau_degree(scale, 2);
    if (spectral_norm(t * n - m * t) > tol) {
        throw OperatorError(ErrorCode::PreconditionViolated, "TN != MT");
    }
    return spectral_norm(t * n.adjoint() - m.adjoint() * t) <= kFugledeSlack * tol;
}

bool check_commuting_normal_product(const ComplexMatrix& m, const ComplexMatrix& n, const ToleranceContext& ctx) {
    validate_matrix(m);
    validate_matrix(n);
    if (m.rows() != n.rows()) throw OperatorError(ErrorCode::DimensionMismatch, "M and N differ in size");
    if (!is_normal(m, ctx) || !is_normal(n, ctx)) {
        throw OperatorError(ErrorCode::PreconditionViolated, "M and N must be normal");
    }
    const double scale = std::max(spectral_norm(m), spectral_norm(n));
    if (spectral_norm(m * n - n * m) > ctx.tau_degree(scale, 2)) {
        throw OperatorError(ErrorCode::PreconditionViolated, "M and N do not commute");
    }
    const ComplexMatrix prod = m * n;
    const double residual = spectral_norm(prod.adjoint() * prod - prod * prod.adjoint());
    return residual <= kFugledeSlack * ctx.tau_degree(scale * scale, 2);
}

double cot_halfangle(double x) {
    if (!(x > 0.0 && x < kPi)) throw OperatorError(ErrorCode::BadDomain, "x must lie in (0, pi)");
    const double c = std::cos(x) / std::sin(x);
    const double root = std::hypot(1.0, c);
    // For c < 0 the sum cancels; c + root = 1 / (root - c).
    return c >= 0.0 ? c + root : 1.0 / (root - c);
}

// ---- dyadic positivity ---------------------------------------------------

namespace {

ProfileEntry profile_entry(int k, PowerFamily& family) {
    const std::uint64_t m = std::uint64_t{1} << k;
    const ScaledPower& power = family.power(m);
    ProfileEntry e;
    e.k = k;
    e.accretive = family.accretive(m).holds;
    if (power.negligible) return e;
    e.unit_min_eig = hermitian_part_eigenvalues(power.unit)(0);
    e.min_eig = e.unit_min_eig * std::exp(power.log_norm);
    return e;
}

}  // namespace

std::vector<ProfileEntry> dyadic_accretivity_profile(const ComplexMatrix& t, int n_max, const ToleranceContext& ctx) {
    validate_matrix(t);
    if (n_max < 0 || n_max > kMaxDyadicLevel) {
        throw OperatorError(ErrorCode::BadParams, "n_max must lie in [0, 62]");
    }
    PowerFamily family(t, ctx);
    std::vector<ProfileEntry> out;
    for (int k = 0; k <= n_max; ++k) out.push_back(profile_entry(k, family));
    return out;
}

int dyadic_bound(const ComplexMatrix& t, const ToleranceContext& ctx) {
    validate_matrix(t);
    const double re_norm = spectral_norm(real_part(t));
    const double tau = ctx.tau(t);
    if (re_norm <= 0.0) return 1;
    const double level = std::ceil(std::log2(kPi) + std::log2(re_norm) - std::log2(tau)) + 1.0;
    return static_cast<int>(std::clamp(level, 1.0, static_cast<double>(kMaxDyadicLevel)));
}

std::string to_string(CertificateKind k) {
    switch (k) {
        case CertificateKind::direct_psd: return "direct_psd";
        case CertificateKind::dyadic_sector: return "dyadic_sector";
        case CertificateKind::violation: return "violation";
    }
    return "unknown";
}

PositivityCertificate positivity_certificate(const ComplexMatrix& t, const ToleranceContext& ctx) {
    validate_matrix(t);
    const int bound = dyadic_bound(t, ctx);
    const double tau = ctx.tau(t);
    PositivityCertificate cert;
    cert.checked_k = bound;

    if (is_psd(t, ctx)) {
        cert.kind = CertificateKind::direct_psd;
        cert.profile = dyadic_accretivity_profile(t, bound, ctx);
        cert.sector = sector_contains(t, kPi / std::ldexp(1.0, bound + 1), ctx);
        return cert;
    }

    PowerFamily family(t, ctx);
    for (int k = 0; k <= bound; ++k) {
        cert.profile.push_back(profile_entry(k, family));
        if (cert.profile.back().accretive) continue;

        const std::uint64_t m = std::uint64_t{1} << k;
        const ComplexVector x = *family.accretive_witness(m);
        cert.kind = CertificateKind::violation;
        cert.checked_k = k - 1;
        cert.violation_k = k;
        cert.violation_direction = x;
        cert.witness_value = x.dot(family.power(m).unit * x).real();
        return cert;
    }

    // Every dyadic level passed: the sector has shrunk below tau, so T can
    // only be PSD with its residual hidden under a slightly wider tolerance.
    const double relaxed = 100.0 * tau;
    if (spectral_norm(imag_part(t)) > relaxed || hermitian_part_eigenvalues(t)(0) < -relaxed) {
        throw OperatorError(ErrorCode::InternalInconsistency,
                            "dyadic profile passed through level " + std::to_string(bound) +
                                " but T is not PSD at 100 tau");
    }
    cert.kind = CertificateKind::dyadic_sector;
    cert.sector = sector_contains(t, kPi / std::ldexp(1.0, bound + 1), ctx);
    return cert;
}

// ---- theorem verdicts ----------------------------------------------------

bool TheoremVerdict::hypotheses_hold() const {
    return std::all_of(hypotheses.begin(), hypotheses.end(), [](const Predicate& p) { return p.holds; });
}

namespace {

/// Power predicates of one matrix plus the lazily computed structure facts.
class PowerCache {
public:
    PowerCache(const ComplexMatrix& t, const ToleranceContext& ctx) : t_(t), ctx_(ctx), family_(t, ctx) {}

    Membership accretive(std::uint64_t m) { return family_.accretive(m); }
    Membership psd(std::uint64_t m) { return family_.psd(m); }
    Membership normal(std::uint64_t m) { return family_.normal(m); }
    const ScaledPower& power(std::uint64_t m) { return family_.power(m); }
    static std::uint64_t dyadic(int j) { return std::uint64_t{1} << j; }

    int bound() {
        if (bound_ < 0) bound_ = dyadic_bound(t_, ctx_);
        return bound_;
    }

    bool ascent_le_1() {
        if (asc_ < 0) asc_ = asc_le_1(t_, ctx_) ? 1 : 0;
        return asc_ == 1;
    }

private:
    const ComplexMatrix& t_;
    const ToleranceContext& ctx_;
    PowerFamily family_;
    int bound_ = -1;
    int asc_ = -1;
};

Predicate from_membership(std::string name, const Membership& m, bool truncated = false) {
    return {std::move(name), m.holds, m.residual, truncated};
}

Predicate flag(std::string name, bool holds) { return {std::move(name), holds, holds ? 0.0 : 1.0, false}; }

struct FamilyResult {
    Membership membership;
    std::optional<std::uint64_t> first_failure;
};

/// Re T^k >= 0 for every k in [lo, hi] and every 2^j >= lo with j <= the
/// dyadic bound. A conjunction over a finite part of an infinite family.
FamilyResult accretive_family(PowerCache& cache, std::uint64_t lo, std::uint64_t hi, const ToleranceContext& ctx) {
    FamilyResult out;
    out.membership.holds = true;
    out.membership.threshold = ctx.unit_tau();
    auto visit = [&](std::uint64_t k) {
        const Membership m = cache.accretive(k);
        out.membership.residual = std::max(out.membership.residual, m.residual);
        if (!m.holds && out.membership.holds) {
            out.membership.holds = false;
            out.first_failure = k;
        }
    };
    for (std::uint64_t k = lo; k <= hi; ++k) visit(k);
    for (int j = 0; j <= cache.bound(); ++j) {
        const std::uint64_t k = std::uint64_t{1} << j;
        if (k > hi) visit(k);
    }
    return out;
}

Predicate dyadic_levels(PowerCache& cache, int through, bool truncated) {
    Predicate p{"re_dyadic_powers_psd", true, 0.0, truncated};
    for (int j = 0; j <= through; ++j) {
        const Membership m = cache.accretive(PowerCache::dyadic(j));
        p.residual = std::max(p.residual, m.residual);
        p.holds = p.holds && m.holds;
    }
    return p;
}

Predicate powers_normal(PowerCache& cache, int k_max) {
    Predicate p{"powers_normal", true, 0.0, true};
    for (int n = 2; n <= k_max; ++n) {
        const Membership m = cache.normal(static_cast<std::uint64_t>(n));
        p.residual = std::max(p.residual, m.residual);
        p.holds = p.holds && m.holds;
    }
    return p;
}

Predicate halfplane(const ScaledPower& power, std::string name, const ToleranceContext& ctx,
                    TheoremVerdict& v) {
    if (power.negligible) return {std::move(name), true, 0.0, false};
    const HalfPlaneWitness best = best_rotation(power.unit, ctx);
    const bool holds = best.min_eig >= -ctx.unit_tau();
    if (holds) v.witness["theta"] = best.theta;
    return {std::move(name), holds, std::max(0.0, -best.min_eig), false};
}

Predicate combine(std::string name, std::initializer_list<Predicate> parts) {
    Predicate p{std::move(name), true, 0.0, false};
    for (const auto& part : parts) {
        p.holds = p.holds && part.holds;
        p.residual = std::max(p.residual, part.residual);
        p.truncated = p.truncated || part.truncated;
    }
    return p;
}

void require_k(const TheoremParams& params) {
    if (params.k < 1) throw OperatorError(ErrorCode::BadParams, "k must be >= 1");
}

void require_k_max(const TheoremParams& params) {
    if (params.k_max < 2) throw OperatorError(ErrorCode::BadParams, "k_max must be >= 2");
}

struct Inputs {
    const ComplexMatrix& t;
    const TheoremParams& params;
    const ToleranceContext& ctx;
    PowerCache& cache;
};

using Verifier = std::function<void(Inputs&, TheoremVerdict&)>;

std::uint64_t odd_exponent(const TheoremParams& params) { return 2 * static_cast<std::uint64_t>(params.k) + 1; }

Predicate square_normal(Inputs& in) { return from_membership("square_normal", in.cache.normal(2)); }

Predicate odd_power_accretive(Inputs& in, TheoremVerdict& v) {
    v.witness["odd_exponent"] = static_cast<double>(odd_exponent(in.params));
    return from_membership("re_odd_power_psd", in.cache.accretive(odd_exponent(in.params)));
}

Predicate odd_power_halfplane(Inputs& in, TheoremVerdict& v) {
    v.witness["odd_exponent"] = static_cast<double>(odd_exponent(in.params));
    return halfplane(in.cache.power(odd_exponent(in.params)), "odd_power_halfplane", in.ctx, v);
}

Predicate ascent(Inputs& in) { return flag("ascent_le_1", in.cache.ascent_le_1()); }

Predicate normal(Inputs& in) { return from_membership("normal", normal_membership(in.t, in.ctx)); }

Predicate positive(Inputs& in) { return from_membership("psd", psd_membership(in.t, in.ctx)); }

BezoutPair coprime_pair(const TheoremParams& params, TheoremVerdict& v) {
    const BezoutPair bz = bezout(params.p, params.q);
    v.witness["p"] = static_cast<double>(bz.p);
    v.witness["q"] = static_cast<double>(bz.q);
    v.witness["bezout_k"] = static_cast<double>(bz.k);
    v.witness["bezout_l"] = static_cast<double>(bz.l);
    v.witness["bezout_n"] = static_cast<double>(bz.n);
    return bz;
}

const std::vector<std::pair<std::string, Verifier>>& verifiers() {
    static const std::vector<std::pair<std::string, Verifier>> table = {
        {"square_normal_odd_accretive_powers_normal",
         [](Inputs& in, TheoremVerdict& v) {
             require_k(in.params);
             require_k_max(in.params);
             v.hypotheses = {square_normal(in), odd_power_accretive(in, v)};
             v.conclusion = powers_normal(in.cache, in.params.k_max);
         }},
        {"square_normal_odd_accretive_injective_normal",
         [](Inputs& in, TheoremVerdict& v) {
             require_k(in.params);
             v.hypotheses = {square_normal(in), odd_power_accretive(in, v),
                             flag("injective", is_injective(in.t, in.ctx))};
             v.conclusion = normal(in);
         }},
        {"square_normal_odd_halfplane",
         [](Inputs& in, TheoremVerdict& v) {
             require_k(in.params);
             require_k_max(in.params);
             v.hypotheses = {square_normal(in), odd_power_halfplane(in, v)};
             // Powers from 2 on are normal, and T itself when it is injective.
             const Predicate injective = flag("injective", is_injective(in.t, in.ctx));
             Predicate injective_normal = normal(in);
             if (!injective.holds) injective_normal = {"normal", true, 0.0, false};
             v.conclusion = combine("powers_normal_and_normal_if_injective",
                                    {powers_normal(in.cache, in.params.k_max), injective_normal});
         }},
        {"square_normal_odd_halfplane_ascent_normal",
         [](Inputs& in, TheoremVerdict& v) {
             require_k(in.params);
             v.hypotheses = {square_normal(in), odd_power_halfplane(in, v), ascent(in)};
             v.conclusion = normal(in);
         }},
        {"halfplane_square_normal",
         [](Inputs& in, TheoremVerdict& v) {
             const HalfPlaneWitness best = best_rotation(in.t, in.ctx);
             const bool holds = best.min_eig >= -in.ctx.tau(in.t);
             if (holds) v.witness["theta"] = best.theta;
             v.hypotheses = {{"halfplane", holds, std::max(0.0, -best.min_eig), false}, square_normal(in)};
             v.conclusion = normal(in);
         }},
        {"square_normal_odd_accretive_ascent_normal",
         [](Inputs& in, TheoremVerdict& v) {
             require_k(in.params);
             v.hypotheses = {square_normal(in), odd_power_accretive(in, v), ascent(in)};
             v.conclusion = normal(in);
         }},
        {"square_psd_odd_accretive_ascent_psd",
         [](Inputs& in, TheoremVerdict& v) {
             require_k(in.params);
             v.hypotheses = {from_membership("square_psd", in.cache.psd(2)),
                             odd_power_accretive(in, v), ascent(in)};
             v.conclusion = positive(in);
         }},
        {"coprime_powers_normal",
         [](Inputs& in, TheoremVerdict& v) {
             const BezoutPair bz = coprime_pair(in.params, v);
             v.hypotheses = {ascent(in),
                             from_membership("p_power_normal", in.cache.normal(bz.p)),
                             from_membership("q_power_normal", in.cache.normal(bz.q))};
             v.conclusion = normal(in);
             const PowerPairNormality pair = power_pair_normality(in.t, in.params.p, in.params.q, in.ctx);
             v.witness["factorisation_residual"] = pair.factorisation_residual;
             v.details.push_back("T^n and T^(n+1) normal: " + std::string(pair.tn_normal ? "yes" : "no") + ", " +
                                 (pair.tn1_normal ? "yes" : "no"));
         }},
        {"normal_coprime_powers",
         [](Inputs& in, TheoremVerdict& v) {
             const BezoutPair bz = coprime_pair(in.params, v);
             v.hypotheses = {normal(in)};
             v.conclusion = combine(
                 "ascent_and_powers_normal",
                 {ascent(in), from_membership("p_power_normal", in.cache.normal(bz.p)),
                  from_membership("q_power_normal", in.cache.normal(bz.q))});
         }},
        {"coprime_powers_psd",
         [](Inputs& in, TheoremVerdict& v) {
             const BezoutPair bz = coprime_pair(in.params, v);
             v.hypotheses = {ascent(in), from_membership("p_power_psd", in.cache.psd(bz.p)),
                             from_membership("q_power_psd", in.cache.psd(bz.q))};
             v.conclusion = positive(in);
         }},
        {"dyadic_accretive_psd",
         [](Inputs& in, TheoremVerdict& v) {
             v.witness["dyadic_levels"] = in.cache.bound();
             v.hypotheses = {dyadic_levels(in.cache, in.cache.bound(), true)};
             v.conclusion = positive(in);
         }},
        {"all_powers_accretive_psd",
         [](Inputs& in, TheoremVerdict& v) {
             require_k_max(in.params);
             const FamilyResult f =
                 accretive_family(in.cache, 1, static_cast<std::uint64_t>(in.params.k_max), in.ctx);
             if (f.first_failure) v.witness["failing_exponent"] = static_cast<double>(*f.first_failure);
             v.hypotheses = {from_membership("re_powers_psd", f.membership, true)};
             v.conclusion = positive(in);
         }},
        {"tail_powers_accretive_psd",
         [](Inputs& in, TheoremVerdict& v) {
             require_k_max(in.params);
             if (in.params.k0 < 1) throw OperatorError(ErrorCode::BadParams, "k0 must be >= 1");
             const auto lo = static_cast<std::uint64_t>(in.params.k0);
             const FamilyResult f =
                 accretive_family(in.cache, lo, lo + static_cast<std::uint64_t>(in.params.k_max), in.ctx);
             if (f.first_failure) v.witness["failing_exponent"] = static_cast<double>(*f.first_failure);
             v.hypotheses = {ascent(in), from_membership("re_tail_powers_psd", f.membership, true)};
             v.conclusion = positive(in);
         }},
        {"dyadic_sector",
         [](Inputs& in, TheoremVerdict& v) {
             if (in.params.n < 0 || in.params.n > kMaxDyadicLevel - 1) {
                 throw OperatorError(ErrorCode::BadParams, "n must lie in [0, 61]");
             }
             const double alpha = kPi / std::ldexp(1.0, in.params.n + 1);
             const double phi = kPi / 2.0 - alpha;
             const double worst = std::min(rotated_min_eig(in.t, phi), rotated_min_eig(in.t, -phi));
             v.witness["alpha"] = alpha;
             v.hypotheses = {dyadic_levels(in.cache, in.params.n, false)};
             v.conclusion = {"sector", worst >= -in.ctx.tau(in.t), std::max(0.0, -worst), false};
         }},
        {"positivity_equivalences",
         [](Inputs& in, TheoremVerdict& v) {
             const EquivalenceResult r = equivalence_suite(in.t, in.ctx, in.params.k_max, in.params.k0);
             const bool any = std::any_of(r.conditions.begin(), r.conditions.end(), [](bool b) { return b; });
             const bool all = std::all_of(r.conditions.begin(), r.conditions.end(), [](bool b) { return b; });
             v.hypotheses = {{"some_condition", any, 0.0, true}};
             v.conclusion = {"all_conditions", all, 0.0, true};
             for (std::size_t i = 0; i < r.conditions.size(); ++i) {
                 v.details.push_back(r.names[i] + ": " + (r.conditions[i] ? "true" : "false"));
             }
             v.witness = r.witness;
         }},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& theorem_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto& entry : verifiers()) out.push_back(entry.first);
        return out;
    }();
    return ids;
}

TheoremVerdict verify_theorem(const std::string& id, const ComplexMatrix& t, const TheoremParams& params,
                              const ToleranceContext& ctx) {
    const auto& table = verifiers();
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == id; });
    if (it == table.end()) throw OperatorError(ErrorCode::UnknownTheorem, "no result named '" + id + "'");
    validate_matrix(t);
    PowerCache cache(t, ctx);
    Inputs in{t, params, ctx, cache};
    TheoremVerdict v;
    v.id = id;
    it->second(in, v);
    v.consistent = !(v.hypotheses_hold() && !v.conclusion.holds);
    return v;
}

EquivalenceResult equivalence_suite(const ComplexMatrix& t, const ToleranceContext& ctx, int k_max, int k0) {
    validate_matrix(t);
    if (k_max < 8) throw OperatorError(ErrorCode::BadParams, "k_max must be >= 8");
    if (k0 < 1) throw OperatorError(ErrorCode::BadParams, "k0 must be >= 1");
    PowerCache cache(t, ctx);
    EquivalenceResult r;
    r.k_max = k_max;
    r.k0 = k0;
    r.dyadic_levels = cache.bound();
    r.names = {"psd",
               "square_psd_and_accretive",
               "ascent_square_psd_and_odd_power_accretive",
               "ascent_and_coprime_powers_psd",
               "dyadic_powers_accretive",
               "all_powers_accretive",
               "ascent_and_tail_powers_accretive"};
    const auto km = static_cast<std::uint64_t>(k_max);
    const bool asc = cache.ascent_le_1();
    const bool square_psd = cache.psd(2).holds;

    r.conditions[0] = is_psd(t, ctx);
    r.conditions[1] = square_psd && is_accretive(t, ctx);

    bool odd = false;
    for (std::uint64_t k = 1; k <= km && !odd; ++k) {
        if (cache.accretive(2 * k + 1).holds) {
            odd = true;
            r.witness["odd_k"] = static_cast<double>(k);
        }
    }
    r.conditions[2] = asc && square_psd && odd;

    bool coprime = false;
    if (asc) {
        std::vector<bool> psd_power(km + 1, false);
        for (std::uint64_t m = 2; m <= km; ++m) psd_power[m] = cache.psd(m).holds;
        for (std::uint64_t p = 2; p <= km && !coprime; ++p) {
            for (std::uint64_t q = p + 1; q <= km && !coprime; ++q) {
                if (psd_power[p] && psd_power[q] && gcd(static_cast<std::int64_t>(p), static_cast<std::int64_t>(q)) == 1) {
                    coprime = true;
                    r.witness["p"] = static_cast<double>(p);
                    r.witness["q"] = static_cast<double>(q);
                }
            }
        }
    }
    r.conditions[3] = coprime;

    const PositivityCertificate cert = positivity_certificate(t, ctx);
    r.conditions[4] = cert.kind != CertificateKind::violation;
    if (cert.violation_k) r.witness["dyadic_violation"] = *cert.violation_k;

    const FamilyResult all = accretive_family(cache, 1, km, ctx);
    r.conditions[5] = all.membership.holds;
    if (all.first_failure) r.witness["all_powers_failure"] = static_cast<double>(*all.first_failure);

    const auto lo = static_cast<std::uint64_t>(k0);
    const FamilyResult tail = accretive_family(cache, lo, lo + km, ctx);
    r.conditions[6] = asc && tail.membership.holds;
    if (tail.first_failure) r.witness["tail_failure"] = static_cast<double>(*tail.first_failure);

    r.agreement = std::all_of(r.conditions.begin(), r.conditions.end(), [&](bool b) { return b == r.conditions[0]; });
    return r;
}

bool evaluate_fact(const ComplexMatrix& t, const std::string& fact, const ToleranceContext& ctx) {
    validate_matrix(t);
    const auto colon = fact.find(':');
    const std::string name = fact.substr(0, colon);
    std::uint64_t arg = 0;
    if (colon != std::string::npos) {
        try {
            arg = std::stoull(fact.substr(colon + 1));
        } catch (const std::exception&) {
            throw OperatorError(ErrorCode::BadParams, "bad fact argument in '" + fact + "'");
        }
    }
    if (name == "psd") return is_psd(t, ctx);
    if (name == "normal") return is_normal(t, ctx);
    if (name == "accretive") return is_accretive(t, ctx);
    if (name == "power_psd") return PowerFamily(t, ctx).psd(arg).holds;
    if (name == "power_normal") return PowerFamily(t, ctx).normal(arg).holds;
    if (name == "re_power_psd") return PowerFamily(t, ctx).accretive(arg).holds;
    if (name == "ascent") return indices(t, ctx).ascent == static_cast<int>(arg);
    if (name == "zero_interior_numrange") {
        // 0 is interior iff every support value is positive.
        double lowest = std::numeric_limits<double>::infinity();
        for (int j = 0; j < ctx.angle_grid; ++j) {
            lowest = std::min(lowest, support(t, 2.0 * kPi * j / ctx.angle_grid, ctx));
        }
        return lowest > ctx.tau(t);
    }
    if (name == "equivalent_conditions") {
        const EquivalenceResult r = equivalence_suite(t, ctx);
        return std::all_of(r.conditions.begin(), r.conditions.end(), [](bool b) { return b; });
    }
    throw OperatorError(ErrorCode::BadParams, "unknown fact '" + fact + "'");
}

// ---- open question search ------------------------------------------------

FuzzScore score_specimen(const ComplexMatrix& t, int p, int q, const ToleranceContext& ctx) {
    validate_matrix(t);
    FuzzScore s;
    s.asc_penalty = asc_le_1(t, ctx) ? 0.0 : 1.0;
    PowerFamily family(t, ctx);
    const Membership pn = family.normal(static_cast<std::uint64_t>(p));
    const Membership rq = family.accretive(static_cast<std::uint64_t>(q));
    const Membership nt = normal_membership(t, ctx);
    s.power_normal_residual = pn.residual;
    s.re_power_negative = rq.residual;
    s.normal_residual = nt.residual;
    s.score = s.asc_penalty + pn.residual + rq.residual;
    s.hypotheses_hold = s.asc_penalty == 0.0 && pn.holds && rq.holds;
    s.candidate = s.hypotheses_hold && nt.residual > 100.0 * nt.threshold;
    return s;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

std::string format(const char* fmt, auto... args) {
    const int size = std::snprintf(nullptr, 0, fmt, args...);
    std::string out(static_cast<std::size_t>(size) + 1, '\0');
    std::snprintf(out.data(), out.size(), fmt, args...);
    out.pop_back();
    return out;
}

std::string inline_matrix(const ComplexMatrix& m) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out += i == 0 ? "[" : ",[";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out += format(j == 0 ? "[%.17g,%.17g]" : ",[%.17g,%.17g]", m(i, j).real(), m(i, j).imag());
        }
        out += "]";
    }
    return out + "]";
}

}  // namespace

FuzzResult question_fuzzer(int p, int q, int dim, int trials, std::uint64_t seed, const ToleranceContext& ctx) {
    (void)bezout(p, q);  // BadParams / NotCoprime
    if (trials < 0) throw OperatorError(ErrorCode::BadParams, "trials must be >= 0");
    FuzzResult result;
    result.trials = trials;

    struct Specimen {
        int trial;
        FuzzScore score;
    };
    std::vector<Specimen> specimens;
    specimens.reserve(static_cast<std::size_t>(trials));
    result.log.push_back(format("fuzz p=%d q=%d dim=%d trials=%d seed=%" PRIu64 " atol=%.17g rtol=%.17g", p, q, dim,
                                trials, seed, ctx.atol, ctx.rtol));
    for (int i = 0; i < trials; ++i) {
        GenSpec spec;
        spec.cls = GenClass::near_hypothesis;
        spec.dim = dim;
        spec.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
        spec.p = p;
        spec.q = q;
        const ComplexMatrix t = generate(spec);
        const FuzzScore s = score_specimen(t, p, q, ctx);
        std::string line = format("trial=%d seed=%" PRIu64 " asc=%.17g pnormal=%.17g reneg=%.17g score=%.17g normal=%.17g",
                                  i, spec.seed, s.asc_penalty, s.power_normal_residual, s.re_power_negative, s.score,
                                  s.normal_residual);
        if (s.candidate) {
            ++result.candidates;
            line += " CANDIDATE matrix=" + inline_matrix(t);
        }
        result.log.push_back(std::move(line));
        specimens.push_back({i, s});
    }

    // Best specimens: closest to the hypotheses, then least normal.
    std::stable_sort(specimens.begin(), specimens.end(), [](const Specimen& a, const Specimen& b) {
        if (a.score.score != b.score.score) return a.score.score < b.score.score;
        return a.score.normal_residual > b.score.normal_residual;
    });
    const std::size_t shown = std::min<std::size_t>(5, specimens.size());
    for (std::size_t r = 0; r < shown; ++r) {
        const auto& sp = specimens[r];
        result.log.push_back(format("best rank=%zu trial=%d score=%.17g normal=%.17g", r + 1, sp.trial, sp.score.score,
                                    sp.score.normal_residual));
    }
    result.log.push_back(format("summary trials=%d candidates=%d", trials, result.candidates));
    return result;
}

}  // namespace oplens

#include "oplens/cli/report.hpp"

#include <cmath>
#include <string>

namespace oplens::cli {

namespace {

/// JSON has no inf or nan; they are written as strings rather than null.
Json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

Json to_json(const HalfPlaneWitness& w) { return {{"theta", number(w.theta)}, {"min_eig", number(w.min_eig)}}; }

Json to_json(const SectorCertificate& s) {
    return {{"alpha", number(s.alpha)}, {"upper", to_json(s.upper)}, {"lower", to_json(s.lower)}};
}

Json to_json(const Predicate& p) {
    return {{"name", p.name}, {"holds", p.holds}, {"residual", number(p.residual)}, {"truncated", p.truncated}};
}

Json to_json(const std::map<std::string, double>& m) {
    Json out = Json::object();
    for (const auto& [key, value] : m) out[key] = number(value);
    return out;
}

}  // namespace

Json to_json(const ToleranceContext& ctx) {
    return {{"atol", ctx.atol},
            {"rtol", ctx.rtol},
            {"angle_grid", ctx.angle_grid},
            {"max_power", ctx.max_power},
            {"max_refine", ctx.max_refine}};
}

Json report_header(const std::string& command, const ToleranceContext& ctx) {
    return {{"tool", "oplens"}, {"version", OPLENS_VERSION}, {"command", command}, {"tolerance", to_json(ctx)}};
}

Json to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({number(m(i, j).real()), number(m(i, j).imag())});
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const ComplexVector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({number(v(i).real()), number(v(i).imag())});
    return out;
}

Json to_json(const ClassificationReport& r) {
    Json classes = Json::object();
    for (OperatorClass c : kAllClasses) {
        classes[std::string(to_string(c))] = {{"holds", r.flags.at(c)},
                                              {"residual", number(r.residuals.at(c))},
                                              {"threshold", number(r.thresholds.at(c))}};
    }
    return classes;
}

Json to_json(const PositivityCertificate& c) {
    Json out = {{"kind", to_string(c.kind)}, {"checked_k", c.checked_k}};
    out["sector"] = c.sector ? to_json(*c.sector) : Json(nullptr);
    out["violation_k"] = c.violation_k ? Json(*c.violation_k) : Json(nullptr);
    out["violation_direction"] = c.violation_direction ? to_json(*c.violation_direction) : Json(nullptr);
    if (c.violation_k) out["witness_value"] = number(c.witness_value);
    Json profile = Json::array();
    for (const auto& e : c.profile) {
        profile.push_back({{"k", e.k},
                           {"min_eig", number(e.min_eig)},
                           {"unit_min_eig", number(e.unit_min_eig)},
                           {"accretive", e.accretive}});
    }
    out["profile"] = std::move(profile);
    return out;
}

Json to_json(const CanonicalSqrtDecomposition& d, const CanonicalFormReport& checks) {
    Json out = {{"a_dim", d.a_dim}, {"b_dim", d.b_dim}, {"residual", number(d.residual)},
                {"u", to_json(d.u)},  {"a", to_json(d.a)},  {"b", to_json(d.b)},
                {"c", to_json(d.c)}};
    Json list = Json::array();
    for (const auto& c : checks.checks) {
        list.push_back({{"name", c.name}, {"value", number(c.value)}, {"threshold", number(c.threshold)}, {"ok", c.ok}});
    }
    out["checks"] = std::move(list);
    out["passes"] = checks.passes();
    return out;
}

Json to_json(const TheoremVerdict& v, const TheoremParams& params) {
    Json hyps = Json::array();
    for (const auto& h : v.hypotheses) hyps.push_back(to_json(h));
    return {{"id", v.id},
            {"hypotheses", std::move(hyps)},
            {"conclusion", to_json(v.conclusion)},
            {"consistent", v.consistent},
            {"witness", to_json(v.witness)},
            {"details", v.details},
            {"params",
             {{"k", params.k}, {"p", params.p}, {"q", params.q}, {"k0", params.k0}, {"n", params.n},
              {"k_max", params.k_max}}}};
}

Json to_json(const EquivalenceResult& r) {
    Json conditions = Json::object();
    for (std::size_t i = 0; i < r.conditions.size(); ++i) conditions[r.names[i]] = r.conditions[i];
    return {{"conditions", std::move(conditions)},
            {"agreement", r.agreement},
            {"witness", to_json(r.witness)},
            {"k_max", r.k_max},
            {"k0", r.k0},
            {"dyadic_levels", r.dyadic_levels}};
}

}  // namespace oplens::cli

#pragma once

// JSON renderings of the library results. Objects keep their keys sorted,
// so a report is byte-stable for fixed input and flags.

#include "json.hpp"

#include "oplens/classifiers.hpp"
#include "oplens/decompose.hpp"
#include "oplens/theorems.hpp"

namespace oplens::cli {

using Json = nlohmann::json;

[[nodiscard]] Json report_header(const std::string& command, const ToleranceContext& ctx);
[[nodiscard]] Json to_json(const ToleranceContext& ctx);
[[nodiscard]] Json to_json(const ComplexMatrix& m);
[[nodiscard]] Json to_json(const ComplexVector& v);
[[nodiscard]] Json to_json(const ClassificationReport& r);
[[nodiscard]] Json to_json(const PositivityCertificate& c);
[[nodiscard]] Json to_json(const CanonicalSqrtDecomposition& d, const CanonicalFormReport& checks);
[[nodiscard]] Json to_json(const TheoremVerdict& v, const TheoremParams& params);
[[nodiscard]] Json to_json(const EquivalenceResult& r);

}  // namespace oplens::cli

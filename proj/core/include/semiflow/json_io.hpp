#pragma once

#include "semiflow/analytic.hpp"
#include "semiflow/blaschke.hpp"
#include "semiflow/cocycle.hpp"
#include "semiflow/conformal.hpp"
#include "semiflow/flow.hpp"
#include "semiflow/norms.hpp"

#include <nlohmann/json.hpp>

namespace semiflow {

using json = nlohmann::json;

// Every *_from_json throws ConfigError on schema violations.

/// A number or [re, im].
cplx complex_from_json(const json& j);
json complex_to_json(cplx z);

/// Expression trees: {"op": "poly", "coeffs": [...]}, {"op": "exp", "arg": {...}}, ...
AnalyticFn analytic_from_json(const json& j);
json analytic_to_json(const AnalyticFn& f);

/// {"radii": [...], "angular": [...] or n, "points": [[re, im], ...]}
GridSpec grid_from_json(const json& j);
json grid_to_json(const GridSpec& g);

/// {"type": "identity" | "cayley" | "mobius" | "newton" | "closed", ...}
ConformalMap map_from_json(const json& j);

/// {"type": "ode" | "koenigs" | "automorphism", ...}
FlowModel flow_from_json(const json& j);

/// {"type": "weight", "g": ...} | {"type": "coboundary", "alpha": ..., "fixed_point": ...} | {"type": "none"}
WeightSpec weight_from_json(const json& j);

/// {"zeros": [...], "theta": x} or {"dyadic": N, "theta": x}
BlaschkeProduct blaschke_from_json(const json& j);
json blaschke_to_json(const BlaschkeProduct& B);

json gpv_report_to_json(const GpvReport& r);

}  // namespace semiflow

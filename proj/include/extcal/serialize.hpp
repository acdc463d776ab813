#pragma once

#include <json.hpp>

#include "extcal/errors.hpp"
#include "extcal/fields.hpp"
#include "extcal/chains.hpp"
#include "extcal/forms.hpp"
#include "extcal/report.hpp"

namespace extcal {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Polynomial wire format: {"nvars": n, "terms": [{"exps":[...], "num": i, "den": i}]}
ordered_json poly_to_json(const PolyField& p);
PolyField poly_from_json(const json& j);

// Form wire format: {"dim": n, "grade": r, "terms": [{"indices":[...], "coeff": <poly>}]}
ordered_json form_to_json(const FieldForm& f);
FieldForm form_from_json(const json& j);

// Map wire format: {"domain_dim": n, "components": [<poly>, ...]}
ordered_json map_to_json(const SmoothMap& m);
SmoothMap map_from_json(const json& j);

// Chain wire format: {"r": r, "target_dim": n, "terms": [{"weight": w, "map": <map>}]}
ordered_json chain_to_json(const struct Chain& c);
struct Chain chain_from_json(const json& j);

ordered_json report_to_json(const VerificationReport& rep);

// Writes text to path atomically (temp file in the same directory + rename).
void atomic_write(const std::string& path, const std::string& text);

// Full-precision decimal float for CSV cells.
std::string format_double(double v);

} // namespace extcal

#pragma once

#include <json.hpp>

#include "parabolic/evolution.hpp"
#include "parabolic/potential_field.hpp"
#include "parabolic/spectral_analysis.hpp"

namespace parabolic {

// JSON views of the analysis results. Non-finite numbers become null.
nlohmann::json to_json(const ClassificationReport& r);
nlohmann::json to_json(const Prediction& p);
nlohmann::json to_json(const DetectionReport& d);
nlohmann::json to_json(const SpectrumReport& s);
nlohmann::json to_json(const VerifyReport& v);

nlohmann::json complex_to_json(Complex z);

}  // namespace parabolic

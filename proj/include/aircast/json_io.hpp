#pragma once

// JSON conversions for the value types that appear in CLI output, sidecar
// files, model headers and the bench manifest.

#include "aircast/additive.hpp"
#include "aircast/arima.hpp"
#include "aircast/dataset.hpp"
#include "aircast/metrics.hpp"
#include "aircast/neural.hpp"
#include "aircast/stationarity.hpp"

#include "json.hpp"

namespace aircast {
using Json = nlohmann::ordered_json;
}

namespace aircast::dataset {
void to_json(Json& j, const ScalerState& s);
void from_json(const Json& j, ScalerState& s);
void to_json(Json& j, const WindEncoding& w);
void from_json(const Json& j, WindEncoding& w);
}

namespace aircast::neural {
void to_json(Json& j, const NetworkSpec& s);
void from_json(const Json& j, NetworkSpec& s);
}

namespace aircast::additive {
void to_json(Json& j, const AdditiveConfig& c);
/// Missing keys keep their defaults, so a grid file may list only overrides.
void from_json(const Json& j, AdditiveConfig& c);
void to_json(Json& j, const AdditiveFit& f);
}

namespace aircast::metrics {
void to_json(Json& j, const MetricRow& m);
}

namespace aircast::stationarity {
void to_json(Json& j, const AdfResult& r);
}

namespace aircast::arima {
void to_json(Json& j, const ArimaSpec& s);
void to_json(Json& j, const ArimaFit& f);
}

namespace aircast {
void to_json(Json& j, const ForecastResult& f);
}

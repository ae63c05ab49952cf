#pragma once

#include "twinrecover/metrics.hpp"
#include "twinrecover/recoverability.hpp"

#include <json.hpp>

namespace twinrec {

nlohmann::json to_json(const NodeSet& s);
nlohmann::json to_json(const DsepCheck& c);
nlohmann::json to_json(const RcNode& n);
nlohmann::json to_json(const FormulaPlan& p);
nlohmann::json to_json(const ErrorReport& r);

/// The verdict document validated by schemas/verdict.schema.json.
nlohmann::json verdict_json(const RecoverabilityVerdict& v, std::string_view x, std::string_view y,
                            const DataRegime& regime, const DecideOptions& opts);

std::string_view verdict_kind(const RecoverabilityVerdict& v);

}  // namespace twinrec

#pragma once

#include <string>

#include "covpart/general.hpp"
#include "covpart/partition.hpp"
#include "covpart/pinning.hpp"

namespace covpart {

/// {"labels":[...], "k_budget":k}
std::string to_json(const Partition& part);
Partition partition_from_json(const std::string& text);

/// Loss report with matrices as row-major nested arrays.
std::string to_json(const CovarianceReport& report);

/// The pinning-specific report fields: t, S, attempts, accepted, threshold.
std::string to_json(const PinningResult& result);

/// Per-stage counts and audit values of a general-clusterer run.
std::string to_json(const GeneralDiagnostics& diag);

}  // namespace covpart

#pragma once

#include <iosfwd>
#include <vector>

#include "fbgather/analytics.hpp"
#include "fbgather/experiments.hpp"

namespace fbgather {

/// MSE vs normalized power for one dp_u: FB and NF curves, one marker per T_b.
void write_sweep_svg(std::ostream& out, const SweepResult& result, double uplink_power);

/// Theory as shaded cells over (x, y), empirical verdicts as dots when present.
void write_region_svg(std::ostream& out, const std::vector<AdvantagePoint>& points);

}  // namespace fbgather

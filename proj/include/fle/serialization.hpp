#pragma once

#include "fle/blowup_lab.hpp"
#include "fle/nonlinear_solver.hpp"
#include "fle/params.hpp"
#include "fle/phi.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace fle {

/// Insertion-ordered JSON: keys appear in the order written here, so output
/// is stable across runs.
using Json = nlohmann::ordered_json;

Json to_json(const PhysicalParams& params);
Json to_json(const ModelDomain& domain);
Json to_json(const SharpConstants& consts);
/// Metadata only; the field goes to CSV.
Json to_json(const SolveResult& result);
Json to_json(const PeakDecomposition& peaks);
Json to_json(const SweepEntry& entry);
Json to_json(const SweepRecord& sweep);
Json to_json(const PhiCriticalResult& result);

/// Two-space indented dump with a trailing newline.  Non-finite numbers
/// become null.
std::string dump(const Json& j);

/// Header "x,u" (1D) or "x,y,u" (2D), one row per node, 17 significant digits.
void write_field_csv(std::ostream& out, const GridField& u);

/// eps,max_u,lambda_1,x_1,residual_fraction,rate,con2_residual
void write_sweep_csv(std::ostream& out, const SweepRecord& sweep);

/// Formats with 17 significant digits.
std::string format_double(double v);

} // namespace fle

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "madelab/types.hpp"

namespace madelab::bohm {
struct EnsembleRun;
}

namespace madelab::csv {

// All numbers go out as %.17g: enough digits to round-trip doubles exactly,
// so identical runs produce identical bytes.
std::string format_double(double v);

// Field snapshot: "# time=<t> dim=<d> units=natural" then
// x1[,x2[,x3]],rho,S,Q rows in node order. Masked Q entries print as nan.
void write_field(const std::filesystem::path& path, const MadelungFields& fields,
                 const std::vector<double>& quantum_potential);

// Trajectory ensemble: header time,p<i>_x<a>...; one row per recorded time.
void write_trajectories(const std::filesystem::path& path, const bohm::EnsembleRun& run,
                        int dim);

} // namespace madelab::csv

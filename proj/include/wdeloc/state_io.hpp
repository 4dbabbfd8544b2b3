#pragma once

#include <iosfwd>
#include <string>

#include "wdeloc/density_matrix.hpp"

namespace wdeloc {

// State file format: {"dim": n, "re": [...], "im": [...]} with row-major
// n^2 arrays.  The loader applies full DensityMatrix validation.

DensityMatrix load_state(std::istream& in);
DensityMatrix load_state_file(const std::string& path);

void save_state(const DensityMatrix& rho, std::ostream& out);
void save_state_file(const DensityMatrix& rho, const std::string& path);

}  // namespace wdeloc

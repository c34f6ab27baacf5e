#pragma once

#include <filesystem>
#include <iosfwd>

#include "lpc/lpc_core.hpp"

namespace lpc {

// Text format, version 1:
//
//   lpc-classifier 1
//   <p> <squared|bce>
//   w_0
//   ...
//   w_{p-1}
//   gamma
//   rho_plus
//   rho_minus
//
// Every number is written with 17 significant digits so a round trip is exact.

void write_classifier(std::ostream& out, const Classifier<double>& c);
Classifier<double> read_classifier(std::istream& in);

void save_classifier(const std::filesystem::path& path, const Classifier<double>& c);
Classifier<double> load_classifier(const std::filesystem::path& path);

} // namespace lpc

#pragma once

// File emitters: binary pixmap rasters of label fields, CSV round-trip for
// label fields, trajectory and weight CSV exports.

#include <array>
#include <cstdint>
#include <string>

#include "sdfm/config.hpp"
#include "sdfm/flow.hpp"
#include "sdfm/ot.hpp"

namespace sdfm {

// Fixed 16-entry label palette (RGB). Label k uses palette[(k-1) % 16];
// UNRESOLVED renders white.
extern const std::array<std::array<std::uint8_t, 3>, 16> LABEL_PALETTE;

// Writes a binary pixmap (P6, maxval 255), one pixel per grid node, row-major
// from the lo corner. Throws IoError.
void emit_raster(const LabelField& field, const std::string& path);

// Lossless CSV round-trip for a LabelField (header carries grid/producer).
void label_field_to_csv(const LabelField& field, const std::string& path);
LabelField label_field_from_csv(const std::string& path);

// Trajectory CSV with header "t,x0,...,x{d-1},captured"; the captured column
// is 0 before capture and the capturing label afterwards.
void trajectory_to_csv(const Trajectory& traj, const std::string& path);

// Laguerre weights CSV: "k,psi_k,mass_k".
void weights_to_csv(const LaguerreWeights& w, const std::string& path);

// Center-curve CSV: "k,t,x0,...,x{d-1}" rows for each sample plus a final
// "k,limit,..." row.
void center_curves_to_csv(const std::vector<CenterCurve>& curves, const std::string& path);

} // namespace sdfm

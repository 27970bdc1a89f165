// Deterministic LP and MPS writers. Output depends only on the model
// (no timestamps or environment), numbers carry 17 significant digits,
// so repeated exports are byte-identical.
#pragma once

#include <string>

#include "greenplan/milp.hpp"

namespace greenplan {

// CPLEX-style LP text. The objective constant appears as a bare term.
// Errors when a variable or row name exceeds the 255-character format limit.
std::string write_lp(const MilpModel& model);

// MPS text (ROWS/COLUMNS/RHS/BOUNDS with INTORG/INTEND markers and BV/FX
// bounds; the objective constant is carried on the RHS of the objective row).
std::string write_mps(const MilpModel& model);

// Writes text to a file; errors on I/O failure.
void write_file(const std::string& path, const std::string& text);

// FNV-1a 64-bit content checksum, as a 16-digit hex string.
std::string fnv1a64_hex(const std::string& text);

} // namespace greenplan

#pragma once

#include <iosfwd>
#include <string>

#include "causim/scm.hpp"

namespace causim {

// Plain-text model definition. See docs/model_format.md.
//
//   node x0
//     parents x4 x2
//     weights 1 -2
//     intercept 0
//     noise gaussian 0 1
//     noise_scale 0.2
//
// Only linear assignments can be written; custom ones throw InvalidModelError.
void write_model(std::ostream& out, const StructuralModel& model);
std::string format_model(const StructuralModel& model);

// Parses and validates. Throws ParseError (with line number) on malformed
// input, then any validate_model error.
StructuralModel read_model(std::istream& in);
StructuralModel parse_model(const std::string& text);

}  // namespace causim

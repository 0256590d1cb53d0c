#pragma once

#include <iosfwd>
#include <string>

#include "cbspmv/triplet.hpp"

namespace cbspmv {

/// Reads a Matrix Market coordinate file and returns it in canonical form.
///
/// Symmetric, skew-symmetric and hermitian storage is expanded to general
/// form; pattern entries get the value 1.0; duplicates are summed. Complex
/// and array files are rejected. Errors are reported as FormatError with the
/// offending line number.
TripletMatrix parse_matrix_market(std::istream& in);
TripletMatrix parse_matrix_market_string(const std::string& text);
TripletMatrix read_matrix_market_file(const std::string& path);

/// Writes `m` as `coordinate real general` with 17 significant digits.
void write_matrix_market(std::ostream& out, const TripletMatrix& m);
std::string write_matrix_market_string(const TripletMatrix& m);
void write_matrix_market_file(const std::string& path, const TripletMatrix& m);

}  // namespace cbspmv

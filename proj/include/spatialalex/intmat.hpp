// Exact integer matrix routines used by the meridian lattice construction.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

namespace salex {

using Int = boost::multiprecision::cpp_int;
using IntMat = std::vector<std::vector<Int>>;

// Rank over the rationals (fraction-free elimination).
int int_rank(IntMat a);

// Nonzero invariant factors d_1 | d_2 | ... of the Smith normal form.
std::vector<Int> smith_invariants(IntMat a);

// Solves x * rows = target over the integers, where `rows` spans a sublattice
// of Z^n. Returns false when target is not in the integer row span.
bool solve_in_rowspace(const IntMat& rows, const std::vector<Int>& target,
                       std::vector<Int>& coeffs);

}  // namespace salex

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "degtk/degree.hpp"
#include "degtk/fields.hpp"

namespace degtk {

// Real and imaginary parts of (x1 + i*x2)^m as exact integer-coefficient
// polynomials. m = 0 gives the constant field (1, 0).
PolyField power_pair(int m);

// A degree-m self-map of S^n, realized as the normalization of a polynomial
// field on R^{n+1}: an identity block on the first n-1 coordinates followed
// by the power pair in the last two. Negative m negates the first coordinate,
// except on the circle where it conjugates the power pair instead.
struct AlphaSpec {
  int n = 0;
  int m = 0;
  PolyField realized_field{1, {{}}};
};

AlphaSpec build_alpha(int n, int m);

struct DegreeTableRow {
  int n = 0;
  int m = 0;
  int degree = 0;
  std::string method;
  int mesh_level = -1;
};

// Runs the cross-checked degree engine over every alpha map with n <= n_max
// and m in [m_min, m_max]. A computed degree different from m throws
// CrossCheckError naming the offending cell.
std::vector<DegreeTableRow> degree_table(int n_max, int m_min, int m_max,
                                         const DegreeOptions& opts = {});

void write_degree_table_csv(const std::vector<DegreeTableRow>& rows, std::ostream& out);

}  // namespace degtk

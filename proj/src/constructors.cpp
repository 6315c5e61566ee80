#include "degtk/constructors.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "degtk/errors.hpp"
#include "degtk/sphere_mesh.hpp"

namespace degtk {

namespace {

std::vector<std::int64_t> binomial_row(int m) {
  std::vector<std::int64_t> row(m + 1, 1);
  for (int k = 1; k <= m; ++k) row[k] = row[k - 1] * (m - k + 1) / k;
  return row;
}

Monomial embedded(double coeff, int dim, int var_a, int e_a, int var_b, int e_b) {
  Monomial mono;
  mono.coeff = coeff;
  mono.exponents.assign(dim, 0);
  mono.exponents[var_a] = e_a;
  mono.exponents[var_b] = e_b;
  return mono;
}

// Places (P_m, Q_m) on the coordinate pair (var_a, var_b) of R^dim.
std::pair<Component, Component> power_pair_on(int m, int dim, int var_a, int var_b) {
  const auto binom = binomial_row(m);
  Component real_part;
  Component imag_part;
  for (int k = 0; k <= m; ++k) {
    const double coeff = static_cast<double>(binom[k]) * ((k / 2) % 2 == 0 ? 1.0 : -1.0);
    const Monomial mono = embedded(coeff, dim, var_a, m - k, var_b, k);
    if (k % 2 == 0) {
      real_part.push_back(mono);
    } else {
      imag_part.push_back(mono);
    }
  }
  return {real_part, imag_part};
}

constexpr double kOnlyZeroFloor = 1e-6;

}  // namespace

PolyField power_pair(int m) {
  if (m < 0) {
    throw ValidationError("power pairs take m >= 0; negative degrees are realized by "
                          "build_alpha");
  }
  if (m > 40) throw ValidationError("power pair exponent too large for exact coefficients");
  auto [real_part, imag_part] = power_pair_on(m, 2, 0, 1);
  return PolyField(2, {real_part, imag_part});
}

AlphaSpec build_alpha(int n, int m) {
  if (n < 1 || n > 3) {
    throw ValidationError("alpha maps are built for spheres S^1, S^2 and S^3");
  }
  const int mm = std::abs(m);
  if (mm > 40) throw ValidationError("power pair exponent too large for exact coefficients");
  const int dim = n + 1;

  std::vector<Component> components;
  components.reserve(dim);
  for (int i = 0; i + 2 < dim; ++i) {
    Monomial mono;
    mono.coeff = 1.0;
    mono.exponents.assign(dim, 0);
    mono.exponents[i] = 1;
    components.push_back({mono});
  }
  auto [real_part, imag_part] = power_pair_on(mm, dim, dim - 2, dim - 1);
  components.push_back(real_part);
  components.push_back(imag_part);

  if (m < 0) {
    if (n == 1) {
      for (Monomial& mono : components.back()) mono.coeff = -mono.coeff;
    } else {
      for (Monomial& mono : components.front()) mono.coeff = -mono.coeff;
    }
  }

  AlphaSpec spec;
  spec.n = n;
  spec.m = m;
  spec.realized_field = PolyField(dim, std::move(components));

  // The normalized map only makes sense if the origin is the lone zero; scan
  // the unit sphere before handing the field out.
  const auto mesh = cached_mesh(n, 3);
  const FieldEval eval = FieldEval::from(spec.realized_field);
  double min_norm = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < mesh->vertices.rows(); ++i) {
    min_norm = std::min(min_norm, eval(mesh->vertices.row(i).transpose()).norm());
  }
  if (min_norm <= kOnlyZeroFloor) {
    throw ValidationError("alpha field nearly vanishes on the unit sphere (min norm " +
                          std::to_string(min_norm) + ")");
  }
  return spec;
}

std::vector<DegreeTableRow> degree_table(int n_max, int m_min, int m_max,
                                         const DegreeOptions& opts) {
  if (n_max < 1 || n_max > 3) throw ValidationError("degree tables cover n up to 3");
  if (m_min > m_max) throw ValidationError("empty degree range");

  std::vector<DegreeTableRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    for (int m = m_min; m <= m_max; ++m) {
      const AlphaSpec alpha = build_alpha(n, m);
      const SphereMapEval map =
          SphereMapEval::origin_sphere(FieldEval::from(alpha.realized_field), 1.0);
      const DegreeReport report = degree(map, opts);
      if (report.degree != m) {
        throw CrossCheckError("degree table mismatch at (n = " + std::to_string(n) +
                              ", m = " + std::to_string(m) + "): computed " +
                              std::to_string(report.degree));
      }
      DegreeTableRow row;
      row.n = n;
      row.m = m;
      row.degree = report.degree;
      row.method = n == 1 ? "winding+pl" : "pl";
      row.mesh_level = report.mesh_level;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_degree_table_csv(const std::vector<DegreeTableRow>& rows, std::ostream& out) {
  out << "n,m,degree,method,mesh_level\n";
  for (const DegreeTableRow& row : rows) {
    out << row.n << ',' << row.m << ',' << row.degree << ',' << row.method << ','
        << row.mesh_level << '\n';
  }
}

}  // namespace degtk

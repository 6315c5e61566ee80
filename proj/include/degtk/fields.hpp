#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

#include "degtk/errors.hpp"

namespace degtk {

// One term coeff * prod_j x_j^e_j of a polynomial component.
struct Monomial {
  double coeff = 0.0;
  std::vector<int> exponents;

  bool operator==(const Monomial&) const = default;
};

using Component = std::vector<Monomial>;

std::string format_monomial(const Monomial& m);

// Polynomial vector field on R^d. Components are normalized on construction
// (equal exponent vectors merged, zero coefficients dropped, monomials sorted
// lexicographically by exponent vector), so structural equality is exact.
class PolyField {
public:
  PolyField(int dim_domain, std::vector<Component> components);

  int dim_domain() const { return dim_domain_; }
  int dim_out() const { return static_cast<int>(components_.size()); }
  const std::vector<Component>& components() const { return components_; }

  Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  bool operator==(const PolyField&) const = default;

private:
  int dim_domain_ = 0;
  std::vector<Component> components_;
};

PolyField identity_field(int dim);
PolyField constant_field(const Eigen::VectorXd& value, int dim_domain);
PolyField linear_field(const Eigen::MatrixXd& a);

// W(x, x_{n+1}) = (V_1(x), ..., V_n(x), sign * x_{n+1}) with sign in {-1, +1}.
PolyField suspend_field(const PolyField& field, int sign);

// Inverse of suspension: drops the last coordinate and component. Requires the
// last component to vanish identically on {x_last = 0}, verified symbolically
// (every monomial of the last component carries a positive x_last exponent).
PolyField restrict_field(const PolyField& field);

// Conjugation by a coordinate permutation: W = P V P^{-1} where (Px)_{perm[j]} = x_j.
// Conjugation preserves indices of zeros regardless of the permutation's parity.
PolyField permute_field(const PolyField& field, const std::vector<int>& perm);

// Type-erased evaluable mapping with a declared domain dimension. PolyFields
// supply exact Jacobians; opaque mappings fall back to central differences.
struct FieldEval {
  int dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jac;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  static FieldEval from(PolyField field);
  static FieldEval opaque(int dim, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn);
};

}  // namespace degtk

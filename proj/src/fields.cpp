#include "degtk/fields.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <utility>

namespace degtk {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= x;
  return r;
}

Component normalize_component(const Component& c) {
  std::map<std::vector<int>, double> acc;
  for (const auto& m : c) acc[m.exponents] += m.coeff;
  Component out;
  out.reserve(acc.size());
  for (const auto& [exps, coeff] : acc) {
    if (coeff != 0.0) out.push_back(Monomial{coeff, exps});
  }
  return out;
}

}  // namespace

std::string format_monomial(const Monomial& m) {
  std::ostringstream os;
  os << m.coeff;
  for (std::size_t j = 0; j < m.exponents.size(); ++j) {
    if (m.exponents[j] == 0) continue;
    os << "*x" << (j + 1);
    if (m.exponents[j] > 1) os << "^" << m.exponents[j];
  }
  return os.str();
}

PolyField::PolyField(int dim_domain, std::vector<Component> components)
    : dim_domain_(dim_domain) {
  if (dim_domain < 1) throw ValidationError("field domain dimension must be at least 1");
  if (components.empty()) throw ValidationError("field must have at least one component");
  for (const auto& comp : components) {
    for (const auto& m : comp) {
      if (static_cast<int>(m.exponents.size()) != dim_domain) {
        throw ValidationError("monomial " + format_monomial(m) + " has " +
                              std::to_string(m.exponents.size()) + " exponents, expected " +
                              std::to_string(dim_domain));
      }
      for (int e : m.exponents) {
        if (e < 0) throw ValidationError("monomial " + format_monomial(m) + " has a negative exponent");
      }
    }
  }
  components_.reserve(components.size());
  for (auto& comp : components) components_.push_back(normalize_component(comp));
}

Eigen::VectorXd PolyField::eval(const Eigen::VectorXd& x) const {
  if (x.size() != dim_domain_) {
    throw ValidationError("eval: point has dimension " + std::to_string(x.size()) +
                          ", field expects " + std::to_string(dim_domain_));
  }
  Eigen::VectorXd out(dim_out());
  for (int i = 0; i < dim_out(); ++i) {
    double acc = 0.0;
    for (const auto& m : components_[i]) {
      double term = m.coeff;
      for (int j = 0; j < dim_domain_; ++j) term *= ipow(x[j], m.exponents[j]);
      acc += term;
    }
    out[i] = acc;
  }
  return out;
}

Eigen::MatrixXd PolyField::jacobian(const Eigen::VectorXd& x) const {
  if (x.size() != dim_domain_) {
    throw ValidationError("jacobian: point has dimension " + std::to_string(x.size()) +
                          ", field expects " + std::to_string(dim_domain_));
  }
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim_out(), dim_domain_);
  for (int i = 0; i < dim_out(); ++i) {
    for (const auto& m : components_[i]) {
      for (int j = 0; j < dim_domain_; ++j) {
        if (m.exponents[j] == 0) continue;
        double term = m.coeff * m.exponents[j] * ipow(x[j], m.exponents[j] - 1);
        for (int k = 0; k < dim_domain_; ++k) {
          if (k != j) term *= ipow(x[k], m.exponents[k]);
        }
        jac(i, j) += term;
      }
    }
  }
  return jac;
}

PolyField identity_field(int dim) {
  std::vector<Component> comps(dim);
  for (int i = 0; i < dim; ++i) {
    std::vector<int> e(dim, 0);
    e[i] = 1;
    comps[i] = {Monomial{1.0, e}};
  }
  return PolyField(dim, std::move(comps));
}

PolyField constant_field(const Eigen::VectorXd& value, int dim_domain) {
  std::vector<Component> comps(value.size());
  for (int i = 0; i < value.size(); ++i) {
    comps[i] = {Monomial{value[i], std::vector<int>(dim_domain, 0)}};
  }
  return PolyField(dim_domain, std::move(comps));
}

PolyField linear_field(const Eigen::MatrixXd& a) {
  const int dim = static_cast<int>(a.cols());
  std::vector<Component> comps(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < dim; ++j) {
      std::vector<int> e(dim, 0);
      e[j] = 1;
      comps[i].push_back(Monomial{a(i, j), e});
    }
  }
  return PolyField(dim, std::move(comps));
}

PolyField suspend_field(const PolyField& field, int sign) {
  if (sign != 1 && sign != -1) throw ValidationError("suspension sign must be +1 or -1");
  if (field.dim_out() != field.dim_domain()) {
    throw ValidationError("suspension requires a vector field (dim_out == dim_domain)");
  }
  const int dim = field.dim_domain();
  std::vector<Component> comps;
  comps.reserve(dim + 1);
  for (const auto& comp : field.components()) {
    Component lifted;
    lifted.reserve(comp.size());
    for (const auto& m : comp) {
      std::vector<int> e = m.exponents;
      e.push_back(0);
      lifted.push_back(Monomial{m.coeff, std::move(e)});
    }
    comps.push_back(std::move(lifted));
  }
  std::vector<int> last(dim + 1, 0);
  last.back() = 1;
  comps.push_back({Monomial{static_cast<double>(sign), std::move(last)}});
  return PolyField(dim + 1, std::move(comps));
}

PolyField restrict_field(const PolyField& field) {
  if (field.dim_out() != field.dim_domain()) {
    throw ValidationError("restriction requires a vector field (dim_out == dim_domain)");
  }
  const int dim = field.dim_domain();
  if (dim < 2) throw ValidationError("restriction needs domain dimension at least 2");
  for (const auto& m : field.components().back()) {
    if (m.exponents.back() <= 0) {
      throw ValidationError("hyperplane {x" + std::to_string(dim) +
                            " = 0} is not invariant: last component contains " +
                            format_monomial(m));
    }
  }
  std::vector<Component> comps;
  comps.reserve(dim - 1);
  for (int i = 0; i + 1 < dim; ++i) {
    Component restricted;
    for (const auto& m : field.components()[i]) {
      if (m.exponents.back() != 0) continue;  // vanishes once x_last = 0
      std::vector<int> e(m.exponents.begin(), m.exponents.end() - 1);
      restricted.push_back(Monomial{m.coeff, std::move(e)});
    }
    comps.push_back(std::move(restricted));
  }
  return PolyField(dim - 1, std::move(comps));
}

PolyField permute_field(const PolyField& field, const std::vector<int>& perm) {
  const int dim = field.dim_domain();
  if (field.dim_out() != dim) throw ValidationError("permutation requires a vector field");
  if (static_cast<int>(perm.size()) != dim) throw ValidationError("permutation has wrong length");
  std::vector<bool> seen(dim, false);
  for (int p : perm) {
    if (p < 0 || p >= dim || seen[p]) throw ValidationError("not a permutation");
    seen[p] = true;
  }
  std::vector<Component> comps(dim);
  for (int i = 0; i < dim; ++i) {
    Component moved;
    moved.reserve(field.components()[i].size());
    for (const auto& m : field.components()[i]) {
      std::vector<int> e(dim, 0);
      for (int k = 0; k < dim; ++k) e[perm[k]] = m.exponents[k];
      moved.push_back(Monomial{m.coeff, std::move(e)});
    }
    comps[perm[i]] = std::move(moved);
  }
  return PolyField(dim, std::move(comps));
}

Eigen::VectorXd FieldEval::operator()(const Eigen::VectorXd& x) const {
  if (!eval) throw ValidationError("FieldEval has no evaluator");
  if (x.size() != dim) {
    throw ValidationError("FieldEval: point has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(dim));
  }
  return eval(x);
}

Eigen::MatrixXd FieldEval::jacobian(const Eigen::VectorXd& x) const {
  if (jac) return jac(x);
  // Central differences for opaque mappings.
  const Eigen::VectorXd base = (*this)(x);
  Eigen::MatrixXd out(base.size(), dim);
  for (int j = 0; j < dim; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    out.col(j) = ((*this)(xp) - (*this)(xm)) / (2.0 * h);
  }
  return out;
}

FieldEval FieldEval::from(PolyField field) {
  auto shared = std::make_shared<const PolyField>(std::move(field));
  FieldEval fe;
  fe.dim = shared->dim_domain();
  fe.eval = [shared](const Eigen::VectorXd& x) { return shared->eval(x); };
  fe.jac = [shared](const Eigen::VectorXd& x) { return shared->jacobian(x); };
  return fe;
}

FieldEval FieldEval::opaque(int dim, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn) {
  FieldEval fe;
  fe.dim = dim;
  fe.eval = std::move(fn);
  return fe;
}

}  // namespace degtk

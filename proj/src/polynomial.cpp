#include "subeik/polynomial.hpp"

#include "subeik/error.hpp"

#include <memory>
#include <sstream>

namespace subeik {
namespace {

// x^e with one exponent lowered by `d1` along axis a and `d2` along axis b.
double lowered_monomial(const std::vector<int>& e, const Vector& x, int a,
                        int b) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    int power = e[i];
    if (static_cast<int>(i) == a) --power;
    if (static_cast<int>(i) == b) --power;
    if (power < 0) return 0.0;
    for (int k = 0; k < power; ++k) v *= x[static_cast<Eigen::Index>(i)];
  }
  return v;
}

struct PolynomialData {
  int dim;
  int count;
  std::vector<PolynomialTerm> terms;
};

}  // namespace

VectorFieldSystem polynomial_system(std::string name, int dim, int count,
                                    std::vector<PolynomialTerm> terms) {
  if (dim <= 0 || count <= 0) {
    throw ConfigError("polynomial system needs positive dim and count");
  }
  for (const auto& t : terms) {
    if (t.field < 0 || t.field >= count || t.component < 0 ||
        t.component >= dim || static_cast<int>(t.exponents.size()) != dim) {
      throw ConfigError("polynomial term out of range");
    }
    for (int e : t.exponents) {
      if (e < 0) throw ConfigError("negative exponent in polynomial term");
    }
  }
  auto data = std::make_shared<const PolynomialData>(
      PolynomialData{dim, count, std::move(terms)});

  VectorFieldSystem sys;
  sys.name = std::move(name);
  sys.dim = dim;
  sys.count = count;
  sys.eval = [data](const Vector& x) {
    Matrix a = Matrix::Zero(data->dim, data->count);
    for (const auto& t : data->terms) {
      a(t.component, t.field) += t.coeff * monomial_value(t.exponents, x);
    }
    return a;
  };
  sys.jac = [data](const Vector& x) {
    std::vector<Matrix> jac(data->count, Matrix::Zero(data->dim, data->dim));
    for (const auto& t : data->terms) {
      for (int l = 0; l < data->dim; ++l) {
        const int e = t.exponents[l];
        if (e == 0) continue;
        jac[t.field](t.component, l) +=
            t.coeff * e * lowered_monomial(t.exponents, x, l, -1);
      }
    }
    return jac;
  };
  sys.hess = [data](const Vector& x) {
    std::vector<FieldHessian> hess(
        data->count,
        FieldHessian(data->dim, Matrix::Zero(data->dim, data->dim)));
    for (const auto& t : data->terms) {
      for (int l = 0; l < data->dim; ++l) {
        for (int m = 0; m < data->dim; ++m) {
          const int el = t.exponents[l];
          const int em = t.exponents[m] - (l == m ? 1 : 0);
          if (el <= 0 || em <= 0) continue;
          hess[t.field][t.component](l, m) +=
              t.coeff * el * em * lowered_monomial(t.exponents, x, l, m);
        }
      }
    }
    return hess;
  };
  return sys;
}

std::vector<PolynomialTerm> parse_polynomial_table(std::istream& in, int dim,
                                                   int count) {
  std::vector<PolynomialTerm> terms;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream row(line);
    PolynomialTerm t;
    std::string first;
    if (!(row >> first)) continue;  // blank
    std::size_t used = 0;
    try {
      t.field = std::stoi(first, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != first.size()) {
      throw ConfigError("polynomial table line " + std::to_string(lineno) +
                        ": bad field index '" + first + "'");
    }
    if (!(row >> t.component)) {
      throw ConfigError("polynomial table line " + std::to_string(lineno) +
                        ": missing component index");
    }
    t.exponents.resize(dim);
    for (int i = 0; i < dim; ++i) {
      if (!(row >> t.exponents[i])) {
        throw ConfigError("polynomial table line " + std::to_string(lineno) +
                          ": expected " + std::to_string(dim) + " exponents");
      }
    }
    if (!(row >> t.coeff)) {
      throw ConfigError("polynomial table line " + std::to_string(lineno) +
                        ": missing coefficient");
    }
    std::string extra;
    if (row >> extra) {
      throw ConfigError("polynomial table line " + std::to_string(lineno) +
                        ": trailing tokens");
    }
    --t.field;
    --t.component;
    if (t.field < 0 || t.field >= count || t.component < 0 ||
        t.component >= dim) {
      throw ConfigError("polynomial table line " + std::to_string(lineno) +
                        ": index out of range");
    }
    terms.push_back(std::move(t));
  }
  return terms;
}

}  // namespace subeik

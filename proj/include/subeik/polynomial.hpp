#pragma once

#include "subeik/fields.hpp"

#include <istream>
#include <string>
#include <vector>

namespace subeik {

/// One monomial contribution coeff * x^exponents to component `component`
/// of field `field` (both zero-based).
struct PolynomialTerm {
  int field = 0;
  int component = 0;
  std::vector<int> exponents;
  double coeff = 0.0;
};

/// x^exps for any scalar type.
template <typename Scalar>
Scalar monomial_value(const std::vector<int>& exps,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  Scalar v(1);
  for (std::size_t i = 0; i < exps.size(); ++i) {
    for (int k = 0; k < exps[i]; ++k) v *= x[static_cast<Eigen::Index>(i)];
  }
  return v;
}

/// Builds a system with exact Jacobians and Hessians from monomial terms.
VectorFieldSystem polynomial_system(std::string name, int dim, int count,
                                    std::vector<PolynomialTerm> terms);

/// Parses the text table `j k e_1 .. e_n coeff`, one term per line, with
/// 1-based field index j and component index k. Blank lines and `#`
/// comments are ignored. Throws ConfigError on malformed rows.
std::vector<PolynomialTerm> parse_polynomial_table(std::istream& in, int dim,
                                                   int count);

}  // namespace subeik

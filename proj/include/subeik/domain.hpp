#pragma once

#include "subeik/fields.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace subeik {

struct BoundingBox {
  Vector lo;
  Vector hi;

  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Vector& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
};

/// Bounded domain {phi < 0} with smooth boundary {phi = 0}.
struct ImplicitDomain {
  std::string name;
  int dim = 0;
  std::function<double(const Vector&)> phi;
  std::function<Vector(const Vector&)> grad_phi;
  /// Optional; central differences of grad_phi otherwise.
  std::function<Matrix(const Vector&)> hess_phi;
  BoundingBox bbox;
  double g_min = 1e-6;

  double diameter() const { return bbox.diameter(); }
  double proj_tol() const { return 1e-10 * diameter(); }

  /// First-order signed distance phi / |grad phi|.
  double signed_distance(const Vector& x) const;
  Matrix hessian(const Vector& x) const;
};

/// A point of the boundary with its outward unit normal and an orthonormal
/// tangent frame (columns of `chart_basis`, n - 1 of them).
struct BoundaryPoint {
  Vector z;
  Vector normal;
  Matrix chart_basis;
};

/// Throws NotOnBoundary or DegenerateGradient.
Vector outward_normal(const ImplicitDomain& dom, const Vector& z);

/// Normal plus Gram-Schmidt tangent frame, pivoting out the coordinate axis
/// with the largest normal component.
BoundaryPoint make_boundary_point(const ImplicitDomain& dom, const Vector& z);

/// H(z, nu(z)); zero exactly at characteristic points.
double normal_hamiltonian(const VectorFieldSystem& sys,
                          const ImplicitDomain& dom, const Vector& z);

/// True iff every field is (numerically) tangent to the boundary at z, i.e.
/// H(z, nu(z)) <= tol.
bool is_characteristic_point(const VectorFieldSystem& sys,
                             const ImplicitDomain& dom, const Vector& z,
                             double tol);

/// Damped Newton projection along grad phi onto {phi = 0}.
Vector project_to_boundary(const ImplicitDomain& dom, const Vector& x);

/// Roughly uniform boundary samples: sign changes of phi on a lattice over
/// the bounding box are projected onto the boundary, then `target_count` of
/// them are picked by farthest-point selection starting from a seeded index.
/// Throws EmptyBoundary when no sign change is found.
std::vector<BoundaryPoint> sample_boundary(const ImplicitDomain& dom,
                                           int target_count,
                                           std::uint64_t seed = 0);

// Built-in domains with closed-form phi, grad phi and Hessian.

/// phi = |x - c| - r.
ImplicitDomain ball(const Vector& center, double radius);
/// phi = sum ((x_i - c_i) / a_i)^2 - 1.
ImplicitDomain ellipsoid(const Vector& center, const Vector& semi_axes);
/// {a < <e, x> < b}, truncated to |x_i| <= half_extent in the bounding box
/// along directions other than e. phi = (s - a)(s - b) / (b - a).
ImplicitDomain slab(const Vector& direction, double a, double b,
                    double half_extent);
/// phi = sum (x_i / a_i)^m - 1 with even m >= 2: a box with rounded corners.
ImplicitDomain superellipse(const Vector& semi_axes, int exponent);

/// Builds a domain from a kind name and flat parameter list (see README).
ImplicitDomain builtin_domain(const std::string& kind,
                              const std::vector<double>& params, int dim);

}  // namespace subeik

#pragma once

#include "subeik/domain.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace subeik {

/// Node classification relative to the domain.
///   Interior: inside Omega, away from the boundary.
///   Band:     within one cell of the boundary, or adjacent to a node on the
///             other side of it (both sides).
///   Ghost:    outside Omega, within the ghost layer; carries fixed signed
///             data for centered stencils.
///   Exterior: outside, inactive.
enum class NodeKind : std::uint8_t { Interior, Band, Ghost, Exterior };

std::string_view to_string(NodeKind kind);

/// Uniform isotropic lattice of nodes origin + h * index.
class Grid {
 public:
  Grid() = default;
  Grid(Vector origin, double h, std::vector<int> dims);

  /// Lattice aligned to integer multiples of h that covers `box` with `pad`
  /// extra nodes on every side.
  static Grid covering(const BoundingBox& box, double h, int pad);

  int dim() const { return static_cast<int>(dims_.size()); }
  double spacing() const { return h_; }
  const Vector& origin() const { return origin_; }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return strides_[axis]; }

  Vector point(std::size_t flat) const;
  std::vector<int> index(std::size_t flat) const;
  std::size_t flat(const std::vector<int>& idx) const;
  int coordinate(std::size_t flat, int axis) const {
    return static_cast<int>((flat / strides_[axis]) %
                            static_cast<std::size_t>(dims_[axis]));
  }
  /// Neighbor along `axis` in direction `dir` (+1 / -1), if inside the grid.
  bool neighbor(std::size_t flat, int axis, int dir, std::size_t& out) const;

  /// Lower corner index of the cell containing x and the local coordinates
  /// in [0, 1]^n. Returns false when x is outside the lattice.
  bool locate(const Vector& x, std::vector<int>& corner, Vector& frac) const;

  /// Node nearest to x (clamped to the lattice).
  std::size_t nearest(const Vector& x) const;

  const std::vector<NodeKind>& mask() const { return mask_; }
  NodeKind kind(std::size_t flat) const { return mask_[flat]; }
  /// Signed first-order distance to the boundary at each node.
  const std::vector<double>& signed_distance() const { return sdist_; }

  /// Classifies nodes against the domain. Ghost layer width is `ghost_cells`
  /// cells.
  void classify(const ImplicitDomain& dom, int ghost_cells);

  /// Node inside Omega (Interior or inner Band).
  bool inside(std::size_t flat) const { return sdist_[flat] < 0.0; }
  bool active(std::size_t flat) const {
    return mask_[flat] != NodeKind::Exterior;
  }

 private:
  Vector origin_;
  double h_ = 0.0;
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  std::vector<NodeKind> mask_;
  std::vector<double> sdist_;
};

/// Calls f(flat) for every node, visiting axis a in increasing order when
/// bit a of `ordering` is clear and decreasing order otherwise. Axis 0 is
/// the fastest-varying index.
template <typename F>
void for_each_node(const Grid& grid, unsigned ordering, F&& f) {
  const int n = grid.dim();
  std::vector<int> idx(n);
  for (int a = 0; a < n; ++a) {
    idx[a] = (ordering >> a) & 1u ? grid.dims()[a] - 1 : 0;
  }
  while (true) {
    f(grid.flat(idx));
    int a = 0;
    for (; a < n; ++a) {
      const bool down = (ordering >> a) & 1u;
      if (down ? idx[a] > 0 : idx[a] < grid.dims()[a] - 1) {
        idx[a] += down ? -1 : 1;
        break;
      }
      idx[a] = down ? grid.dims()[a] - 1 : 0;
    }
    if (a == n) return;
  }
}

}  // namespace subeik

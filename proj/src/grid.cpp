#include "subeik/grid.hpp"

#include "subeik/error.hpp"

#include <algorithm>
#include <cmath>

namespace subeik {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Interior: return "interior";
    case NodeKind::Band: return "band";
    case NodeKind::Ghost: return "ghost";
    case NodeKind::Exterior: return "exterior";
  }
  return "exterior";
}

Grid::Grid(Vector origin, double h, std::vector<int> dims)
    : origin_(std::move(origin)), h_(h), dims_(std::move(dims)) {
  if (!(h_ > 0.0)) throw ConfigError("grid spacing must be positive");
  if (static_cast<Eigen::Index>(dims_.size()) != origin_.size()) {
    throw ConfigError("grid origin and dims disagree in dimension");
  }
  strides_.resize(dims_.size());
  size_ = 1;
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    if (dims_[a] < 3) throw ConfigError("grid needs at least 3 nodes per axis");
    strides_[a] = size_;
    size_ *= static_cast<std::size_t>(dims_[a]);
  }
  mask_.assign(size_, NodeKind::Interior);
  sdist_.assign(size_, -1.0);
}

Grid Grid::covering(const BoundingBox& box, double h, int pad) {
  const auto n = box.lo.size();
  Vector origin(n);
  std::vector<int> dims(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    // Small slack keeps nodes that sit on the box face by round-off.
    const double lo = std::floor(box.lo[a] / h + 1e-9) - pad;
    const double hi = std::ceil(box.hi[a] / h - 1e-9) + pad;
    origin[a] = lo * h;
    dims[a] = static_cast<int>(hi - lo) + 1;
  }
  return Grid(std::move(origin), h, std::move(dims));
}

Vector Grid::point(std::size_t flat) const {
  Vector x(dim());
  for (int a = 0; a < dim(); ++a) x[a] = origin_[a] + h_ * coordinate(flat, a);
  return x;
}

std::vector<int> Grid::index(std::size_t flat) const {
  std::vector<int> idx(dims_.size());
  for (int a = 0; a < dim(); ++a) idx[a] = coordinate(flat, a);
  return idx;
}

std::size_t Grid::flat(const std::vector<int>& idx) const {
  std::size_t f = 0;
  for (int a = 0; a < dim(); ++a) f += strides_[a] * static_cast<std::size_t>(idx[a]);
  return f;
}

bool Grid::neighbor(std::size_t flat, int axis, int dir,
                    std::size_t& out) const {
  const int c = coordinate(flat, axis) + dir;
  if (c < 0 || c >= dims_[axis]) return false;
  out = dir > 0 ? flat + strides_[axis] : flat - strides_[axis];
  return true;
}

bool Grid::locate(const Vector& x, std::vector<int>& corner,
                  Vector& frac) const {
  corner.resize(dims_.size());
  frac.resize(dim());
  for (int a = 0; a < dim(); ++a) {
    const double s = (x[a] - origin_[a]) / h_;
    if (!(s >= 0.0) || s > dims_[a] - 1) return false;
    int c = static_cast<int>(std::floor(s));
    c = std::min(c, dims_[a] - 2);
    corner[a] = c;
    frac[a] = s - c;
  }
  return true;
}

std::size_t Grid::nearest(const Vector& x) const {
  std::vector<int> idx(dims_.size());
  for (int a = 0; a < dim(); ++a) {
    const int c = static_cast<int>(std::lround((x[a] - origin_[a]) / h_));
    idx[a] = std::clamp(c, 0, dims_[a] - 1);
  }
  return flat(idx);
}

void Grid::classify(const ImplicitDomain& dom, int ghost_cells) {
  if (dom.dim != dim()) throw ConfigError("grid and domain dimension differ");
  std::vector<double> phi(size_);
  for (std::size_t f = 0; f < size_; ++f) {
    const Vector x = point(f);
    phi[f] = dom.phi(x);
    sdist_[f] = dom.signed_distance(x);
  }
  const double ghost_width = ghost_cells * h_;
  for (std::size_t f = 0; f < size_; ++f) {
    const bool in = phi[f] < 0.0;
    bool band = std::abs(sdist_[f]) <= h_;
    for (int a = 0; a < dim() && !band; ++a) {
      for (int dir : {-1, 1}) {
        std::size_t g;
        if (neighbor(f, a, dir, g) && (phi[g] < 0.0) != in) band = true;
      }
    }
    if (band) {
      mask_[f] = NodeKind::Band;
    } else if (in) {
      mask_[f] = NodeKind::Interior;
    } else if (sdist_[f] <= ghost_width) {
      mask_[f] = NodeKind::Ghost;
    } else {
      mask_[f] = NodeKind::Exterior;
    }
    // Keep the sign of sdist consistent with phi.
    sdist_[f] = in ? -std::max(std::abs(sdist_[f]), 1e-300)
                   : std::abs(sdist_[f]);
  }
}

}  // namespace subeik

#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "slipflow/domain.hpp"
#include "slipflow/types.hpp"

namespace slipflow {

enum class FacetTag { Wall, InflowEnd, OutflowEnd };

const char* to_string(FacetTag tag);

/// Unit outward normal, unit tangent (normal rotated by +90 degrees) and signed
/// curvature kappa = -n . d(tau)/ds, positive where the wall is convex seen from inside.
struct BoundaryFrame {
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  double curvature = 0.0;
};

/// Exact wall curve of a domain; evaluates frames at arbitrary wall points.
class WallGeometry {
 public:
  virtual ~WallGeometry() = default;
  virtual BoundaryFrame frame_at(const Vec2& x) const = 0;
};

struct BoundaryFacet {
  int cell = 0;
  int side = 0;  // 2D: see basis::kSideNodes. 1D: 0 left end, 1 right end
  FacetTag tag = FacetTag::Wall;
  std::array<int, 3> nodes{};  // 1D facets use nodes[0] only
};

struct BoundaryNode {
  int node = 0;
  bool on_wall = false;
  bool on_end = false;
  FacetTag end_tag = FacetTag::InflowEnd;  // meaningful when on_end
  BoundaryFrame frame;                     // meaningful when on_wall
};

/// Isoparametric map evaluated at one reference point.
struct MapEval {
  Vec2 x = Vec2::Zero();
  Mat2 jac = Mat2::Identity();
  double det = 1.0;
  Mat2 inv = Mat2::Identity();
};

/// Raw mesh description produced by the generators.
struct MeshData {
  int dim = 2;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 9>> cells;  // 1D cells use the first three entries (left, mid, right)
  std::vector<BoundaryFacet> facets;
  std::shared_ptr<const WallGeometry> wall;
  DomainSpec spec;
  /// Single-block grids: cells across and along; cell index = i + across * j. Zero otherwise.
  std::array<int, 2> grid{0, 0};
};

/// Mapped structured grid of biquadratic (2D) or quadratic (1D) isoparametric cells.
/// Immutable once built.
class Mesh {
 public:
  static constexpr int kQuadPerCell2D = 9;

  /// Validates Jacobians (throws MeshError with the offending cell) and populates frames.
  explicit Mesh(MeshData data);

  int dim() const noexcept { return dim_; }
  const DomainSpec& spec() const noexcept { return spec_; }
  const std::vector<Vec2>& nodes() const noexcept { return nodes_; }
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_cells() const noexcept { return cells_.size(); }
  int nodes_per_cell() const noexcept { return dim_ == 1 ? 3 : 9; }
  int quad_per_cell() const noexcept { return dim_ == 1 ? 3 : 9; }
  std::span<const int> cell(std::size_t c) const {
    return std::span<const int>(cells_[c].data(), static_cast<std::size_t>(nodes_per_cell()));
  }

  const std::vector<BoundaryFacet>& facets() const noexcept { return facets_; }
  const std::vector<BoundaryNode>& boundary_nodes() const noexcept { return boundary_nodes_; }
  /// nullptr for interior nodes.
  const BoundaryNode* boundary_node(int node) const;
  /// Cell-vertex nodes in ascending order; these carry the bilinear space.
  const std::vector<int>& corner_nodes() const noexcept { return corner_nodes_; }

  MapEval map(int cell, const Vec2& ref) const;
  /// Cached map at quadrature point q (2D: q = i + 3 j over Gauss3 x Gauss3).
  const MapEval& jacobian(int cell, int q) const { return jacobians_[cell * quad_per_cell() + q]; }
  static Vec2 quad_point(int dim, int q);
  static double quad_weight(int dim, int q);

  /// Cells across (transverse) and along (axial) for single-block grids, {0, 0} otherwise.
  const std::array<int, 2>& grid() const noexcept { return grid_; }

  bool has_wall_geometry() const noexcept { return static_cast<bool>(wall_); }
  /// Throws ContractViolation when the mesh carries no wall description.
  BoundaryFrame wall_frame(const Vec2& x) const;

  double measure() const;
  double min_jacobian() const;
  double max_abs_curvature() const;

 private:
  int dim_;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 9>> cells_;
  std::vector<BoundaryFacet> facets_;
  std::shared_ptr<const WallGeometry> wall_;
  DomainSpec spec_;
  std::array<int, 2> grid_;
  std::vector<BoundaryNode> boundary_nodes_;
  std::vector<int> boundary_index_;
  std::vector<int> corner_nodes_;
  std::vector<MapEval> jacobians_;
};

/// Interval, disk or star-shaped cross-section. Disks and star-shaped domains use a
/// five-block layout (central square plus four blended outer blocks), each block
/// carrying max(1, resolution / 2) cells per direction.
Mesh build_cross_section_mesh(const DomainSpec& spec, int resolution);

/// Boundary-fitted grid of the truncated strip |x2| <= zeta with `resolution` cells
/// across and round(2 zeta resolution) cells along the axis.
Mesh build_strip_mesh(const DomainSpec& spec, int resolution);

/// Rectangle [x0, x1] x [y0, y1] with walls at x = x0, x1 and ends at y = y0 (inflow), y1 (outflow).
Mesh build_rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny, double alpha = 1.0);

/// Signed wall curvature at a boundary node; throws ContractViolation off the walls.
double curvature_at(const Mesh& mesh, int node);

}  // namespace slipflow

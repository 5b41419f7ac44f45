#include "slipflow/mesh.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "slipflow/basis.hpp"
#include "slipflow/errors.hpp"

namespace slipflow {

const char* to_string(FacetTag tag) {
  switch (tag) {
    case FacetTag::Wall: return "wall";
    case FacetTag::InflowEnd: return "inflow";
    case FacetTag::OutflowEnd: return "outflow";
  }
  return "unknown";
}

namespace {

class CircleWall final : public WallGeometry {
 public:
  explicit CircleWall(double radius) : radius_(radius) {}
  BoundaryFrame frame_at(const Vec2& x) const override {
    BoundaryFrame f;
    f.normal = x.normalized();
    f.tangent = Vec2(-f.normal.y(), f.normal.x());
    f.curvature = 1.0 / radius_;
    return f;
  }

 private:
  double radius_;
};

class StarWall final : public WallGeometry {
 public:
  explicit StarWall(PeriodicSpline r) : r_(std::move(r)) {}
  BoundaryFrame frame_at(const Vec2& x) const override {
    const double th = std::atan2(x.y(), x.x());
    const double r = r_.value(th), r1 = r_.d1(th), r2 = r_.d2(th);
    const Vec2 radial(std::cos(th), std::sin(th));
    const Vec2 ccw(-std::sin(th), std::cos(th));
    BoundaryFrame f;
    f.tangent = (r1 * radial + r * ccw).normalized();
    f.normal = Vec2(f.tangent.y(), -f.tangent.x());
    f.curvature = (r * r + 2.0 * r1 * r1 - r * r2) / std::pow(r * r + r1 * r1, 1.5);
    return f;
  }

 private:
  PeriodicSpline r_;
};

class StripWalls final : public WallGeometry {
 public:
  StripWalls(WallFunction lower, WallFunction upper) : lower_(std::move(lower)), upper_(std::move(upper)) {}
  BoundaryFrame frame_at(const Vec2& x) const override {
    const double x2 = x.y();
    const bool is_lower = std::abs(x.x() - lower_.value(x2)) < std::abs(x.x() - upper_.value(x2));
    const WallFunction& w = is_lower ? lower_ : upper_;
    const double b1 = w.slope(x2), b2 = w.second_derivative(x2);
    const double len = std::sqrt(1.0 + b1 * b1);
    BoundaryFrame f;
    f.normal = is_lower ? Vec2(-1.0, b1) / len : Vec2(1.0, -b1) / len;
    f.tangent = Vec2(-f.normal.y(), f.normal.x());
    const double k = b2 / (len * len * len);
    f.curvature = is_lower ? k : -k;
    return f;
  }

 private:
  WallFunction lower_;
  WallFunction upper_;
};

struct Block {
  std::function<Vec2(double, double)> map;
  int ns = 1;
  int nt = 1;
  std::array<std::optional<FacetTag>, 4> sides{};  // bottom, right, top, left
};

// Merges coincident nodes of adjacent blocks through a quantized coordinate lookup.
class NodeMerger {
 public:
  explicit NodeMerger(std::vector<Vec2>& nodes) : nodes_(nodes) {}

  int add(const Vec2& x) {
    const long long kx = std::llround(x.x() / kQuantum), ky = std::llround(x.y() / kQuantum);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = index_.find({kx + dx, ky + dy});
        if (it != index_.end() && (nodes_[it->second] - x).norm() < 2.0 * kQuantum) return it->second;
      }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(x);
    index_.emplace(std::make_pair(kx, ky), id);
    return id;
  }

 private:
  static constexpr double kQuantum = 1e-9;
  std::vector<Vec2>& nodes_;
  std::map<std::pair<long long, long long>, int> index_;
};

MeshData build_blocks(const std::vector<Block>& blocks) {
  MeshData data;
  data.dim = 2;
  NodeMerger merger(data.nodes);
  for (const Block& b : blocks) {
    const int ms = 2 * b.ns + 1, mt = 2 * b.nt + 1;
    std::vector<int> ids(static_cast<std::size_t>(ms) * mt);
    for (int j = 0; j < mt; ++j)
      for (int i = 0; i < ms; ++i)
        ids[i + ms * j] = merger.add(b.map(static_cast<double>(i) / (ms - 1), static_cast<double>(j) / (mt - 1)));
    for (int cj = 0; cj < b.nt; ++cj)
      for (int ci = 0; ci < b.ns; ++ci) {
        std::array<int, 9> c{};
        for (int j = 0; j < 3; ++j)
          for (int i = 0; i < 3; ++i) c[i + 3 * j] = ids[(2 * ci + i) + ms * (2 * cj + j)];
        const int cell = static_cast<int>(data.cells.size());
        data.cells.push_back(c);
        const std::array<bool, 4> on_side{cj == 0, ci == b.ns - 1, cj == b.nt - 1, ci == 0};
        for (int s = 0; s < 4; ++s) {
          if (!on_side[s] || !b.sides[s]) continue;
          BoundaryFacet f;
          f.cell = cell;
          f.side = s;
          f.tag = *b.sides[s];
          for (int k = 0; k < 3; ++k) f.nodes[k] = c[basis::kSideNodes[s][k]];
          data.facets.push_back(f);
        }
      }
  }
  return data;
}

// Five-block layout for a star-shaped domain with boundary radius r(theta).
MeshData radial_blocks(const std::function<double(double)>& radius, double inner_half, int resolution) {
  const int m = std::max(1, resolution / 2);
  std::vector<Block> blocks;
  Block center;
  center.map = [inner_half](double s, double t) {
    return Vec2(-inner_half + 2.0 * inner_half * s, -inner_half + 2.0 * inner_half * t);
  };
  center.ns = center.nt = m;
  blocks.push_back(center);
  for (int k = 0; k < 4; ++k) {
    const double rot = k * std::numbers::pi / 2.0;
    Block outer;
    outer.map = [=](double s, double t) {
      const double th = -std::numbers::pi / 4.0 + std::numbers::pi / 2.0 * t;
      const Vec2 inner(inner_half, -inner_half + 2.0 * inner_half * t);
      const double r = radius(th + rot);
      const Vec2 outer_pt(r * std::cos(th), r * std::sin(th));
      const Vec2 p = (1.0 - s) * inner + s * outer_pt;
      const double c = std::cos(rot), sn = std::sin(rot);
      return Vec2(c * p.x() - sn * p.y(), sn * p.x() + c * p.y());
    };
    outer.ns = outer.nt = m;
    outer.sides[1] = FacetTag::Wall;
    blocks.push_back(outer);
  }
  return build_blocks(blocks);
}

}  // namespace

Vec2 Mesh::quad_point(int dim, int q) {
  if (dim == 1) return Vec2(basis::Gauss3::points[q], 0.0);
  return Vec2(basis::Gauss3::points[q % 3], basis::Gauss3::points[q / 3]);
}

double Mesh::quad_weight(int dim, int q) {
  if (dim == 1) return basis::Gauss3::weights[q];
  return basis::Gauss3::weights[q % 3] * basis::Gauss3::weights[q / 3];
}

Mesh::Mesh(MeshData data)
    : dim_(data.dim),
      nodes_(std::move(data.nodes)),
      cells_(std::move(data.cells)),
      facets_(std::move(data.facets)),
      wall_(std::move(data.wall)),
      spec_(std::move(data.spec)),
      grid_(data.grid) {
  const int nq = quad_per_cell();
  jacobians_.reserve(cells_.size() * nq);
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (int q = 0; q < nq; ++q) {
      MapEval m = map(static_cast<int>(c), quad_point(dim_, q));
      if (!(m.det > 0.0)) {
        std::ostringstream os;
        os << "non-positive mapping Jacobian in cell " << c;
        throw MeshError(os.str(), static_cast<long>(c));
      }
      jacobians_.push_back(m);
    }
    if (dim_ == 2) {
      for (double s : {0.0, 1.0})
        for (double t : {0.0, 1.0})
          if (!(map(static_cast<int>(c), Vec2(s, t)).det > 0.0)) {
            std::ostringstream os;
            os << "non-positive mapping Jacobian at a vertex of cell " << c;
            throw MeshError(os.str(), static_cast<long>(c));
          }
    }
  }

  boundary_index_.assign(nodes_.size(), -1);
  auto touch = [this](int node) -> BoundaryNode& {
    if (boundary_index_[node] < 0) {
      boundary_index_[node] = static_cast<int>(boundary_nodes_.size());
      BoundaryNode b;
      b.node = node;
      boundary_nodes_.push_back(b);
    }
    return boundary_nodes_[boundary_index_[node]];
  };
  for (const BoundaryFacet& f : facets_) {
    const int count = dim_ == 1 ? 1 : 3;
    for (int k = 0; k < count; ++k) {
      BoundaryNode& b = touch(f.nodes[k]);
      if (f.tag == FacetTag::Wall) {
        if (!b.on_wall) {
          b.on_wall = true;
          if (dim_ == 1) {
            const double s = f.side == 0 ? -1.0 : 1.0;
            b.frame.normal = Vec2(s, 0.0);
            b.frame.tangent = Vec2(0.0, s);
            b.frame.curvature = 0.0;
          } else if (wall_) {
            b.frame = wall_->frame_at(nodes_[f.nodes[k]]);
          }
        }
      } else {
        b.on_end = true;
        b.end_tag = f.tag;
      }
    }
  }

  std::vector<char> is_corner(nodes_.size(), 0);
  for (const auto& c : cells_) {
    if (dim_ == 1) {
      is_corner[c[0]] = is_corner[c[2]] = 1;
    } else {
      for (int k : basis::kCornerNodes) is_corner[c[k]] = 1;
    }
  }
  for (std::size_t n = 0; n < nodes_.size(); ++n)
    if (is_corner[n]) corner_nodes_.push_back(static_cast<int>(n));
}

const BoundaryNode* Mesh::boundary_node(int node) const {
  const int b = boundary_index_[node];
  return b < 0 ? nullptr : &boundary_nodes_[b];
}

MapEval Mesh::map(int cell, const Vec2& ref) const {
  MapEval m;
  const auto& c = cells_[cell];
  if (dim_ == 1) {
    const auto l = basis::q2_1d(ref.x());
    const auto d = basis::q2_1d_d1(ref.x());
    double x = 0.0, dx = 0.0;
    for (int i = 0; i < 3; ++i) {
      x += l[i] * nodes_[c[i]].x();
      dx += d[i] * nodes_[c[i]].x();
    }
    m.x = Vec2(x, 0.0);
    m.jac << dx, 0.0, 0.0, 1.0;
    m.det = dx;
    m.inv << 1.0 / dx, 0.0, 0.0, 1.0;
    return m;
  }
  const auto v = basis::q2_2d(ref);
  m.x.setZero();
  m.jac.setZero();
  for (int k = 0; k < 9; ++k) {
    const Vec2& p = nodes_[c[k]];
    m.x += v.value[k] * p;
    m.jac += p * v.grad[k].transpose();
  }
  m.det = m.jac.determinant();
  m.inv = m.jac.inverse();
  return m;
}

BoundaryFrame Mesh::wall_frame(const Vec2& x) const {
  if (!wall_) throw ContractViolation("mesh carries no wall geometry; boundary frames unavailable");
  return wall_->frame_at(x);
}

double Mesh::measure() const {
  double total = 0.0;
  const int nq = quad_per_cell();
  for (std::size_t c = 0; c < cells_.size(); ++c)
    for (int q = 0; q < nq; ++q) total += quad_weight(dim_, q) * jacobian(static_cast<int>(c), q).det;
  return total;
}

double Mesh::min_jacobian() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const MapEval& m : jacobians_) lo = std::min(lo, m.det);
  return lo;
}

double Mesh::max_abs_curvature() const {
  double hi = 0.0;
  for (const BoundaryNode& b : boundary_nodes_)
    if (b.on_wall) hi = std::max(hi, std::abs(b.frame.curvature));
  return hi;
}

Mesh build_cross_section_mesh(const DomainSpec& spec, int resolution) {
  if (resolution < 2) throw MeshError("resolution must be at least 2");
  spec.validate();
  if (const auto* iv = std::get_if<IntervalDomain>(&spec.kind)) {
    MeshData data;
    data.dim = 1;
    data.spec = spec;
    const int n = resolution;
    for (int k = 0; k <= 2 * n; ++k) data.nodes.emplace_back(iv->length * k / (2.0 * n), 0.0);
    for (int c = 0; c < n; ++c) data.cells.push_back({2 * c, 2 * c + 1, 2 * c + 2});
    data.facets.push_back({0, 0, FacetTag::Wall, {0, 0, 0}});
    data.facets.push_back({n - 1, 1, FacetTag::Wall, {2 * n, 0, 0}});
    data.grid = {n, 1};
    return Mesh(std::move(data));
  }
  if (const auto* d = std::get_if<DiskDomain>(&spec.kind)) {
    const double r = d->radius;
    MeshData data = radial_blocks([r](double) { return r; }, 0.5 * r, resolution);
    data.wall = std::make_shared<CircleWall>(r);
    data.spec = spec;
    return Mesh(std::move(data));
  }
  if (const auto* s = std::get_if<StarShapedDomain>(&spec.kind)) {
    auto spline = std::make_shared<PeriodicSpline>(s->radii);
    MeshData data =
        radial_blocks([spline](double th) { return spline->value(th); }, 0.5 * spline->min_value(), resolution);
    data.wall = std::make_shared<StarWall>(*spline);
    data.spec = spec;
    return Mesh(std::move(data));
  }
  throw MeshError("build_cross_section_mesh expects an interval, disk or star-shaped domain");
}

Mesh build_strip_mesh(const DomainSpec& spec, int resolution) {
  if (resolution < 2) throw MeshError("resolution must be at least 2");
  const auto* st = std::get_if<DistortedStripDomain>(&spec.kind);
  if (!st) throw MeshError("build_strip_mesh expects a distorted strip domain");
  spec.validate();
  const double zeta = st->half_length;
  const WallFunction lower = st->lower, upper = st->upper;
  Block b;
  b.map = [=](double s, double t) {
    const double x2 = -zeta + 2.0 * zeta * t;
    const double lo = lower.value(x2), hi = upper.value(x2);
    return Vec2(lo + s * (hi - lo), x2);
  };
  b.ns = resolution;
  b.nt = std::max(1, static_cast<int>(std::lround(2.0 * zeta * resolution)));
  b.sides = {FacetTag::InflowEnd, FacetTag::Wall, FacetTag::OutflowEnd, FacetTag::Wall};
  MeshData data = build_blocks({b});
  data.wall = std::make_shared<StripWalls>(lower, upper);
  data.spec = spec;
  data.grid = {b.ns, b.nt};
  return Mesh(std::move(data));
}

Mesh build_rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny, double alpha) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) throw MeshError("degenerate rectangle");
  Block b;
  b.map = [=](double s, double t) { return Vec2(x0 + s * (x1 - x0), y0 + t * (y1 - y0)); };
  b.ns = nx;
  b.nt = ny;
  b.sides = {FacetTag::InflowEnd, FacetTag::Wall, FacetTag::OutflowEnd, FacetTag::Wall};
  MeshData data = build_blocks({b});
  data.grid = {nx, ny};
  data.wall = std::make_shared<StripWalls>(WallFunction::flat(x0), WallFunction::flat(x1));
  DistortedStripDomain strip;
  strip.lower = WallFunction::flat(x0);
  strip.upper = WallFunction::flat(x1);
  strip.half_length = 0.5 * (y1 - y0);
  data.spec.kind = strip;
  data.spec.alpha = alpha;
  return Mesh(std::move(data));
}

double curvature_at(const Mesh& mesh, int node) {
  const BoundaryNode* b = mesh.boundary_node(node);
  if (!b || !b->on_wall) throw ContractViolation("curvature_at: node does not lie on a wall facet");
  return b->frame.curvature;
}

}  // namespace slipflow

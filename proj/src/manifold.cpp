#include "geoentropy/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>
#include <random>

#include "geoentropy/error.hpp"

namespace geoentropy {

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::torus: return "torus";
    case Topology::circle: return "circle";
    case Topology::sphere2: return "sphere2";
    case Topology::interval: return "interval";
    case Topology::product: return "product";
    case Topology::mapping_torus: return "mapping-torus";
    case Topology::shell: return "shell";
  }
  return "unknown";
}

namespace {

double wrap_unit(double x) {
  double w = x - std::floor(x);
  return w >= 1.0 ? 0.0 : w;
}

double periodic_gap(double a, double b) {
  double g = std::fabs(a - b);
  g -= std::floor(g);
  return std::min(g, 1.0 - g);
}

class TorusChart final : public Chart {
 public:
  TorusChart(std::size_t n, std::size_t dims) : n_(n), dims_(dims) {}

  std::size_t dim() const override { return dims_; }

  Coords canonical(std::span<const double> c) const override {
    Coords out(c.begin(), c.end());
    for (double& x : out) x = wrap_unit(x);
    return out;
  }

  double distance(std::span<const double> a, std::span<const double> b) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < dims_; ++i) {
      double g = periodic_gap(a[i], b[i]);
      s += g * g;
    }
    return std::sqrt(s);
  }

  std::vector<double> axis_spacing() const override {
    return std::vector<double>(dims_, 1.0 / static_cast<double>(n_));
  }
  double spacing() const override { return 1.0 / static_cast<double>(n_); }

  std::vector<PointId> candidates(std::span<const double> c) const override {
    std::vector<PointId> ids{0};
    for (std::size_t d = 0; d < dims_; ++d) {
      auto lo = static_cast<std::size_t>(std::floor(c[d] * static_cast<double>(n_))) % n_;
      std::size_t hi = (lo + 1) % n_;
      std::vector<PointId> next;
      next.reserve(ids.size() * 2);
      for (PointId id : ids) {
        next.push_back(static_cast<PointId>(id * n_ + lo));
        next.push_back(static_cast<PointId>(id * n_ + hi));
      }
      ids.swap(next);
    }
    return ids;
  }

 private:
  std::size_t n_, dims_;
};

class IntervalChart final : public Chart {
 public:
  explicit IntervalChart(std::size_t n) : n_(n) {}

  std::size_t dim() const override { return 1; }
  Coords canonical(std::span<const double> c) const override { return {c.begin(), c.end()}; }
  double distance(std::span<const double> a, std::span<const double> b) const override {
    return std::fabs(a[0] - b[0]);
  }
  std::vector<double> axis_spacing() const override { return {spacing()}; }
  double spacing() const override { return 1.0 / static_cast<double>(n_ - 1); }

  std::vector<PointId> candidates(std::span<const double> c) const override {
    double t = std::clamp(c[0], 0.0, 1.0) * static_cast<double>(n_ - 1);
    auto lo = std::min(static_cast<std::size_t>(std::floor(t)), n_ - 1);
    std::size_t hi = std::min(lo + 1, n_ - 1);
    return {static_cast<PointId>(lo), static_cast<PointId>(hi)};
  }

 private:
  std::size_t n_;
};

double great_circle(std::span<const double> a, std::span<const double> b) {
  double cx = a[1] * b[2] - a[2] * b[1];
  double cy = a[2] * b[0] - a[0] * b[2];
  double cz = a[0] * b[1] - a[1] * b[0];
  double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
}

class SphereChart final : public Chart {
 public:
  explicit SphereChart(double spacing) : spacing_(spacing) {}

  std::size_t dim() const override { return 3; }
  Coords canonical(std::span<const double> c) const override {
    double n = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    if (n == 0.0) return {0.0, 0.0, 1.0};
    return {c[0] / n, c[1] / n, c[2] / n};
  }
  double distance(std::span<const double> a, std::span<const double> b) const override {
    return great_circle(a, b);
  }
  double spacing() const override { return spacing_; }

 private:
  double spacing_;
};

class EuclideanChart final : public Chart {
 public:
  EuclideanChart(std::size_t dim, double spacing) : dim_(dim), spacing_(spacing) {}

  std::size_t dim() const override { return dim_; }
  Coords canonical(std::span<const double> c) const override { return {c.begin(), c.end()}; }
  double distance(std::span<const double> a, std::span<const double> b) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  }
  double spacing() const override { return spacing_; }

 private:
  std::size_t dim_;
  double spacing_;
};

class MappingTorusChart final : public Chart {
 public:
  MappingTorusChart(std::size_t n, std::size_t levels, std::array<int, 4> a)
      : n_(n), levels_(levels), a_(a) {}

  std::size_t dim() const override { return 3; }

  Coords canonical(std::span<const double> c) const override {
    double x = c[0], y = c[1], s = c[2];
    auto turns = static_cast<long>(std::floor(s));
    s -= static_cast<double>(turns);
    if (s >= 1.0) {
      s = 0.0;
      ++turns;
    }
    // (p, s + 1) ~ (A p, s): every unit of s shed applies A once.
    for (long k = 0; k < turns; ++k) apply(x, y, false);
    for (long k = 0; k > turns; --k) apply(x, y, true);
    return {wrap_unit(x), wrap_unit(y), s};
  }

  double distance(std::span<const double> a, std::span<const double> b) const override {
    auto flat = [](double ax, double ay, double as, double bx, double by, double bs) {
      double gx = periodic_gap(ax, bx), gy = periodic_gap(ay, by), gs = as - bs;
      return std::sqrt(gx * gx + gy * gy + gs * gs);
    };
    double best = flat(a[0], a[1], a[2], b[0], b[1], b[2]);
    double ux = b[0], uy = b[1];
    apply(ux, uy, true);  // (A^-1 p, s + 1) represents the same point
    best = std::min(best, flat(a[0], a[1], a[2], ux, uy, b[2] + 1.0));
    double dx = b[0], dy = b[1];
    apply(dx, dy, false);
    best = std::min(best, flat(a[0], a[1], a[2], dx, dy, b[2] - 1.0));
    return best;
  }

  std::vector<double> axis_spacing() const override {
    double h = 1.0 / static_cast<double>(n_);
    return {h, h, 1.0 / static_cast<double>(levels_)};
  }
  double spacing() const override {
    return std::min(1.0 / static_cast<double>(n_), 1.0 / static_cast<double>(levels_));
  }

  std::vector<PointId> candidates(std::span<const double> c) const override {
    auto n = static_cast<long>(n_);
    auto levels = static_cast<long>(levels_);
    long ix = static_cast<long>(std::floor(c[0] * static_cast<double>(n_))) % n;
    long iy = static_cast<long>(std::floor(c[1] * static_cast<double>(n_))) % n;
    long is = std::min(static_cast<long>(std::floor(c[2] * static_cast<double>(levels_))), levels - 1);
    std::vector<PointId> ids;
    ids.reserve(8);
    for (long dk = 0; dk <= 1; ++dk)
      for (long di = 0; di <= 1; ++di)
        for (long dj = 0; dj <= 1; ++dj) {
          long i = (ix + di) % n, j = (iy + dj) % n, k = is + dk;
          if (k == levels) {
            long ni = (a_[0] * i + a_[1] * j) % n, nj = (a_[2] * i + a_[3] * j) % n;
            i = (ni + n) % n;
            j = (nj + n) % n;
            k = 0;
          }
          ids.push_back(static_cast<PointId>((k * n + i) * n + j));
        }
    return ids;
  }

 private:
  void apply(double& x, double& y, bool inverse) const {
    double nx, ny;
    if (!inverse) {
      nx = a_[0] * x + a_[1] * y;
      ny = a_[2] * x + a_[3] * y;
    } else {  // det = 1
      nx = a_[3] * x - a_[1] * y;
      ny = -a_[2] * x + a_[0] * y;
    }
    x = wrap_unit(nx);
    y = wrap_unit(ny);
  }

  std::size_t n_, levels_;
  std::array<int, 4> a_;
};

class ProductChart final : public Chart {
 public:
  ProductChart(std::shared_ptr<const Chart> a, std::shared_ptr<const Chart> b)
      : a_(std::move(a)), b_(std::move(b)) {}

  std::size_t dim() const override { return a_->dim() + b_->dim(); }

  Coords canonical(std::span<const double> c) const override {
    Coords out = a_->canonical(c.first(a_->dim()));
    Coords tail = b_->canonical(c.subspan(a_->dim()));
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
  }

  double distance(std::span<const double> x, std::span<const double> y) const override {
    std::size_t k = a_->dim();
    return std::max(a_->distance(x.first(k), y.first(k)),
                    b_->distance(x.subspan(k), y.subspan(k)));
  }

  std::vector<double> axis_spacing() const override {
    auto fill = [](const Chart& c) {
      auto s = c.axis_spacing();
      if (s.empty()) s.assign(c.dim(), c.spacing());
      return s;
    };
    auto out = fill(*a_);
    auto tail = fill(*b_);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
  }
  double spacing() const override { return std::min(a_->spacing(), b_->spacing()); }

 private:
  std::shared_ptr<const Chart> a_, b_;
};

void check_size(std::size_t n) {
  if (n > kPointBudget)
    throw BudgetExceeded("sample of " + std::to_string(n) + " points exceeds the point budget of " +
                         std::to_string(kPointBudget));
}

}  // namespace

MetricReport check_metric(std::span<const double> d, std::size_t n, std::size_t sample) {
  MetricReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i * n + i] != 0.0) rep.positive = false;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (d[i * n + j] != d[j * n + i]) rep.symmetric = false;
      if (!(d[i * n + j] > 0.0)) rep.positive = false;
    }
  }
  auto visit = [&](std::size_t i, std::size_t j, std::size_t k) {
    double lhs = d[i * n + k], rhs = d[i * n + j] + d[j * n + k];
    double excess = lhs - rhs;
    if (excess > rep.worst_triangle_excess) rep.worst_triangle_excess = excess;
    if (excess > 1e-12 * rhs) rep.triangle = false;
  };
  if (sample == 0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double* ri = d.data() + i * n;
        const double* rj = d.data() + j * n;
        double dij = ri[j];
        for (std::size_t k = 0; k < n; ++k) {
          double excess = ri[k] - (dij + rj[k]);
          if (excess > 0.0) visit(i, j, k);
        }
      }
    rep.triples_checked = n * n * n;
  } else if (n > 0) {
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t t = 0; t < sample; ++t) visit(pick(rng), pick(rng), pick(rng));
    rep.triples_checked = sample;
  }
  return rep;
}

SampledManifold::SampledManifold(Topology tag, std::string name, std::size_t dim,
                                 std::vector<double> coords, std::vector<double> metric,
                                 std::shared_ptr<const Chart> chart)
    : tag_(tag),
      name_(std::move(name)),
      dim_(dim),
      size_(dim == 0 ? 0 : coords.size() / dim),
      coords_(std::move(coords)),
      metric_(std::move(metric)),
      chart_(std::move(chart)) {
  if (size_ < 2) throw InvalidArgument("a sampled manifold needs at least two points");
  check_size(size_);
  if (metric_.size() != size_ * size_) throw InvalidArgument("base metric has the wrong shape");
  auto rep = check_metric(metric_, size_, size_ <= kExhaustiveMetricCheck ? 0 : 400000);
  if (!rep.ok())
    throw InvalidArgument(name_ + ": base metric violates the metric axioms (worst triangle excess " +
                          std::to_string(rep.worst_triangle_excess) + ")");
  mesh_scale_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t j = i + 1; j < size_; ++j) {
      mesh_scale_ = std::min(mesh_scale_, metric_[i * size_ + j]);
      diameter_ = std::max(diameter_, metric_[i * size_ + j]);
    }
}

std::pair<PointId, double> SampledManifold::snap_with_distance(std::span<const double> c) const {
  if (first_ && second_) {
    std::size_t k = first_->dim();
    auto [a, da] = first_->snap_with_distance(c.first(k));
    auto [b, db] = second_->snap_with_distance(c.subspan(k));
    return {product_id(*second_, a, b), std::max(da, db)};
  }
  Coords q = chart_->canonical(c);
  PointId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  auto consider = [&](PointId id) {
    double dd = chart_->distance(q, coords(id));
    if (dd < best_d || (dd == best_d && id < best)) {
      best_d = dd;
      best = id;
    }
  };
  auto cand = chart_->candidates(q);
  if (cand.empty()) {
    for (PointId id = 0; id < size_; ++id) consider(id);
  } else {
    for (PointId id : cand) consider(id);
  }
  return {best, best_d};
}

ManifoldPtr build_torus(std::size_t n, std::size_t dims) {
  if (dims < 1 || dims > 3) throw InvalidArgument("torus dimension must be 1, 2 or 3");
  if (n < 2) throw InvalidArgument("torus needs at least 2 points per dimension");
  std::size_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) {
    total *= n;
    check_size(total);
  }
  auto chart = std::make_shared<TorusChart>(n, dims);
  std::vector<double> coords(total * dims);
  for (std::size_t id = 0; id < total; ++id) {
    std::size_t rest = id;
    for (std::size_t d = dims; d-- > 0;) {
      coords[id * dims + d] = static_cast<double>(rest % n) / static_cast<double>(n);
      rest /= n;
    }
  }
  // From integer offsets, so congruent pairs get bit-identical distances.
  std::vector<double> metric(total * total);
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < total; ++j) {
      std::size_t a = i, b = j, sq = 0;
      for (std::size_t d = 0; d < dims; ++d) {
        std::size_t k = a % n > b % n ? a % n - b % n : b % n - a % n;
        k = std::min(k, n - k);
        sq += k * k;
        a /= n;
        b /= n;
      }
      metric[i * total + j] = std::sqrt(static_cast<double>(sq)) / static_cast<double>(n);
    }
  std::string name = "torus(" + std::to_string(n) + "," + std::to_string(dims) + ")";
  return std::make_shared<SampledManifold>(Topology::torus, name, dims, std::move(coords),
                                           std::move(metric), chart);
}

ManifoldPtr build_circle(std::size_t points) {
  auto t = build_torus(points, 1);
  std::vector<double> coords(t->size());
  for (PointId i = 0; i < t->size(); ++i) coords[i] = t->coords(i)[0];
  return std::make_shared<SampledManifold>(Topology::circle, "circle(" + std::to_string(points) + ")",
                                           1, std::move(coords), t->metric(), t->chart_ptr());
}

ManifoldPtr build_interval(std::size_t points) {
  if (points < 2) throw InvalidArgument("interval needs at least 2 points");
  check_size(points);
  std::vector<double> coords(points);
  for (std::size_t i = 0; i < points; ++i)
    coords[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  std::vector<double> metric(points * points);
  for (std::size_t i = 0; i < points; ++i)
    for (std::size_t j = 0; j < points; ++j)
      metric[i * points + j] = static_cast<double>(i > j ? i - j : j - i) / static_cast<double>(points - 1);
  return std::make_shared<SampledManifold>(Topology::interval,
                                           "interval(" + std::to_string(points) + ")", 1,
                                           std::move(coords), std::move(metric),
                                           std::make_shared<IntervalChart>(points));
}

namespace {

std::vector<std::array<double, 3>> icosphere(std::size_t level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<std::array<double, 3>> v = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<std::size_t, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  auto normalize = [](std::array<double, 3> p) {
    double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    return std::array<double, 3>{p[0] / n, p[1] / n, p[2] / n};
  };
  for (auto& p : v) p = normalize(p);
  for (std::size_t l = 0; l < level; ++l) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> mid;
    auto midpoint = [&](std::size_t a, std::size_t b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      std::array<double, 3> m{(v[a][0] + v[b][0]) / 2, (v[a][1] + v[b][1]) / 2, (v[a][2] + v[b][2]) / 2};
      v.push_back(normalize(m));
      mid.emplace(key, v.size() - 1);
      return v.size() - 1;
    };
    std::vector<std::array<std::size_t, 3>> next;
    next.reserve(f.size() * 4);
    for (auto [a, b, c] : f) {
      std::size_t ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    f.swap(next);
  }
  return v;
}

std::size_t icosphere_size(std::size_t level) {
  std::size_t p = 1;
  for (std::size_t l = 0; l < level; ++l) p *= 4;
  return 10 * p + 2;
}

}  // namespace

ManifoldPtr build_sphere(std::size_t level) {
  if (level > 4 || icosphere_size(level) > kPointBudget)
    throw BudgetExceeded("sphere subdivision level " + std::to_string(level) +
                         " produces more than 10^4 points");
  auto v = icosphere(level);
  std::size_t n = v.size();
  std::vector<double> coords;
  coords.reserve(3 * n);
  for (auto& p : v) coords.insert(coords.end(), p.begin(), p.end());
  std::vector<double> metric(n * n);
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d = i == j ? 0.0 : great_circle(v[i], v[j]);
      metric[i * n + j] = d;
      if (i != j) spacing = std::min(spacing, d);
    }
  return std::make_shared<SampledManifold>(Topology::sphere2, "sphere(" + std::to_string(level) + ")",
                                           3, std::move(coords), std::move(metric),
                                           std::make_shared<SphereChart>(spacing));
}

ManifoldPtr build_shell(std::size_t level, std::vector<double> radii) {
  if (radii.empty()) throw InvalidArgument("shell needs at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw InvalidArgument("shell radii must be positive and strictly ascending");
  if (level > 4) throw BudgetExceeded("sphere subdivision level above 4");
  check_size(icosphere_size(level) * radii.size());
  auto v = icosphere(level);
  std::vector<double> coords;
  for (double r : radii)
    for (auto& p : v) {
      coords.push_back(r * p[0]);
      coords.push_back(r * p[1]);
      coords.push_back(r * p[2]);
    }
  std::size_t n = coords.size() / 3;
  std::vector<double> metric(n * n);
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double dx = coords[3 * i] - coords[3 * j], dy = coords[3 * i + 1] - coords[3 * j + 1],
             dz = coords[3 * i + 2] - coords[3 * j + 2];
      double d = std::sqrt(dx * dx + dy * dy + dz * dz);
      metric[i * n + j] = d;
      if (i != j) spacing = std::min(spacing, d);
    }
  std::string name = "shell(" + std::to_string(level) + "," + std::to_string(radii.size()) + ")";
  return std::make_shared<SampledManifold>(Topology::shell, name, 3, std::move(coords),
                                           std::move(metric),
                                           std::make_shared<EuclideanChart>(3, spacing));
}

ManifoldPtr build_mapping_torus(std::size_t n, std::size_t levels, std::array<int, 4> a,
                                std::size_t radius) {
  if (n < 2 || levels < 2) throw InvalidArgument("mapping torus needs n >= 2 and levels >= 2");
  if (a[1] != a[2]) throw InvalidArgument("monodromy must be symmetric");
  if (a[0] * a[3] - a[1] * a[2] != 1) throw InvalidArgument("monodromy must have determinant 1");
  if (a[0] + a[3] <= 2) throw InvalidArgument("monodromy must be hyperbolic with positive eigenvalues");
  std::size_t total = n * n * levels;
  check_size(total);

  // A = l1 u u^T + l2 w w^T, so A^s = l1^s u u^T + l2^s w w^T.
  double tr = a[0] + a[3], half = tr / 2.0;
  double disc = std::sqrt(half * half - 1.0);
  double l1 = half + disc, l2 = half - disc;
  double ux = a[1], uy = l1 - a[0];
  double un = std::hypot(ux, uy);
  ux /= un;
  uy /= un;
  double wx = -uy, wy = ux;
  auto sol_length = [&](double s, double vx, double vy) {
    double p1 = std::pow(l1, s), p2 = std::pow(l2, s);
    double cu = ux * vx + uy * vy, cw = wx * vx + wy * vy;
    return std::hypot(p1 * cu, p2 * cw);
  };

  auto id_of = [&](std::size_t k, std::size_t i, std::size_t j) {
    return static_cast<PointId>((k * n + i) * n + j);
  };
  // Primitive lattice steps up to the given radius, one per +-pair, so that
  // stable-direction displacements have short fiber paths.
  std::vector<std::pair<long, long>> offsets;
  long reach = static_cast<long>(std::max<std::size_t>(1, std::min(radius, (n - 1) / 2)));
  for (long di = 0; di <= reach; ++di)
    for (long dj = -reach; dj <= reach; ++dj)
      if ((di > 0 || dj > 0) && std::gcd(di, dj) == 1) offsets.emplace_back(di, dj);
  std::vector<double> coords(total * 3);
  std::vector<std::vector<std::pair<PointId, double>>> adj(total);
  double h = 1.0 / static_cast<double>(n), hs = 1.0 / static_cast<double>(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    double s = static_cast<double>(k) * hs;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        PointId p = id_of(k, i, j);
        coords[3 * p] = static_cast<double>(i) * h;
        coords[3 * p + 1] = static_cast<double>(j) * h;
        coords[3 * p + 2] = s;
        auto link = [&](PointId q, double w) {
          adj[p].emplace_back(q, w);
          adj[q].emplace_back(p, w);
        };
        for (auto [di, dj] : offsets)
          link(id_of(k, (i + n + di) % n, (j + n + dj) % n), sol_length(s, di * h, dj * h));
        if (k + 1 < levels) {
          link(id_of(k + 1, i, j), hs);
        } else {
          std::size_t ni = static_cast<std::size_t>(a[0] * static_cast<long>(i) + a[1] * static_cast<long>(j)) % n;
          std::size_t nj = static_cast<std::size_t>(a[2] * static_cast<long>(i) + a[3] * static_cast<long>(j)) % n;
          link(id_of(0, ni, nj), hs);
        }
      }
  }

  std::vector<double> metric(total * total, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, PointId>;
  for (PointId src = 0; src < total; ++src) {
    double* dist = &metric[static_cast<std::size_t>(src) * total];
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (auto [v, w] : adj[u])
        if (d + w < dist[v]) {
          dist[v] = d + w;
          heap.emplace(dist[v], v);
        }
    }
  }
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = i + 1; j < total; ++j) {
      double m = std::min(metric[i * total + j], metric[j * total + i]);
      metric[i * total + j] = metric[j * total + i] = m;
    }
  std::string name = "mapping-torus(" + std::to_string(n) + "," + std::to_string(levels) + ")";
  return std::make_shared<SampledManifold>(Topology::mapping_torus, name, 3, std::move(coords),
                                           std::move(metric),
                                           std::make_shared<MappingTorusChart>(n, levels, a));
}

ManifoldPtr product(ManifoldPtr m1, ManifoldPtr m2, std::size_t budget) {
  if (!m1 || !m2) throw InvalidArgument("product of a null manifold");
  std::size_t n1 = m1->size(), n2 = m2->size(), total = n1 * n2;
  if (total > std::min(budget, kPointBudget))
    throw BudgetExceeded("product of " + std::to_string(n1) + " x " + std::to_string(n2) +
                         " points exceeds the point budget");
  std::size_t d1 = m1->dim(), d2 = m2->dim(), dim = d1 + d2;
  std::vector<double> coords(total * dim);
  std::vector<double> metric(total * total);
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b) {
      std::size_t id = a * n2 + b;
      auto ca = m1->coords(static_cast<PointId>(a));
      auto cb = m2->coords(static_cast<PointId>(b));
      std::copy(ca.begin(), ca.end(), coords.begin() + static_cast<long>(id * dim));
      std::copy(cb.begin(), cb.end(), coords.begin() + static_cast<long>(id * dim + d1));
    }
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b) {
      double* row = &metric[(a * n2 + b) * total];
      for (std::size_t a2 = 0; a2 < n1; ++a2) {
        double da = m1->distance(static_cast<PointId>(a), static_cast<PointId>(a2));
        for (std::size_t b2 = 0; b2 < n2; ++b2)
          row[a2 * n2 + b2] =
              std::max(da, m2->distance(static_cast<PointId>(b), static_cast<PointId>(b2)));
      }
    }
  auto chart = std::make_shared<ProductChart>(m1->chart_ptr(), m2->chart_ptr());
  auto out = std::make_shared<SampledManifold>(Topology::product,
                                               m1->name() + "x" + m2->name(), dim,
                                               std::move(coords), std::move(metric), chart);
  out->first_ = std::move(m1);
  out->second_ = std::move(m2);
  return out;
}

}  // namespace geoentropy

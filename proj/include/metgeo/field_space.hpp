#pragma once

// Semimetric fields over a weighted sample grid. The base manifold only
// enters through quadrature weights that sum to one; every global quantity
// is a weighted combination of per-sample fiber quantities.

#include <cmath>
#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "metgeo/error.hpp"
#include "metgeo/fiber_geodesics.hpp"

namespace metgeo {

struct Sample {
  std::string id;
  double weight = 0.0;
};

class SampleGrid {
 public:
  /// Weights must be positive and sum to 1 within 1e-12 unless `normalize`
  /// is set, in which case they are rescaled to sum to 1.
  static std::shared_ptr<const SampleGrid> make(std::vector<Sample> samples, std::size_t dim,
                                                bool normalize = false) {
    detail::require(dim >= 1, ErrorKind::InvalidInput, "grid dimension must be at least 1");
    detail::require(!samples.empty(), ErrorKind::InvalidInput, "grid has no samples");
    double total = 0.0;
    std::set<std::string> seen;
    for (const auto& s : samples) {
      detail::require(std::isfinite(s.weight) && s.weight > 0.0, ErrorKind::InvalidInput,
                      "sample weights must be positive");
      detail::require(seen.insert(s.id).second, ErrorKind::InvalidInput, "duplicate sample id");
      total += s.weight;
    }
    if (normalize) {
      for (auto& s : samples) s.weight /= total;
    } else if (std::abs(total - 1.0) > 1e-12) {
      detail::fail(ErrorKind::InvalidInput,
                   "sample weights sum to " + std::to_string(total) +
                       ", not 1 (use --normalize-weights to rescale)");
    }
    return std::shared_ptr<const SampleGrid>(new SampleGrid(std::move(samples), dim));
  }

  static std::shared_ptr<const SampleGrid> uniform(std::size_t count, std::size_t dim) {
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < count; ++i)
      samples.push_back({"x" + std::to_string(i), 1.0 / static_cast<double>(count)});
    return make(std::move(samples), dim, true);
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) detail::fail(ErrorKind::InvalidInput, "unknown sample id " + id);
    return it->second;
  }

  friend bool operator==(const SampleGrid& a, const SampleGrid& b) {
    if (a.dim_ != b.dim_ || a.samples_.size() != b.samples_.size()) return false;
    for (std::size_t i = 0; i < a.samples_.size(); ++i)
      if (a.samples_[i].id != b.samples_[i].id || a.samples_[i].weight != b.samples_[i].weight)
        return false;
    return true;
  }

 private:
  SampleGrid(std::vector<Sample> samples, std::size_t dim)
      : samples_(std::move(samples)), dim_(dim) {
    for (std::size_t i = 0; i < samples_.size(); ++i) index_.emplace(samples_[i].id, i);
  }

  std::vector<Sample> samples_;
  std::size_t dim_;
  std::unordered_map<std::string, std::size_t> index_;
};

using GridPtr = std::shared_ptr<const SampleGrid>;

/// One fiber point per grid sample, in grid order. Immutable.
class MetricField {
 public:
  MetricField(GridPtr grid, std::vector<FiberPoint> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    detail::require(grid_ != nullptr, ErrorKind::InvalidInput, "field has no grid");
    detail::require(values_.size() == grid_->size(), ErrorKind::InvalidInput,
                    "field must have exactly one value per sample");
    for (const auto& v : values_)
      detail::require(v.dim() == grid_->dim(), ErrorKind::InvalidInput,
                      "field value dimension differs from the grid dimension");
  }

  /// Same fiber point at every sample.
  static MetricField constant(GridPtr grid, const FiberPoint& p) {
    std::vector<FiberPoint> values(grid->size(), p);
    return MetricField(std::move(grid), std::move(values));
  }

  const GridPtr& grid() const noexcept { return grid_; }
  const std::vector<FiberPoint>& values() const noexcept { return values_; }
  const FiberPoint& operator[](std::size_t i) const { return values_[i]; }
  const FiberPoint& at(const std::string& id) const { return values_[grid_->index_of(id)]; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  GridPtr grid_;
  std::vector<FiberPoint> values_;
};

inline bool same_grid(const MetricField& a, const MetricField& b) {
  return a.grid() == b.grid() || *a.grid() == *b.grid();
}

namespace detail {
inline void require_same_grid(const MetricField& a, const MetricField& b) {
  require(same_grid(a, b), ErrorKind::InvalidInput, "fields live on different grids");
}
}  // namespace detail

/// Per-sample distances d_x(f0(x), f1(x)), in grid order.
inline std::vector<double> pointwise_distances(const MetricField& f0, const MetricField& f1) {
  detail::require_same_grid(f0, f1);
  std::vector<double> d(f0.size());
  for (std::size_t i = 0; i < f0.size(); ++i) d[i] = fiber_distance(f0[i], f1[i]);
  return d;
}

/// (sum_i w_i d_x(f0_i, f1_i)^2)^(1/2)
inline double field_distance(const MetricField& f0, const MetricField& f1) {
  const std::vector<double> d = pointwise_distances(f0, f1);
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) sum += (*f0.grid())[i].weight * d[i] * d[i];
  return std::sqrt(sum);
}

/// Minimal path between fields, evaluated sample by sample.
inline MetricField field_geodesic(const MetricField& f0, const MetricField& f1, double t) {
  detail::require_same_grid(f0, f1);
  if (t == 0.0) return f0;
  if (t == 1.0) return f1;
  std::vector<FiberPoint> values;
  values.reserve(f0.size());
  for (std::size_t i = 0; i < f0.size(); ++i) values.push_back(fiber_geodesic(f0[i], f1[i], t));
  return MetricField(f0.grid(), std::move(values));
}

/// Cone points at the same samples and equal tensors elsewhere.
inline bool equivalent(const MetricField& f0, const MetricField& f1) {
  if (!same_grid(f0, f1)) return false;
  for (std::size_t i = 0; i < f0.size(); ++i) {
    if (f0[i].is_cone() != f1[i].is_cone()) return false;
    if (!f0[i].is_cone() && !(f0[i].tensor().tensor() == f1[i].tensor().tensor())) return false;
  }
  return true;
}

struct FieldClassification {
  std::vector<GeodesicCase> cases;  // grid order
  std::vector<std::string> mask_N;  // both endpoints positive definite
  std::vector<std::string> mask_P;  // ... and a Riemannian geodesic exists
};

inline FieldClassification classify_fields(const MetricField& f0, const MetricField& f1) {
  detail::require_same_grid(f0, f1);
  FieldClassification out;
  out.cases.reserve(f0.size());
  for (std::size_t i = 0; i < f0.size(); ++i) {
    out.cases.push_back(classify(f0[i], f1[i]));
    const std::string& id = (*f0.grid())[i].id;
    const CaseTag tag = out.cases.back().tag;
    if (tag == CaseTag::Riemannian || tag == CaseTag::ConeConcatenation) out.mask_N.push_back(id);
    if (tag == CaseTag::Riemannian) out.mask_P.push_back(id);
  }
  return out;
}

/// A field path sampled at increasing times.
using FieldPath = std::vector<std::pair<double, MetricField>>;

namespace detail {

struct FieldPathRates {
  std::vector<double> dt;                  // per segment
  std::vector<std::vector<double>> rates;  // [sample][segment]
};

inline FieldPathRates field_path_rates(const FieldPath& path) {
  require(path.size() >= 2, ErrorKind::InvalidInput, "a path needs two samples");
  const MetricField& first = path.front().second;
  std::vector<double> times(path.size());
  for (std::size_t j = 0; j < path.size(); ++j) {
    times[j] = path[j].first;
    require(std::isfinite(times[j]), ErrorKind::InvalidInput, "non-finite path time");
    if (j > 0)
      require(times[j] > times[j - 1], ErrorKind::InvalidInput,
              "path times must be strictly increasing");
    require_same_grid(first, path[j].second);
  }
  FieldPathRates out;
  for (std::size_t j = 0; j + 1 < times.size(); ++j) out.dt.push_back(times[j + 1] - times[j]);
  out.rates.resize(first.size());
  std::vector<FiberPoint> column(path.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    for (std::size_t j = 0; j < path.size(); ++j) column[j] = path[j].second[i];
    out.rates[i] = segment_rates(times, column);
  }
  return out;
}

}  // namespace detail

/// Quadrature of the field speed (sum_i w_i ||g_t'(x_i)||^2)^(1/2).
/// Per-sample speeds are the same finite-difference speeds that path_length
/// uses, so the discrete form of  L(g)^2 >= sum_i w_i L(g(x_i))^2  holds
/// exactly by Minkowski's inequality.
inline double field_path_length(const FieldPath& path) {
  const detail::FieldPathRates fr = detail::field_path_rates(path);
  const SampleGrid& grid = *path.front().second.grid();
  double total = 0.0;
  for (std::size_t j = 0; j < fr.dt.size(); ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) sq += grid[i].weight * fr.rates[i][j] * fr.rates[i][j];
    total += fr.dt[j] * std::sqrt(sq);
  }
  return total;
}

/// Per-sample lengths of the sample trajectories of a field path.
inline std::vector<double> per_sample_path_lengths(const FieldPath& path) {
  const detail::FieldPathRates fr = detail::field_path_rates(path);
  std::vector<double> lengths(fr.rates.size(), 0.0);
  for (std::size_t i = 0; i < fr.rates.size(); ++i)
    for (std::size_t j = 0; j < fr.dt.size(); ++j) lengths[i] += fr.dt[j] * fr.rates[i][j];
  return lengths;
}

/// Samples the field geodesic at `count` uniform times.
inline FieldPath sample_field_geodesic(const MetricField& f0, const MetricField& f1,
                                       std::size_t count) {
  detail::require_same_grid(f0, f1);
  detail::require(count >= 2, ErrorKind::InvalidInput, "a path needs two samples");
  FieldPath path;
  for (std::size_t j = 0; j < count; ++j) {
    const double t = j + 1 == count ? 1.0 : static_cast<double>(j) / static_cast<double>(count - 1);
    path.emplace_back(t, field_geodesic(f0, f1, t));
  }
  return path;
}

}  // namespace metgeo

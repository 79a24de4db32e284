#include "transfer.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace phicgc::transfer {
namespace {

// Maps knot values to spline second derivatives, M = S y, on uniform knots
// with spacing h. Not-a-knot ends for an open knot set, cyclic closure for
// a periodic one (then the m knots are one period).
DenseMatrix second_derivative_map(Index m, double h, bool periodic) {
  DenseMatrix lhs = DenseMatrix::Zero(m, m);
  DenseMatrix rhs = DenseMatrix::Zero(m, m);
  const double c = 6.0 / (h * h);
  if (periodic) {
    for (Index i = 0; i < m; ++i) {
      const Index prev = (i + m - 1) % m;
      const Index next = (i + 1) % m;
      lhs(i, prev) += h;
      lhs(i, i) += 4.0 * h;
      lhs(i, next) += h;
      rhs(i, prev) += c * h;
      rhs(i, i) -= 2.0 * c * h;
      rhs(i, next) += c * h;
    }
  } else {
    require(m >= 4, ErrorCode::kInvalidArgument, "not-a-knot spline needs at least 4 knots");
    // Third derivative continuous at the second and penultimate knots.
    lhs(0, 0) = h;
    lhs(0, 1) = -2.0 * h;
    lhs(0, 2) = h;
    for (Index i = 1; i + 1 < m; ++i) {
      lhs(i, i - 1) = h;
      lhs(i, i) = 4.0 * h;
      lhs(i, i + 1) = h;
      rhs(i, i - 1) = c * h;
      rhs(i, i) = -2.0 * c * h;
      rhs(i, i + 1) = c * h;
    }
    lhs(m - 1, m - 3) = h;
    lhs(m - 1, m - 2) = -2.0 * h;
    lhs(m - 1, m - 1) = h;
  }
  return lhs.partialPivLu().solve(rhs);
}

// Weights (n_eval x m) of the piecewise-linear or cubic-spline interpolant
// on uniform knots t_j = t0 + j h evaluated at the given points. For the
// periodic case points are wrapped into [t0, t0 + m h).
DenseMatrix knot_weights(Index m, double t0, double h, bool periodic, InterpolationMethod method,
                         const std::vector<double>& points) {
  const Index n_eval = static_cast<Index>(points.size());
  DenseMatrix w = DenseMatrix::Zero(n_eval, m);
  DenseMatrix second;
  if (method == InterpolationMethod::kCubicSpline) second = second_derivative_map(m, h, periodic);
  const Index intervals = periodic ? m : m - 1;
  const double period = static_cast<double>(m) * h;
  for (Index r = 0; r < n_eval; ++r) {
    double x = points[r];
    if (periodic) {
      x = t0 + std::fmod(x - t0, period);
      if (x < t0) x += period;
    }
    Index i = static_cast<Index>(std::floor((x - t0) / h));
    i = std::clamp<Index>(i, 0, intervals - 1);
    const Index next = periodic ? (i + 1) % m : i + 1;
    const double a = (t0 + static_cast<double>(i + 1) * h - x) / h;
    const double b = 1.0 - a;
    w(r, i) += a;
    w(r, next) += b;
    if (method == InterpolationMethod::kCubicSpline) {
      const double ca = (a * a * a - a) * h * h / 6.0;
      const double cb = (b * b * b - b) * h * h / 6.0;
      w.row(r) += ca * second.row(i) + cb * second.row(next);
    }
  }
  return w;
}

// out = W in (or W^T in) along one axis of an x-fastest 3D array.
void apply_along_axis(const SparseMatrixCsr& w, bool transpose, const double* in, const std::array<Index, 3>& extents,
                      Index axis, double* out) {
  Index inner = 1;
  for (Index a = 0; a < axis; ++a) inner *= extents[a];
  Index outer = 1;
  for (Index a = axis + 1; a < 3; ++a) outer *= extents[a];
  const Index in_n = extents[axis];
  const Index out_n = transpose ? w.n_cols() : w.n_rows();
  const auto& off = w.row_offsets();
  const auto& col = w.col_indices();
  const auto& val = w.values();
  std::fill(out, out + outer * out_n * inner, 0.0);
  for (Index o = 0; o < outer; ++o) {
    const double* src = in + o * in_n * inner;
    double* dst = out + o * out_n * inner;
    for (Index r = 0; r < w.n_rows(); ++r) {
      for (Index p = off[r]; p < off[r + 1]; ++p) {
        const double wv = val[p];
        const Index c = col[p];
        const double* s = transpose ? src + r * inner : src + c * inner;
        double* d = transpose ? dst + c * inner : dst + r * inner;
        for (Index i = 0; i < inner; ++i) d[i] += wv * s[i];
      }
    }
  }
}

std::array<Index, 3> padded_extents(const GridSpec& g) {
  std::array<Index, 3> e{1, 1, 1};
  for (Index a = 0; a < g.dimensions(); ++a) e[a] = g.extents[a];
  return e;
}

}  // namespace

Index GridSpec::size() const {
  Index n = 1;
  for (Index e : extents) n *= e;
  return n;
}

void GridSpec::validate() const {
  require(extents.size() == 1 || extents.size() == 3, ErrorCode::kInvalidArgument, "grid must be 1D or 3D");
  for (Index e : extents) require(e >= 2, ErrorCode::kInvalidArgument, "grid extents must be at least 2");
}

GridSpec GridSpec::coarsened() const {
  GridSpec c = *this;
  for (Index& e : c.extents) {
    require(e % 2 == 0, ErrorCode::kInvalidArgument, "grid extent " + std::to_string(e) + " is not divisible by 2");
    e /= 2;
  }
  c.validate();
  return c;
}

SparseMatrixCsr interpolation_matrix(Index coarse_n, Index fine_n, Boundary boundary, InterpolationMethod method) {
  require(coarse_n >= 2 && fine_n >= 2, ErrorCode::kInvalidArgument, "interpolation needs at least 2 nodes per axis");
  const double hc = 1.0 / static_cast<double>(coarse_n + 1);
  const double hf = 1.0 / static_cast<double>(fine_n + 1);
  std::vector<double> points(static_cast<std::size_t>(fine_n));
  for (Index i = 0; i < fine_n; ++i) points[i] = static_cast<double>(i + 1) * hf;

  DenseMatrix w;
  if (boundary == Boundary::kPeriodic) {
    w = knot_weights(coarse_n, hc, hc, true, method, points);
  } else {
    // Knots 0, x~_1..x~_n, 1; the boundary knots carry zero values.
    const DenseMatrix full = knot_weights(coarse_n + 2, 0.0, hc, false, method, points);
    w = full.middleCols(1, coarse_n);
  }
  return SparseMatrixCsr::from_dense(w);
}

TransferOperator TransferOperator::build(const GridSpec& coarse, const GridSpec& fine, InterpolationMethod method,
                                         Scaling scaling) {
  coarse.validate();
  fine.validate();
  require(coarse.boundary == fine.boundary, ErrorCode::kUnsupported, "transfer: boundary types differ");
  require(coarse.dimensions() == fine.dimensions(), ErrorCode::kDimensionMismatch, "transfer: grid ranks differ");
  TransferOperator q;
  q.coarse_ = coarse;
  q.fine_ = fine;
  q.method_ = method;
  q.scaling_ = scaling;
  for (Index a = 0; a < fine.dimensions(); ++a) {
    require(fine.extents[a] == 2 * coarse.extents[a], ErrorCode::kDimensionMismatch,
            "transfer: fine extent must be twice the coarse extent on every axis");
    q.axes_.push_back(interpolation_matrix(coarse.extents[a], fine.extents[a], fine.boundary, method));
    if (scaling == Scaling::kBalanced) q.scale_ *= std::sqrt(fine.spacing(a) / coarse.spacing(a));
  }
  return q;
}

TransferOperator TransferOperator::identity(const GridSpec& grid) {
  grid.validate();
  TransferOperator q;
  q.coarse_ = grid;
  q.fine_ = grid;
  q.scaling_ = Scaling::kInterpolation;
  for (Index a = 0; a < grid.dimensions(); ++a) q.axes_.push_back(SparseMatrixCsr::identity(grid.extents[a]));
  return q;
}

Vector TransferOperator::prolong(const Vector& coarse) const {
  require(coarse.size() == coarse_size(), ErrorCode::kDimensionMismatch, "prolong: coarse vector length mismatch");
  std::array<Index, 3> ext = padded_extents(coarse_);
  Vector current = coarse;
  for (Index a = 0; a < fine_.dimensions(); ++a) {
    std::array<Index, 3> next_ext = ext;
    next_ext[a] = fine_.extents[a];
    Vector next(next_ext[0] * next_ext[1] * next_ext[2]);
    apply_along_axis(axes_[a], false, current.data(), ext, a, next.data());
    current = std::move(next);
    ext = next_ext;
  }
  if (scale_ != 1.0) current *= scale_;
  return current;
}

Vector TransferOperator::restrict(const Vector& fine) const {
  require(fine.size() == fine_size(), ErrorCode::kDimensionMismatch, "restrict: fine vector length mismatch");
  std::array<Index, 3> ext = padded_extents(fine_);
  Vector current = fine;
  for (Index a = fine_.dimensions() - 1; a >= 0; --a) {
    std::array<Index, 3> next_ext = ext;
    next_ext[a] = coarse_.extents[a];
    Vector next(next_ext[0] * next_ext[1] * next_ext[2]);
    apply_along_axis(axes_[a], true, current.data(), ext, a, next.data());
    current = std::move(next);
    ext = next_ext;
  }
  if (scale_ != 1.0) current *= scale_;
  return current;
}

double TransferOperator::norm_estimate() const {
  std::lock_guard<std::mutex> lock(norm_cache_->mutex);
  if (!norm_cache_->value) {
    double norm = scale_;
    for (const SparseMatrixCsr& p : axes_) {
      const auto normal = [&p](const Vector& x) {
        Vector px(p.n_rows());
        p.multiply(x, px);
        Vector out(p.n_cols());
        p.multiply_transpose(px, out);
        return out;
      };
      norm *= largest_singular_value(p.n_cols(), normal, 1e-5);
    }
    norm_cache_->value = norm;
  }
  return *norm_cache_->value;
}

VectorSplit split_vector(const TransferOperator& q, const Vector& gbar) {
  require(gbar.size() == q.fine_size(), ErrorCode::kDimensionMismatch, "split_vector: fine vector length mismatch");
  VectorSplit s;
  s.coarse = q.restrict(gbar);
  s.remainder = gbar - q.prolong(s.coarse);
  s.beta = gbar.norm();
  s.beta_coarse = s.coarse.norm();
  s.beta_remainder = s.remainder.norm();
  return s;
}

double prolongation_norm_estimate(const TransferOperator& q) { return q.norm_estimate(); }

double largest_singular_value(Index n, const std::function<Vector(const Vector&)>& normal_map, double rel_tol,
                              int max_iterations) {
  require(n >= 1, ErrorCode::kInvalidArgument, "power iteration on an empty space");
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = dist(rng);
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Vector y = normal_map(x);
    const double next = x.dot(y);
    const double ynorm = y.norm();
    if (ynorm == 0.0) return 0.0;
    x = y / ynorm;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace phicgc::transfer

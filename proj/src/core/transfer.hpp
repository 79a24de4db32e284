#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "operators.hpp"

namespace phicgc::transfer {

enum class Boundary { kPeriodic, kDirichlet };
enum class InterpolationMethod { kLinear, kCubicSpline };

// How Q relates to the per-axis interpolation matrices P_axis.
//  kInterpolation: Q = P_x (x) P_y (x) P_z, plain interpolation.
//  kBalanced:      Q = c P with c = prod_axis sqrt(h_fine / h_coarse), so
//                  that Q^T Q ~ I on smooth coarse vectors and Q Q^T
//                  approximately reproduces smooth fine vectors.
enum class Scaling { kInterpolation, kBalanced };

// Uniform grid with nodes x_i = i / (n + 1), i = 1..n on each axis.
// Unknowns are ordered x fastest, then y, then z.
struct GridSpec {
  std::vector<Index> extents;
  Boundary boundary = Boundary::kPeriodic;

  Index dimensions() const { return static_cast<Index>(extents.size()); }
  Index size() const;
  double spacing(Index axis) const { return 1.0 / static_cast<double>(extents.at(axis) + 1); }
  // Coordinate of zero-based node i on the given axis.
  double coordinate(Index axis, Index i) const { return static_cast<double>(i + 1) * spacing(axis); }
  void validate() const;
  // Extents divided by 2 on every axis.
  GridSpec coarsened() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// One-dimensional interpolation matrix (fine_n x coarse_n) from coarse nodes
// to fine nodes under the given boundary treatment. Dirichlet axes use the
// augmented knot set {0, coarse nodes, 1} with zero boundary values and
// not-a-knot spline end conditions; periodic axes close the node set with
// period n_coarse * h_coarse.
SparseMatrixCsr interpolation_matrix(Index coarse_n, Index fine_n, Boundary boundary, InterpolationMethod method);

// Prolongation Q from a coarse grid to a fine grid and its exact transpose.
// The 3D operator is the tensor product of per-axis matrices and is never
// assembled.
class TransferOperator {
 public:
  static TransferOperator build(const GridSpec& coarse, const GridSpec& fine, InterpolationMethod method,
                                Scaling scaling = Scaling::kBalanced);
  // Q = I on a single grid.
  static TransferOperator identity(const GridSpec& grid);

  const GridSpec& fine() const { return fine_; }
  const GridSpec& coarse() const { return coarse_; }
  InterpolationMethod method() const { return method_; }
  Scaling scaling() const { return scaling_; }
  double scale() const { return scale_; }
  const SparseMatrixCsr& axis_matrix(Index axis) const { return axes_.at(axis); }
  Index fine_size() const { return fine_.size(); }
  Index coarse_size() const { return coarse_.size(); }

  Vector prolong(const Vector& coarse) const;
  Vector restrict(const Vector& fine) const;

  // ||Q||_2, by power iteration on Q_axis^T Q_axis per axis (the norm of a
  // Kronecker product is the product of the factor norms). Cached.
  double norm_estimate() const;

 private:
  TransferOperator() = default;

  struct NormCache {
    std::mutex mutex;
    std::optional<double> value;
  };

  GridSpec coarse_;
  GridSpec fine_;
  InterpolationMethod method_ = InterpolationMethod::kLinear;
  Scaling scaling_ = Scaling::kBalanced;
  double scale_ = 1.0;
  std::vector<SparseMatrixCsr> axes_;
  std::shared_ptr<NormCache> norm_cache_ = std::make_shared<NormCache>();
};

struct VectorSplit {
  Vector coarse;     // g~ = Q^T gbar
  Vector remainder;  // g^ = gbar - Q g~
  double beta = 0.0;
  double beta_coarse = 0.0;
  double beta_remainder = 0.0;
};

VectorSplit split_vector(const TransferOperator& q, const Vector& gbar);

double prolongation_norm_estimate(const TransferOperator& q);

// Power iteration for the largest singular value of a map given by its
// normal-equation operator x -> M^T M x. Returns sqrt(lambda_max).
double largest_singular_value(Index n, const std::function<Vector(const Vector&)>& normal_map, double rel_tol,
                              int max_iterations = 1000);

}  // namespace phicgc::transfer

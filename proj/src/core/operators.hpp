#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace phicgc {

using Index = std::ptrdiff_t;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using ConstVectorRef = Eigen::Ref<const Vector>;
using VectorRef = Eigen::Ref<Vector>;

// Compressed sparse row storage. Column indices are strictly increasing
// within each row; construction validates this.
class SparseMatrixCsr {
 public:
  SparseMatrixCsr() = default;
  SparseMatrixCsr(Index n_rows, Index n_cols, std::vector<Index> row_offsets,
                  std::vector<Index> col_indices, std::vector<double> values);

  struct Triplet {
    Index row;
    Index col;
    double value;
  };
  // Duplicates are summed; explicit zeros are kept only if keep_zeros is set.
  static SparseMatrixCsr from_triplets(Index n_rows, Index n_cols, std::vector<Triplet> entries,
                                       bool keep_zeros = false);
  static SparseMatrixCsr from_dense(const DenseMatrix& dense, double drop_below = 0.0);
  static SparseMatrixCsr identity(Index n);

  Index n_rows() const { return n_rows_; }
  Index n_cols() const { return n_cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }
  const std::vector<Index>& row_offsets() const { return row_offsets_; }
  const std::vector<Index>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  void multiply(ConstVectorRef x, VectorRef y) const;
  void multiply_transpose(ConstVectorRef x, VectorRef y) const;
  double one_norm() const;
  bool is_symmetric(double tol = 0.0) const;
  DenseMatrix to_dense() const;

 private:
  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<double> values_;
};

SparseMatrixCsr read_matrix_market(const std::string& path);
void write_matrix_market(const SparseMatrixCsr& m, const std::string& path);

// Square linear map x -> Ax with an application counter. Everything except
// the counter is immutable after construction.
class LinearOperator {
 public:
  enum class Kind { kCsr, kMatrixFree, kComposed };

  virtual ~LinearOperator() = default;
  LinearOperator(const LinearOperator&) = delete;
  LinearOperator& operator=(const LinearOperator&) = delete;

  Index dim() const { return dim_; }
  Kind kind() const { return kind_; }
  bool symmetric() const { return symmetric_; }
  std::optional<double> omega_hint() const { return omega_hint_; }

  // y = A x. Counts one matvec.
  void apply(ConstVectorRef x, VectorRef y) const;
  Vector apply(const Vector& x) const;
  // y = A^T x. Counts one matvec.
  void apply_transpose(ConstVectorRef x, VectorRef y) const;

  // Max absolute column sum. Throws kEstimatorUnavailable for opaque maps.
  virtual double one_norm() const;

  std::uint64_t matvec_count() const { return matvecs_.load(std::memory_order_relaxed); }
  // Returns the accumulated count and sets it to zero.
  std::uint64_t reset_matvec_count() const { return matvecs_.exchange(0, std::memory_order_relaxed); }

 protected:
  LinearOperator(Index dim, Kind kind, bool symmetric, std::optional<double> omega_hint);

  virtual void do_apply(ConstVectorRef x, VectorRef y) const = 0;
  // Default handles the symmetric case and otherwise throws kUnsupported.
  virtual void do_apply_transpose(ConstVectorRef x, VectorRef y) const;

 private:
  Index dim_;
  Kind kind_;
  bool symmetric_;
  std::optional<double> omega_hint_;
  mutable std::atomic<std::uint64_t> matvecs_{0};
};

class CsrOperator final : public LinearOperator {
 public:
  explicit CsrOperator(SparseMatrixCsr matrix, std::optional<double> omega_hint = std::nullopt);
  CsrOperator(SparseMatrixCsr matrix, bool symmetric, std::optional<double> omega_hint);

  const SparseMatrixCsr& matrix() const { return matrix_; }
  double one_norm() const override { return matrix_.one_norm(); }

 protected:
  void do_apply(ConstVectorRef x, VectorRef y) const override;
  void do_apply_transpose(ConstVectorRef x, VectorRef y) const override;

 private:
  SparseMatrixCsr matrix_;
};

// Wraps a callable. one_norm is available only if a column-sum estimator is
// supplied; the transpose only if a transpose callable is supplied or the
// map is declared symmetric.
class MatrixFreeOperator final : public LinearOperator {
 public:
  using ApplyFn = std::function<void(ConstVectorRef, VectorRef)>;

  MatrixFreeOperator(Index dim, ApplyFn apply, bool symmetric,
                     std::optional<double> omega_hint = std::nullopt,
                     std::function<double()> column_sum_norm = {}, ApplyFn apply_transpose = {});

  double one_norm() const override;

 protected:
  void do_apply(ConstVectorRef x, VectorRef y) const override;
  void do_apply_transpose(ConstVectorRef x, VectorRef y) const override;

 private:
  ApplyFn apply_;
  ApplyFn apply_transpose_;
  std::function<double()> column_sum_norm_;
};

class ZeroOperator final : public LinearOperator {
 public:
  explicit ZeroOperator(Index dim) : LinearOperator(dim, Kind::kMatrixFree, true, 0.0) {}
  double one_norm() const override { return 0.0; }

 protected:
  void do_apply(ConstVectorRef, VectorRef y) const override { y.setZero(); }
};

// Applies op to every unit vector. Counts dim() matvecs.
DenseMatrix materialize(const LinearOperator& op);

}  // namespace phicgc

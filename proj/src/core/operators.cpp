#include "operators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "parallel.hpp"

namespace phicgc {

SparseMatrixCsr::SparseMatrixCsr(Index n_rows, Index n_cols, std::vector<Index> row_offsets,
                                 std::vector<Index> col_indices, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  require(n_rows >= 0 && n_cols >= 0, ErrorCode::kInvalidArgument, "csr: negative extent");
  require(static_cast<Index>(row_offsets_.size()) == n_rows + 1, ErrorCode::kInvalidArgument,
          "csr: row_offsets must have n_rows+1 entries");
  require(row_offsets_.front() == 0, ErrorCode::kInvalidArgument, "csr: row_offsets[0] must be 0");
  require(col_indices_.size() == values_.size(), ErrorCode::kInvalidArgument,
          "csr: col_indices and values differ in length");
  require(row_offsets_.back() == static_cast<Index>(values_.size()), ErrorCode::kInvalidArgument,
          "csr: row_offsets[n_rows] must equal the number of stored entries");
  for (Index r = 0; r < n_rows_; ++r) {
    require(row_offsets_[r] <= row_offsets_[r + 1], ErrorCode::kInvalidArgument,
            "csr: row_offsets must be nondecreasing");
    for (Index p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      const Index c = col_indices_[p];
      require(c >= 0 && c < n_cols_, ErrorCode::kInvalidArgument, "csr: column index out of range");
      require(p == row_offsets_[r] || col_indices_[p - 1] < c, ErrorCode::kInvalidArgument,
              "csr: column indices must be strictly increasing within a row");
    }
  }
}

SparseMatrixCsr SparseMatrixCsr::from_triplets(Index n_rows, Index n_cols, std::vector<Triplet> entries,
                                               bool keep_zeros) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Index> offsets(static_cast<std::size_t>(n_rows) + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(entries.size());
  vals.reserve(entries.size());
  std::size_t i = 0;
  while (i < entries.size()) {
    const Triplet& t = entries[i];
    require(t.row >= 0 && t.row < n_rows && t.col >= 0 && t.col < n_cols, ErrorCode::kInvalidArgument,
            "csr: triplet index out of range");
    double sum = 0.0;
    std::size_t j = i;
    while (j < entries.size() && entries[j].row == t.row && entries[j].col == t.col) sum += entries[j++].value;
    if (keep_zeros || sum != 0.0) {
      cols.push_back(t.col);
      vals.push_back(sum);
      ++offsets[static_cast<std::size_t>(t.row) + 1];
    }
    i = j;
  }
  for (Index r = 0; r < n_rows; ++r) offsets[r + 1] += offsets[r];
  return SparseMatrixCsr(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrixCsr SparseMatrixCsr::from_dense(const DenseMatrix& dense, double drop_below) {
  std::vector<Index> offsets{0};
  std::vector<Index> cols;
  std::vector<double> vals;
  for (Index r = 0; r < dense.rows(); ++r) {
    for (Index c = 0; c < dense.cols(); ++c) {
      const double v = dense(r, c);
      if (v != 0.0 && std::abs(v) >= drop_below) {
        cols.push_back(c);
        vals.push_back(v);
      }
    }
    offsets.push_back(static_cast<Index>(cols.size()));
  }
  return SparseMatrixCsr(dense.rows(), dense.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrixCsr SparseMatrixCsr::identity(Index n) {
  std::vector<Index> offsets(static_cast<std::size_t>(n) + 1);
  std::vector<Index> cols(static_cast<std::size_t>(n));
  for (Index i = 0; i <= n; ++i) offsets[i] = i;
  for (Index i = 0; i < n; ++i) cols[i] = i;
  return SparseMatrixCsr(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

void SparseMatrixCsr::multiply(ConstVectorRef x, VectorRef y) const {
  require(x.size() == n_cols_ && y.size() == n_rows_, ErrorCode::kDimensionMismatch, "csr multiply: size mismatch");
  const Index* off = row_offsets_.data();
  const Index* col = col_indices_.data();
  const double* val = values_.data();
#pragma omp parallel for num_threads(thread_cap()) schedule(static) if (n_rows_ > 20000)
  for (Index r = 0; r < n_rows_; ++r) {
    double sum = 0.0;
    for (Index p = off[r]; p < off[r + 1]; ++p) sum += val[p] * x[col[p]];
    y[r] = sum;
  }
}

void SparseMatrixCsr::multiply_transpose(ConstVectorRef x, VectorRef y) const {
  require(x.size() == n_rows_ && y.size() == n_cols_, ErrorCode::kDimensionMismatch,
          "csr multiply_transpose: size mismatch");
  y.setZero();
  for (Index r = 0; r < n_rows_; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (Index p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) y[col_indices_[p]] += values_[p] * xr;
  }
}

double SparseMatrixCsr::one_norm() const {
  std::vector<double> sums(static_cast<std::size_t>(n_cols_), 0.0);
  for (std::size_t p = 0; p < values_.size(); ++p) sums[col_indices_[p]] += std::abs(values_[p]);
  return sums.empty() ? 0.0 : *std::max_element(sums.begin(), sums.end());
}

bool SparseMatrixCsr::is_symmetric(double tol) const {
  if (n_rows_ != n_cols_) return false;
  // Entries of A - A^T.
  std::vector<Triplet> t;
  t.reserve(values_.size() * 2);
  for (Index r = 0; r < n_rows_; ++r)
    for (Index p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      t.push_back({r, col_indices_[p], values_[p]});
      t.push_back({col_indices_[p], r, -values_[p]});
    }
  const SparseMatrixCsr diff = from_triplets(n_rows_, n_cols_, std::move(t));
  for (double v : diff.values())
    if (std::abs(v) > tol) return false;
  return true;
}

DenseMatrix SparseMatrixCsr::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(n_rows_, n_cols_);
  for (Index r = 0; r < n_rows_; ++r)
    for (Index p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) d(r, col_indices_[p]) = values_[p];
  return d;
}

SparseMatrixCsr read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open matrix market file: " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kIo, "empty matrix market file: " + path);
  std::string banner, object, format, field, symmetry;
  {
    std::istringstream hs(line);
    hs >> banner >> object >> format >> field >> symmetry;
  }
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };
  require(banner == "%%MatrixMarket" && lower(object) == "matrix" && lower(format) == "coordinate",
          ErrorCode::kIo, "only MatrixMarket coordinate matrices are supported");
  field = lower(field);
  symmetry = lower(symmetry);
  require(field == "real" || field == "integer" || field == "pattern", ErrorCode::kIo,
          "unsupported MatrixMarket field: " + field);
  require(symmetry == "general" || symmetry == "symmetric", ErrorCode::kIo,
          "unsupported MatrixMarket symmetry: " + symmetry);
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  Index rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream ss(line);
    require(static_cast<bool>(ss >> rows >> cols >> nnz), ErrorCode::kIo, "bad MatrixMarket size line");
  }
  std::vector<SparseMatrixCsr::Triplet> t;
  t.reserve(static_cast<std::size_t>(symmetry == "symmetric" ? 2 * nnz : nnz));
  for (Index k = 0; k < nnz; ++k) {
    Index r = 0, c = 0;
    double v = 1.0;
    require(static_cast<bool>(in >> r >> c), ErrorCode::kIo, "truncated MatrixMarket entries");
    if (field != "pattern") require(static_cast<bool>(in >> v), ErrorCode::kIo, "truncated MatrixMarket entries");
    t.push_back({r - 1, c - 1, v});
    if (symmetry == "symmetric" && r != c) t.push_back({c - 1, r - 1, v});
  }
  return SparseMatrixCsr::from_triplets(rows, cols, std::move(t), true);
}

void write_matrix_market(const SparseMatrixCsr& m, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::kIo, "cannot write matrix market file: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.n_rows() << ' ' << m.n_cols() << ' ' << m.nnz() << '\n';
  out << std::setprecision(17);
  for (Index r = 0; r < m.n_rows(); ++r)
    for (Index p = m.row_offsets()[r]; p < m.row_offsets()[r + 1]; ++p)
      out << r + 1 << ' ' << m.col_indices()[p] + 1 << ' ' << m.values()[p] << '\n';
  require(out.good(), ErrorCode::kIo, "write failed: " + path);
}

LinearOperator::LinearOperator(Index dim, Kind kind, bool symmetric, std::optional<double> omega_hint)
    : dim_(dim), kind_(kind), symmetric_(symmetric), omega_hint_(omega_hint) {
  require(dim >= 0, ErrorCode::kInvalidArgument, "operator dimension must be nonnegative");
  require(!omega_hint || *omega_hint >= 0.0, ErrorCode::kInvalidArgument, "omega hint must be nonnegative");
}

void LinearOperator::apply(ConstVectorRef x, VectorRef y) const {
  require(x.size() == dim_ && y.size() == dim_, ErrorCode::kDimensionMismatch,
          "apply: expected vectors of length " + std::to_string(dim_) + ", got " + std::to_string(x.size()));
  matvecs_.fetch_add(1, std::memory_order_relaxed);
  do_apply(x, y);
}

Vector LinearOperator::apply(const Vector& x) const {
  Vector y(dim_);
  apply(x, y);
  return y;
}

void LinearOperator::apply_transpose(ConstVectorRef x, VectorRef y) const {
  require(x.size() == dim_ && y.size() == dim_, ErrorCode::kDimensionMismatch, "apply_transpose: size mismatch");
  matvecs_.fetch_add(1, std::memory_order_relaxed);
  do_apply_transpose(x, y);
}

double LinearOperator::one_norm() const {
  fail(ErrorCode::kEstimatorUnavailable, "one_norm: no column-sum estimator for this operator");
}

void LinearOperator::do_apply_transpose(ConstVectorRef x, VectorRef y) const {
  require(symmetric_, ErrorCode::kUnsupported, "transpose is not available for this operator");
  do_apply(x, y);
}

CsrOperator::CsrOperator(SparseMatrixCsr matrix, std::optional<double> omega_hint)
    : CsrOperator(std::move(matrix), false, omega_hint) {}

CsrOperator::CsrOperator(SparseMatrixCsr matrix, bool symmetric, std::optional<double> omega_hint)
    : LinearOperator(matrix.n_rows(), Kind::kCsr, symmetric || matrix.is_symmetric(), omega_hint),
      matrix_(std::move(matrix)) {
  require(matrix_.n_rows() == matrix_.n_cols(), ErrorCode::kInvalidArgument, "operator matrix must be square");
}

void CsrOperator::do_apply(ConstVectorRef x, VectorRef y) const { matrix_.multiply(x, y); }

void CsrOperator::do_apply_transpose(ConstVectorRef x, VectorRef y) const { matrix_.multiply_transpose(x, y); }

MatrixFreeOperator::MatrixFreeOperator(Index dim, ApplyFn apply, bool symmetric, std::optional<double> omega_hint,
                                       std::function<double()> column_sum_norm, ApplyFn apply_transpose)
    : LinearOperator(dim, Kind::kMatrixFree, symmetric, omega_hint),
      apply_(std::move(apply)),
      apply_transpose_(std::move(apply_transpose)),
      column_sum_norm_(std::move(column_sum_norm)) {
  require(static_cast<bool>(apply_), ErrorCode::kInvalidArgument, "matrix-free operator needs an apply callable");
}

double MatrixFreeOperator::one_norm() const {
  if (!column_sum_norm_) return LinearOperator::one_norm();
  return column_sum_norm_();
}

void MatrixFreeOperator::do_apply(ConstVectorRef x, VectorRef y) const { apply_(x, y); }

void MatrixFreeOperator::do_apply_transpose(ConstVectorRef x, VectorRef y) const {
  if (apply_transpose_) {
    apply_transpose_(x, y);
    return;
  }
  LinearOperator::do_apply_transpose(x, y);
}

DenseMatrix materialize(const LinearOperator& op) {
  const Index n = op.dim();
  DenseMatrix d(n, n);
  Vector e = Vector::Zero(n);
  Vector col(n);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    d.col(j) = col;
    e[j] = 0.0;
  }
  return d;
}

}  // namespace phicgc

#include "smallmat.hpp"

#include <Eigen/LU>

#include <array>
#include <cmath>

namespace phicgc::smallmat {
namespace {

// Backward-error thresholds for Pade degrees 3, 5, 7, 9, 13 (Higham 2005).
constexpr std::array<double, 5> kTheta = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                                          2.097847961257068e0, 5.371920351148152e0};

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                           2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr std::array<double, 14> kPade13 = {64764752532480000.0,
                                            32382376266240000.0,
                                            7771770303897600.0,
                                            1187353796428800.0,
                                            129060195264000.0,
                                            10559470521600.0,
                                            670442572800.0,
                                            33522128640.0,
                                            1323241920.0,
                                            40840800.0,
                                            960960.0,
                                            16380.0,
                                            182.0,
                                            1.0};

double one_norm(const DenseMatrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

void check_finite(const DenseMatrix& m, const char* where) {
  require(m.allFinite(), ErrorCode::kNumericalRange, std::string("expm: non-finite values in ") + where);
}

// Low-degree approximant: U = A * sum odd, V = sum even, powers built up to
// the required degree.
template <std::size_t N>
DenseMatrix pade_low(const DenseMatrix& a, const std::array<double, N>& b) {
  const Index n = a.rows();
  const DenseMatrix ident = DenseMatrix::Identity(n, n);
  const DenseMatrix a2 = a * a;
  DenseMatrix power = ident;
  DenseMatrix u_inner = b[1] * ident;
  DenseMatrix v = b[0] * ident;
  for (std::size_t j = 2; j < N; j += 2) {
    power = power * a2;
    v += b[j] * power;
    if (j + 1 < N) u_inner += b[j + 1] * power;
  }
  const DenseMatrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

DenseMatrix pade13(const DenseMatrix& a) {
  const auto& b = kPade13;
  const Index n = a.rows();
  const DenseMatrix ident = DenseMatrix::Identity(n, n);
  const DenseMatrix a2 = a * a;
  const DenseMatrix a4 = a2 * a2;
  const DenseMatrix a6 = a4 * a2;
  const DenseMatrix u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const DenseMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

DenseMatrix expm(const DenseMatrix& m, Index size_cap) {
  require(m.rows() == m.cols(), ErrorCode::kDimensionMismatch, "expm: matrix must be square");
  require(m.rows() <= size_cap, ErrorCode::kInvalidArgument,
          "expm: dimension " + std::to_string(m.rows()) + " exceeds cap " + std::to_string(size_cap));
  check_finite(m, "input");
  const Index n = m.rows();
  if (n == 0) return DenseMatrix(0, 0);

  const double norm = one_norm(m);
  DenseMatrix result;
  if (norm <= kTheta[0]) {
    result = pade_low(m, kPade3);
  } else if (norm <= kTheta[1]) {
    result = pade_low(m, kPade5);
  } else if (norm <= kTheta[2]) {
    result = pade_low(m, kPade7);
  } else if (norm <= kTheta[3]) {
    result = pade_low(m, kPade9);
  } else {
    int squarings = 0;
    if (norm > kTheta[4]) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta[4])));
    require(squarings < 1100, ErrorCode::kNumericalRange, "expm: norm too large");
    result = pade13(std::ldexp(1.0, -squarings) * m);
    check_finite(result, "Pade approximant");
    for (int s = 0; s < squarings; ++s) result = result * result;
  }
  check_finite(result, "result");
  return result;
}

double phi_scalar(double z) {
  require(std::isfinite(z), ErrorCode::kInvalidArgument, "phi_scalar: argument must be finite");
  if (std::abs(z) < 1e-4) {
    // 1 + z/2 + z^2/6 + z^3/24 + z^4/120
    return 1.0 + z * (1.0 / 2.0 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
  }
  return std::expm1(z) / z;
}

Vector phi_action(const DenseMatrix& h, double t, const Vector& b, Index size_cap) {
  require(h.rows() == h.cols(), ErrorCode::kDimensionMismatch, "phi_action: H must be square");
  require(b.size() == h.rows(), ErrorCode::kDimensionMismatch, "phi_action: right-hand side length mismatch");
  require(t >= 0.0, ErrorCode::kInvalidArgument, "phi_action: t must be nonnegative");
  const Index k = h.rows();
  if (t == 0.0) return Vector::Zero(k);
  DenseMatrix aug = DenseMatrix::Zero(k + 1, k + 1);
  aug.topLeftCorner(k, k) = -t * h;
  aug.col(k).head(k) = t * b;
  const DenseMatrix e = expm(aug, size_cap + 1);
  return e.col(k).head(k);
}

Vector phi_action(const DenseMatrix& h, double t, double beta, Index size_cap) {
  require(beta >= 0.0, ErrorCode::kInvalidArgument, "phi_action: beta must be nonnegative");
  Vector b = Vector::Zero(h.rows());
  if (b.size() > 0) b[0] = beta;
  return phi_action(h, t, b, size_cap);
}

}  // namespace phicgc::smallmat

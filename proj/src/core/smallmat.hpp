#pragma once

#include "operators.hpp"

// Dense kernels for the projected (small) problems.
namespace phicgc::smallmat {

inline constexpr Index kDefaultSizeCap = 256;

// exp(M) by scaling and squaring with diagonal Pade approximants (degrees
// 3..13). Throws kNumericalRange if any intermediate becomes non-finite.
DenseMatrix expm(const DenseMatrix& m, Index size_cap = kDefaultSizeCap);

// phi(z) = (e^z - 1)/z, phi(0) = 1.
double phi_scalar(double z);

// u = t phi(-t H) beta e_1, read off the last column of
// exp([[-tH, t beta e_1], [0, 0]]).
Vector phi_action(const DenseMatrix& h, double t, double beta, Index size_cap = kDefaultSizeCap);

// Same, for an arbitrary right-hand side: t phi(-t H) b.
Vector phi_action(const DenseMatrix& h, double t, const Vector& b, Index size_cap = kDefaultSizeCap);

}  // namespace phicgc::smallmat

#include "vdwmech/linalg.hpp"

#include <lapacke.h>

#include <sstream>

#include "vdwmech/errors.hpp"

namespace vdwmech {

SymEigen sym_eigen(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InvalidInput("sym_eigen: matrix is not square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SymEigen out;
  if (n == 0) return out;
  if (!a.allFinite()) throw InvalidInput("sym_eigen: matrix has non-finite entries");

  const double scale = a.cwiseAbs().maxCoeff();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(scale, 1e-300))
    throw InvalidInput("sym_eigen: matrix is not symmetric");

  out.vectors = a;
  out.values.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n,
                                         out.values.data());
  if (info != 0) {
    std::ostringstream os;
    os << "sym_eigen: dsyevd failed (info=" << info << ", n=" << n << ", max|a|=" << scale
       << ")";
    throw NumericalError(os.str());
  }
  return out;
}

} // namespace vdwmech

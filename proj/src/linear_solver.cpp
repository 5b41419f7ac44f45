#include "slipflow/linear_solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/UmfPackSupport>

#include "slipflow/errors.hpp"

namespace slipflow {

struct SparseLU::Impl {
  SparseMatrix matrix;  // UMFPACK keeps pointers into the factored matrix
  Eigen::UmfPackLU<SparseMatrix> lu;
  bool ready = false;
};

SparseLU::SparseLU() : impl_(std::make_unique<Impl>()) {}
SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

void SparseLU::factor(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw ContractViolation("LU factorization needs a square matrix");
  impl_->ready = false;
  if (m.rows() == 0) {
    impl_->ready = true;
    return;
  }
  impl_->matrix = m;
  impl_->matrix.makeCompressed();
  // Saddle-point systems have symmetric structure; the unsymmetric ordering can pick
  // pivots that leave the factors near-singular on large meshes.
  impl_->lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
  impl_->lu.compute(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed (singular matrix)");
  impl_->ready = true;
}

Vector SparseLU::solve(const Vector& rhs) const {
  if (!impl_->ready) throw ContractViolation("solve called before factor");
  if (rhs.size() == 0) return rhs;
  Vector x = impl_->lu.solve(rhs);
  if (impl_->lu.info() != Eigen::Success || !x.allFinite()) throw SolverError("sparse LU solve failed");
  const double scale = impl_->matrix.cwiseAbs().sum() / impl_->matrix.rows() * x.lpNorm<Eigen::Infinity>() +
                       rhs.lpNorm<Eigen::Infinity>();
  if ((impl_->matrix * x - rhs).lpNorm<Eigen::Infinity>() > 1e-8 * scale)
    throw SolverError("sparse LU solve is inaccurate (near-singular factors)");
  return x;
}

struct SparseSPD::Impl {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  bool ready = false;
};

SparseSPD::SparseSPD() : impl_(std::make_unique<Impl>()) {}
SparseSPD::~SparseSPD() = default;
SparseSPD::SparseSPD(SparseSPD&&) noexcept = default;
SparseSPD& SparseSPD::operator=(SparseSPD&&) noexcept = default;

void SparseSPD::factor(const SparseMatrix& m) {
  impl_->ldlt.compute(m);
  if (impl_->ldlt.info() != Eigen::Success) throw SolverError("sparse LDLT factorization failed");
  impl_->ready = true;
}

Vector SparseSPD::solve(const Vector& rhs) const {
  if (!impl_->ready) throw ContractViolation("solve called before factor");
  return impl_->ldlt.solve(rhs);
}

Vector solve_sparse(const SparseMatrix& m, const Vector& rhs) {
  SparseLU lu;
  lu.factor(m);
  return lu.solve(rhs);
}

SparseMatrix border(const SparseMatrix& m, const Vector& c) {
  const int n = static_cast<int>(m.rows());
  std::vector<Triplet> t;
  t.reserve(m.nonZeros() + 2 * c.size());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i)
    if (c[i] != 0.0) {
      t.emplace_back(i, n, c[i]);
      t.emplace_back(n, i, c[i]);
    }
  SparseMatrix out(n + 1, n + 1);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace slipflow

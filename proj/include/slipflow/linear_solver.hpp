#pragma once

#include <memory>

#include "slipflow/types.hpp"

namespace slipflow {

/// Sparse direct LU factorization (UMFPACK). Throws SolverError on a singular matrix.
class SparseLU {
 public:
  SparseLU();
  ~SparseLU();
  SparseLU(SparseLU&&) noexcept;
  SparseLU& operator=(SparseLU&&) noexcept;

  void factor(const SparseMatrix& m);
  Vector solve(const Vector& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Sparse Cholesky-type factorization for symmetric positive definite matrices.
class SparseSPD {
 public:
  SparseSPD();
  ~SparseSPD();
  SparseSPD(SparseSPD&&) noexcept;
  SparseSPD& operator=(SparseSPD&&) noexcept;

  void factor(const SparseMatrix& m);
  Vector solve(const Vector& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Vector solve_sparse(const SparseMatrix& m, const Vector& rhs);

/// Appends a bordering row and column c: [[M, c], [c^t, 0]].
SparseMatrix border(const SparseMatrix& m, const Vector& c);

}  // namespace slipflow

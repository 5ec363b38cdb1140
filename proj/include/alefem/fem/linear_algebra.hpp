#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#ifdef ALEFEM_USE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace alefem::fem {

using Vector = Eigen::VectorXd;
/// Row-compressed (CSR) storage.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double relative_residual() const { return residual_; }

 private:
  double residual_;
};

/// Accumulates element contributions. Duplicates are summed in insertion
/// order when the matrix is built, so assembly is deterministic.
class TripletAssembler {
 public:
  explicit TripletAssembler(std::size_t n) : n_(n) {}
  void reserve(std::size_t count) { triplets_.reserve(count); }
  void add(std::size_t i, std::size_t j, double v) {
    triplets_.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
  }
  SparseMatrix build() const {
    SparseMatrix m(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    m.setFromTriplets(triplets_.begin(), triplets_.end());
    return m;
  }

 private:
  std::size_t n_;
  std::vector<Eigen::Triplet<double, int>> triplets_;
};

/// Symmetric elimination of Dirichlet dofs: constrained rows and columns are
/// zeroed with a unit diagonal, the rhs takes the prescribed value, and the
/// column contributions move to the rhs of the free rows.
inline void apply_dirichlet(SparseMatrix& a, Vector& b, std::span<const std::size_t> dofs, std::span<const double> values) {
  if (dofs.size() != values.size()) throw std::invalid_argument("apply_dirichlet: dofs and values differ in length");
  const Eigen::Index n = a.rows();
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  std::vector<double> value(static_cast<std::size_t>(n), 0.0);
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    if (dofs[k] >= static_cast<std::size_t>(n)) throw std::out_of_range("apply_dirichlet: dof out of range");
    fixed[dofs[k]] = 1;
    value[dofs[k]] = values[k];
  }
  std::vector<char> has_diag(static_cast<std::size_t>(n), 0);
  for (Eigen::Index row = 0; row < n; ++row) {
    const bool row_fixed = fixed[static_cast<std::size_t>(row)] != 0;
    for (SparseMatrix::InnerIterator it(a, row); it; ++it) {
      const auto col = static_cast<std::size_t>(it.col());
      if (row_fixed) {
        if (it.col() == row) {
          it.valueRef() = 1.0;
          has_diag[static_cast<std::size_t>(row)] = 1;
        } else {
          it.valueRef() = 0.0;
        }
      } else if (fixed[col]) {
        b[row] -= it.value() * value[col];
        it.valueRef() = 0.0;
      }
    }
  }
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    const auto d = static_cast<Eigen::Index>(dofs[k]);
    if (!has_diag[dofs[k]]) a.coeffRef(d, d) = 1.0;
    b[d] = values[k];
  }
}

inline double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
  const double nb = b.norm();
  const double nr = (a * x - b).norm();
  return nb > 0.0 ? nr / nb : nr;
}

/// Sparse solver that keeps the symbolic analysis while the sparsity pattern
/// stays the same. Direct LU up to `direct_limit` unknowns, otherwise
/// BiCGSTAB with a diagonal preconditioner (the systems are nonsymmetric).
class SparseSolver {
 public:
  explicit SparseSolver(double rel_tol = 1e-10, std::size_t direct_limit = 50000, int max_iterations = 5000)
      : rel_tol_(rel_tol), direct_limit_(direct_limit), max_iterations_(max_iterations) {}

  Vector solve(const SparseMatrix& a, const Vector& b) {
    if (a.rows() != a.cols() || a.rows() != b.size()) throw std::invalid_argument("solve_sparse: dimension mismatch");
    if (b.size() == 0) return Vector();
    Vector x;
    if (static_cast<std::size_t>(a.rows()) <= direct_limit_) {
      Eigen::SparseMatrix<double, Eigen::ColMajor, int> csc = a;
      csc.makeCompressed();
      if (!same_pattern(csc)) {
        lu_.analyzePattern(csc);
        remember_pattern(csc);
      }
      lu_.factorize(csc);
      if (lu_.info() != Eigen::Success) throw SolverError("sparse LU factorization failed", INFINITY);
      x = lu_.solve(b);
    } else {
      Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> it;
      it.setTolerance(rel_tol_ * 0.1);
      it.setMaxIterations(max_iterations_);
      it.compute(a);
      x = it.solve(b);
    }
    const double res = relative_residual(a, x, b);
    if (!(res <= rel_tol_))
      throw SolverError("linear solve did not reach tolerance (relative residual " + std::to_string(res) + ")", res);
    return x;
  }

 private:
  bool same_pattern(const Eigen::SparseMatrix<double, Eigen::ColMajor, int>& m) const {
    if (outer_.empty() || m.rows() != rows_ || static_cast<std::size_t>(m.nonZeros()) != inner_.size()) return false;
    return std::equal(outer_.begin(), outer_.end(), m.outerIndexPtr()) &&
           std::equal(inner_.begin(), inner_.end(), m.innerIndexPtr());
  }
  void remember_pattern(const Eigen::SparseMatrix<double, Eigen::ColMajor, int>& m) {
    rows_ = m.rows();
    outer_.assign(m.outerIndexPtr(), m.outerIndexPtr() + m.outerSize() + 1);
    inner_.assign(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
  }

  double rel_tol_;
  std::size_t direct_limit_;
  int max_iterations_;
  using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
#ifdef ALEFEM_USE_UMFPACK
  Eigen::UmfPackLU<ColMatrix> lu_;
#else
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu_;
#endif
  Eigen::Index rows_ = 0;
  std::vector<int> outer_;
  std::vector<int> inner_;
};

/// One-shot solve; ||Ax - b|| / ||b|| <= rel_tol or SolverError.
inline Vector solve_sparse(const SparseMatrix& a, const Vector& b, double rel_tol = 1e-10) {
  SparseSolver solver(rel_tol);
  return solver.solve(a, b);
}

}  // namespace alefem::fem

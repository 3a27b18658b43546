#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace quadloco::lp {

/// maximize c'x  subject to  A_eq x = b_eq,  A_le x <= b_le,  x >= 0.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd a_le;
  Eigen::VectorXd b_le;

  explicit LinearProgram(int num_vars = 0) : objective(Eigen::VectorXd::Zero(num_vars)) {
    a_eq.resize(0, num_vars);
    a_le.resize(0, num_vars);
  }

  int numVars() const { return static_cast<int>(objective.size()); }
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
};

struct Options {
  double pivot_tol = 1e-10;
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-10;
  int max_iterations = 5000;
};

/// Dense two-phase tableau simplex. Bland's rule (lowest index entering and leaving)
/// rules out cycling on the heavily degenerate vertices of contact-force polytopes.
class Simplex {
 public:
  explicit Simplex(Options options = {}) : opt_(options) {}

  Solution solve(const LinearProgram& lp) const {
    const int n = lp.numVars();
    const int m_eq = static_cast<int>(lp.a_eq.rows());
    const int m_le = static_cast<int>(lp.a_le.rows());
    const int m = m_eq + m_le;
    const int slack0 = n, art0 = n + m_le;
    const int width = n + m_le + m;  // columns before the right-hand side
    const int rhs = width;

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, width + 1);
    std::vector<int> basis(m, -1);
    for (int i = 0; i < m; ++i) {
      const bool is_eq = i < m_eq;
      double sign = 1.0;
      if (is_eq) {
        t.row(i).head(n) = lp.a_eq.row(i);
        t(i, rhs) = lp.b_eq(i);
      } else {
        t.row(i).head(n) = lp.a_le.row(i - m_eq);
        t(i, slack0 + i - m_eq) = 1.0;
        t(i, rhs) = lp.b_le(i - m_eq);
      }
      if (t(i, rhs) < 0.0) {
        sign = -1.0;
        t.row(i) *= -1.0;
      }
      if (!is_eq && sign > 0.0) {
        basis[i] = slack0 + i - m_eq;
      } else {
        t(i, art0 + i) = 1.0;
        basis[i] = art0 + i;
      }
    }

    Solution sol;
    // Phase 1: maximise -sum(artificials).
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(width);
    for (int i = 0; i < m; ++i) phase1(art0 + i) = -1.0;
    std::vector<bool> allowed(width, true);
    const Status s1 = iterate(t, basis, phase1, allowed, sol.iterations);
    if (s1 == Status::IterationLimit) {
      sol.status = s1;
      return sol;
    }
    double infeasibility = 0.0;
    for (int i = 0; i < m; ++i)
      if (basis[i] >= art0) infeasibility += t(i, rhs);
    if (infeasibility > opt_.feasibility_tol) {
      sol.status = Status::Infeasible;
      return sol;
    }

    // Pivot zero-level artificials out of the basis; rows with no usable pivot are redundant.
    std::vector<bool> active_row(m, true);
    for (int i = 0; i < m; ++i) {
      if (basis[i] < art0) continue;
      int col = -1;
      for (int j = 0; j < art0; ++j)
        if (std::abs(t(i, j)) > opt_.pivot_tol) {
          col = j;
          break;
        }
      if (col >= 0) {
        pivot(t, basis, i, col);
      } else {
        active_row[i] = false;
      }
    }
    for (int j = art0; j < width; ++j) allowed[j] = false;

    // Phase 2.
    Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(width);
    phase2.head(n) = lp.objective;
    const Status s2 = iterate(t, basis, phase2, allowed, sol.iterations, &active_row);
    sol.status = s2;
    if (s2 != Status::Optimal) return sol;

    sol.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
      if (active_row[i] && basis[i] < n) sol.x(basis[i]) = t(i, rhs);
    sol.value = lp.objective.dot(sol.x);
    return sol;
  }

 private:
  Options opt_;

  static void pivot(Eigen::MatrixXd& t, std::vector<int>& basis, int row, int col) {
    t.row(row) /= t(row, col);
    for (int i = 0; i < t.rows(); ++i) {
      if (i == row) continue;
      const double factor = t(i, col);
      if (factor != 0.0) t.row(i) -= factor * t.row(row);
    }
    basis[row] = col;
  }

  Status iterate(Eigen::MatrixXd& t, std::vector<int>& basis, const Eigen::VectorXd& cost,
                 const std::vector<bool>& allowed, int& iterations,
                 const std::vector<bool>* active_row = nullptr) const {
    const int m = static_cast<int>(t.rows());
    const int width = static_cast<int>(t.cols()) - 1;
    auto row_active = [&](int i) { return active_row == nullptr || (*active_row)[i]; };
    while (true) {
      if (++iterations > opt_.max_iterations) return Status::IterationLimit;

      // Reduced costs r_j = c_j - c_B' t_j.
      int entering = -1;
      for (int j = 0; j < width && entering < 0; ++j) {
        if (!allowed[j]) continue;
        double r = cost(j);
        for (int i = 0; i < m; ++i)
          if (row_active(i)) r -= cost(basis[i]) * t(i, j);
        if (r > opt_.optimality_tol) entering = j;
      }
      if (entering < 0) return Status::Optimal;

      int leaving = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (!row_active(i) || t(i, entering) <= opt_.pivot_tol) continue;
        const double ratio = t(i, width) / t(i, entering);
        if (ratio < best - 1e-12 || (leaving >= 0 && std::abs(ratio - best) <= 1e-12 && basis[i] < basis[leaving])) {
          best = ratio;
          leaving = i;
        }
      }
      if (leaving < 0) return Status::Unbounded;
      pivot(t, basis, leaving, entering);
    }
  }
};

}  // namespace quadloco::lp

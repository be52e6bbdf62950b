#include "parabolic/simplex.hpp"

#include <vector>

namespace parabolic {

LpSolution maximize_lp(const RVector& c, const RMatrix& a, const RVector& b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (c.size() != n || b.size() != m) {
    throw InvalidInput("maximize_lp: inconsistent shapes");
  }
  if (m > 0 && b.minCoeff() < 0.0) {
    throw InvalidInput("maximize_lp: needs b >= 0");
  }
  constexpr double kEps = 1e-12;

  // Row i < m: constraint rows [A | I | b]. Row m: objective [-c | 0 | 0].
  RMatrix tab = RMatrix::Zero(m + 1, n + m + 1);
  tab.block(0, 0, m, n) = a;
  tab.block(0, n, m, m).setIdentity();
  tab.col(n + m).head(m) = b;
  tab.row(m).head(n) = -c.transpose();

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const Eigen::Index max_pivots = 50 * (n + m + 1);
  for (Eigen::Index iter = 0; iter < max_pivots; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (tab(m, j) < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best_ratio = kInf;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab(i, enter) > kEps) {
        const double ratio = tab(i, n + m) / tab(i, enter);
        const bool better = ratio < best_ratio - kEps;
        const bool tie = !better && ratio <= best_ratio + kEps && leave >= 0 &&
                         basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)];
        if (better || tie) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      return {false, kInf, RVector::Zero(n)};
    }

    tab.row(leave) /= tab(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && tab(i, enter) != 0.0) {
        tab.row(i) -= tab(i, enter) * tab.row(leave);
      }
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  LpSolution sol;
  sol.x = RVector::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index var = basis[static_cast<std::size_t>(i)];
    if (var < n) sol.x(var) = tab(i, n + m);
  }
  sol.value = c.dot(sol.x);
  return sol;
}

}  // namespace parabolic

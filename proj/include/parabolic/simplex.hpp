#pragma once

#include "parabolic/types.hpp"

namespace parabolic {

struct LpSolution {
  bool bounded = true;
  double value = 0.0;
  RVector x;
};

/// Dense tableau simplex for: maximize c^T x  s.t.  A x <= b, x >= 0, with
/// b >= 0 so that the slack basis is feasible. Bland's rule; meant for the
/// handful of variables that come up in kernel searches.
LpSolution maximize_lp(const RVector& c, const RMatrix& a, const RVector& b);

}  // namespace parabolic

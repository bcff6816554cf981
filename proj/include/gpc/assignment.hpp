#pragma once

#include <vector>

#include "gpc/graphon.hpp"

namespace gpc {

struct Assignment {
  std::vector<int> column_of_row;
  double cost = 0.0;  // sum of cost(i, column_of_row[i]) in row order
};

/// Minimum-cost perfect matching on a square cost matrix, by successive
/// shortest augmenting paths with dual potentials. O(n^3).
Assignment solve_assignment(const Matrix& cost);

}  // namespace gpc

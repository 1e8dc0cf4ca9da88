#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace skytrack {

using CostMatrix = Eigen::MatrixXd;

/// (row, column) pair of an assignment.
using AssignedPair = std::pair<int, int>;

/// Optimal linear assignment (Kuhn-Munkres with potentials) on a rectangular
/// matrix without padding. Returns min(rows, cols) pairs sorted by row that
/// minimize the total cost. Scan order is fixed, so ties always resolve the
/// same way. Throws InvalidArgument on a non-finite entry.
std::vector<AssignedPair> hungarian_min_cost(const CostMatrix& cost);

double assignment_cost(const CostMatrix& cost, const std::vector<AssignedPair>& pairs);

}  // namespace skytrack

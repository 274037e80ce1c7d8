#pragma once

#include <vector>

#include "mflab/field.hpp"

namespace mflab {

// d_{j,k} = sup |c| over all cells inside 3*lambda_{j,k} intersected with
// [0,1], at scales j..jmax. Bottom-up, O(total cells).
LeaderField compute_leaders(const CoefficientField& field);

// Subtree sups S_{j,k} = sup |c| over lambda' inside lambda_{j,k} (no
// 3-widening); the building block of compute_leaders and gen_duplicate.
std::vector<std::vector<ExpCode>> subtree_sups(const CoefficientField& field);

// d_j(x) for j = 0..jmax, the column of leaders above x.
std::vector<double> leader_sequence_at(double x, const LeaderField& lf);

struct HolderEstimate {
    double hhat = 0.0;        // windowed min of -log2 d_j(x) / j; +inf if all zero
    double slope = 0.0;       // least-squares slope diagnostic
    int zero_leaders = 0;     // zero leaders inside the window
    bool all_zero = false;
};

// Pointwise exponent estimate from the leader column at x over scales
// [j1, j2]. Zero leaders contribute +inf and are skipped by the min.
HolderEstimate holder_estimate(double x, const LeaderField& lf, int j1, int j2);

}  // namespace mflab

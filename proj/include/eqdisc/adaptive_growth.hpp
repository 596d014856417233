#pragma once

#include "eqdisc/dual_lasso.hpp"
#include "eqdisc/stridge.hpp"

#include <string>
#include <utility>
#include <vector>

namespace eqdisc {

struct GrowthConfig {
    double r_a = 0.75;   // addition accepted iff new loss <= r_a * loss
    double r_r = 1.25;   // removal accepted iff new loss <= r_r * loss
    int k_r = 10;        // removal sweep after every k_r-th accepted addition
    double lambda0 = 1.0;
    int max_degree = 6;
    int max_features = 50;
    int stall_limit = 0; // consecutive rejections before stopping; 0 -> 2*n*max_degree
};

struct GrowthStep {
    int step = 0;
    std::string action; // "added" | "rejected" | "removed"
    MultiIndex descriptor;
    double loss_before = 0.0;
    double loss_after = 0.0;
};

struct GrowthTrace {
    std::vector<GrowthStep> steps;
};

// Tensor-product Legendre candidates in graded lexicographic order, total
// degree 0..max_degree.
std::vector<MultiIndex> candidate_stream(int n, int max_degree);

// Adaptive library growth: starting from an empty library, cycle through the
// candidate stream; tentatively append each candidate, STRidge-fit all n
// targets over the shared library, and accept iff the joint Frobenius loss
// drops to r_a of the current one (any finite loss beats the initial
// infinity). After every k_r-th accepted addition, and once more on
// termination, sweep existing columns and drop any whose removal keeps the
// loss within r_r of current. Stops after stall_limit consecutive rejections,
// at max_features, or when every candidate is already in the library.
// Throws pipeline_error if the final library is empty (no model found).
std::pair<SparseLinearModel, GrowthTrace> grow(const StateTrajectory& traj,
                                               const GrowthConfig& cfg = {},
                                               const StridgeConfig& stridge_cfg = {});

// CSV: step,action,descriptor,loss_before,loss_after.
void write_trace_csv(const GrowthTrace& trace, const std::string& path);

} // namespace eqdisc

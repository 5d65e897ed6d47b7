#pragma once

#include <cstdint>
#include <vector>

#include "rng.hpp"

namespace aclab {

// A set partition of {0,...,n-1}: disjoint nonempty blocks covering the set,
// canonical form (elements sorted within blocks, blocks sorted by least
// element).
struct SetPartition {
    std::vector<std::vector<int>> blocks;

    int ground_size() const;
    bool operator==(const SetPartition& o) const { return blocks == o.blocks; }
};

// All partitions of {0,...,n-1} in canonical order; 1 <= n <= 10.
std::vector<SetPartition> enumerate_partitions(int n);
// All partitions of an arbitrary (sorted) element list.
std::vector<SetPartition> enumerate_partitions_of(const std::vector<int>& elements);

// A refinement P* <= P together with its per-block restrictions Q_B(P*)
// (aligned with P.blocks).
struct RefinementEntry {
    SetPartition partition;
    std::vector<SetPartition> restricted;
};

// All refinements of P (including P itself).
std::vector<RefinementEntry> refinements(const SetPartition& p);

// True when a is finer than (or equal to) b: every block of a lies inside a
// block of b.
bool is_refinement(const SetPartition& a, const SetPartition& b);

void validate_partition(const SetPartition& p, int n);

// Residuals of the three product/sum partition identities evaluated on random
// symmetric tensors G^{(k)}, random block-count weights Theta and Gamma, and
// random sample points; all values are relative to the identity magnitude.
struct IdentityResiduals {
    double grouped_with_weights = 0.0;  // per-block weighted double sum
    double grouped_plain = 0.0;         // the Theta == 1 reduction
    double full_double_sum = 0.0;       // summed over all coarse partitions
    double max_residual = 0.0;
};

IdentityResiduals check_partition_identities(int n, int trials, uint64_t seed);

// Order-n chain rule for a composition of smooth test maps: the partition-sum
// formula with analytic derivatives against nested central finite differences
// of the composite (with one Richardson halving).  Returns the max residual
// over random base points and directions.
double faa_di_bruno_check(int inner_dim, int outer_dim, int order, uint64_t seed, int trials = 3);

}  // namespace aclab

#include "partitions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "errors.hpp"

namespace aclab {

int SetPartition::ground_size() const {
    int total = 0;
    for (const auto& b : blocks) total += static_cast<int>(b.size());
    return total;
}

void validate_partition(const SetPartition& p, int n) {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (const auto& b : p.blocks) {
        if (b.empty()) throw ValidationError("SetPartition: empty block");
        for (int e : b) {
            if (e < 0 || e >= n) throw ValidationError("SetPartition: element out of range");
            if (seen[static_cast<size_t>(e)]) throw ValidationError("SetPartition: duplicate element");
            seen[static_cast<size_t>(e)] = 1;
        }
    }
    for (char s : seen)
        if (!s) throw ValidationError("SetPartition: blocks do not cover the ground set");
}

namespace {

void canonicalize(SetPartition& p) {
    for (auto& b : p.blocks) std::sort(b.begin(), b.end());
    std::sort(p.blocks.begin(), p.blocks.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) { return a.front() < b.front(); });
}

}  // namespace

std::vector<SetPartition> enumerate_partitions_of(const std::vector<int>& elements) {
    std::vector<SetPartition> out;
    SetPartition current;
    // Classic recursion: element j joins an existing block or opens a new one;
    // inserting in input order keeps the canonical form automatic when the
    // input is sorted.
    std::function<void(size_t)> rec = [&](size_t j) {
        if (j == elements.size()) {
            out.push_back(current);
            return;
        }
        const size_t existing = current.blocks.size();
        for (size_t bi = 0; bi < existing; ++bi) {
            current.blocks[bi].push_back(elements[j]);
            rec(j + 1);
            current.blocks[bi].pop_back();
        }
        current.blocks.push_back({elements[j]});
        rec(j + 1);
        current.blocks.pop_back();
    };
    rec(0);
    for (auto& p : out) canonicalize(p);
    return out;
}

std::vector<SetPartition> enumerate_partitions(int n) {
    if (n < 1 || n > 10)
        throw ValidationError("enumerate_partitions: n must lie in [1,10]");
    std::vector<int> elements(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) elements[static_cast<size_t>(i)] = i;
    return enumerate_partitions_of(elements);
}

bool is_refinement(const SetPartition& a, const SetPartition& b) {
    for (const auto& block : a.blocks) {
        bool inside_some = false;
        for (const auto& coarse : b.blocks) {
            if (std::includes(coarse.begin(), coarse.end(), block.begin(), block.end())) {
                inside_some = true;
                break;
            }
        }
        if (!inside_some) return false;
    }
    return true;
}

std::vector<RefinementEntry> refinements(const SetPartition& p) {
    // Independent choice of a partition of each block; the product over
    // blocks enumerates exactly the refinements of p.
    std::vector<std::vector<SetPartition>> per_block;
    per_block.reserve(p.blocks.size());
    for (const auto& b : p.blocks) per_block.push_back(enumerate_partitions_of(b));
    std::vector<RefinementEntry> out;
    std::vector<size_t> idx(p.blocks.size(), 0);
    for (;;) {
        RefinementEntry entry;
        for (size_t k = 0; k < p.blocks.size(); ++k) {
            const SetPartition& q = per_block[k][idx[k]];
            entry.restricted.push_back(q);
            for (const auto& blk : q.blocks) entry.partition.blocks.push_back(blk);
        }
        canonicalize(entry.partition);
        out.push_back(std::move(entry));
        size_t k = 0;
        while (k < idx.size()) {
            if (++idx[k] < per_block[k].size()) break;
            idx[k] = 0;
            ++k;
        }
        if (k == idx.size()) break;
    }
    return out;
}

namespace {

// Random symmetric k-variable test functions built from power sums (symmetric
// by construction): G_k(x) = a + b s1 + c s2 + d s1^2, s_j = sum x_i^j.
struct SymmetricTensor {
    double a, b, c, d;
    double eval(const std::vector<int>& idx, const std::vector<double>& y) const {
        double s1 = 0.0, s2 = 0.0;
        for (int i : idx) {
            s1 += y[static_cast<size_t>(i)];
            s2 += y[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
        }
        return a + b * s1 + c * s2 + d * s1 * s1;
    }
};

struct IdentityData {
    std::vector<double> y;                // sample points
    std::vector<SymmetricTensor> g;       // g[k] for block size k+1
    std::vector<double> theta, gamma;     // weights by block count (1-based)
};

double centered(const RngStream& s, uint32_t step, uint32_t cell) {
    return 2.0 * s.uniform(step, cell) - 1.0;
}

IdentityData random_data(int n, const RngStream& stream, uint32_t trial) {
    IdentityData d;
    d.y.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) d.y[static_cast<size_t>(i)] = centered(stream, trial, static_cast<uint32_t>(i));
    d.g.resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        d.g[static_cast<size_t>(k)] = {centered(stream, trial, 100u + 4u * static_cast<uint32_t>(k)),
                                       centered(stream, trial, 101u + 4u * static_cast<uint32_t>(k)),
                                       centered(stream, trial, 102u + 4u * static_cast<uint32_t>(k)),
                                       centered(stream, trial, 103u + 4u * static_cast<uint32_t>(k))};
    d.theta.resize(static_cast<size_t>(n) + 1);
    d.gamma.resize(static_cast<size_t>(n) + 1);
    for (int k = 1; k <= n; ++k) {
        d.theta[static_cast<size_t>(k)] = centered(stream, trial, 200u + static_cast<uint32_t>(k));
        d.gamma[static_cast<size_t>(k)] = centered(stream, trial, 300u + static_cast<uint32_t>(k));
    }
    return d;
}

double product_of_blocks(const SetPartition& p, const IdentityData& d) {
    double prod = 1.0;
    for (const auto& b : p.blocks) prod *= d.g[b.size() - 1].eval(b, d.y);
    return prod;
}

// Per-block inner sum: sum over partitions Q of the block of
// theta(|Q|) * prod_J G(y_J); with_theta = false drops the weight.
double inner_sum(const std::vector<int>& block, const IdentityData& d, bool with_theta) {
    double sum = 0.0;
    for (const SetPartition& q : enumerate_partitions_of(block)) {
        double term = with_theta ? d.theta[q.blocks.size()] : 1.0;
        term *= product_of_blocks(q, d);
        sum += term;
    }
    return sum;
}

double rel(double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

}  // namespace

IdentityResiduals check_partition_identities(int n, int trials, uint64_t seed) {
    if (n < 1 || n > 6)
        throw ValidationError("check_partition_identities: n must lie in [1,6]");
    RngStream stream(seed, RngPurpose::generic_draws, 0);
    const std::vector<SetPartition> all = enumerate_partitions(n);
    IdentityResiduals res;
    for (int trial = 0; trial < trials; ++trial) {
        const IdentityData d = random_data(n, stream, static_cast<uint32_t>(trial));
        double full_lhs = 0.0, full_rhs = 0.0;
        for (const SetPartition& p : all) {
            double lhs_w = 1.0, lhs_p = 1.0;
            for (const auto& b : p.blocks) {
                lhs_w *= inner_sum(b, d, true);
                lhs_p *= inner_sum(b, d, false);
            }
            double rhs_w = 0.0, rhs_p = 0.0;
            for (const RefinementEntry& r : refinements(p)) {
                double theta_prod = 1.0;
                for (const SetPartition& q : r.restricted) theta_prod *= d.theta[q.blocks.size()];
                const double gprod = product_of_blocks(r.partition, d);
                rhs_w += theta_prod * gprod;
                rhs_p += gprod;
            }
            res.grouped_with_weights = std::max(res.grouped_with_weights, rel(lhs_w, rhs_w));
            res.grouped_plain = std::max(res.grouped_plain, rel(lhs_p, rhs_p));
            full_lhs += d.gamma[p.blocks.size()] * lhs_w;
        }
        // Coarse-side double sum: over P*, then over partitions of the block
        // set of P*.
        for (const SetPartition& pstar : all) {
            std::vector<int> block_ids(pstar.blocks.size());
            for (size_t k = 0; k < block_ids.size(); ++k) block_ids[k] = static_cast<int>(k);
            double weight = 0.0;
            for (const SetPartition& grouping : enumerate_partitions_of(block_ids)) {
                double term = d.gamma[grouping.blocks.size()];
                for (const auto& grp : grouping.blocks) term *= d.theta[grp.size()];
                weight += term;
            }
            full_rhs += weight * product_of_blocks(pstar, d);
        }
        res.full_double_sum = std::max(res.full_double_sum, rel(full_lhs, full_rhs));
    }
    res.max_residual =
        std::max({res.grouped_with_weights, res.grouped_plain, res.full_double_sum});
    return res;
}

namespace {

// Test maps with closed-form derivatives of every order:
//   Phi_j(v) = sin(w_j . v + b_j),  Psi(u) = exp(c . u).
struct TestMaps {
    int inner_dim, outer_dim;
    std::vector<std::vector<double>> w;  // outer_dim rows of inner_dim weights
    std::vector<double> b, c;

    double phase(int j, const std::vector<double>& v) const {
        double acc = b[static_cast<size_t>(j)];
        for (int i = 0; i < inner_dim; ++i)
            acc += w[static_cast<size_t>(j)][static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
        return acc;
    }
    static double sin_deriv(double x, int order) {
        switch (order % 4) {
            case 0: return std::sin(x);
            case 1: return std::cos(x);
            case 2: return -std::sin(x);
            default: return -std::cos(x);
        }
    }
    // <D^k Phi_j(v), h_1 x ... x h_k> for the listed directions.
    double dphi(int j, const std::vector<double>& v,
                const std::vector<const std::vector<double>*>& hs) const {
        double prod = sin_deriv(phase(j, v), static_cast<int>(hs.size()));
        for (const auto* h : hs) {
            double dot = 0.0;
            for (int i = 0; i < inner_dim; ++i)
                dot += w[static_cast<size_t>(j)][static_cast<size_t>(i)] * (*h)[static_cast<size_t>(i)];
            prod *= dot;
        }
        return prod;
    }
    std::vector<double> phi(const std::vector<double>& v) const {
        std::vector<double> u(static_cast<size_t>(outer_dim));
        for (int j = 0; j < outer_dim; ++j) u[static_cast<size_t>(j)] = std::sin(phase(j, v));
        return u;
    }
    double psi(const std::vector<double>& u) const {
        double acc = 0.0;
        for (int j = 0; j < outer_dim; ++j) acc += c[static_cast<size_t>(j)] * u[static_cast<size_t>(j)];
        return std::exp(acc);
    }
    // <D^k Psi(u), g_1 x ... x g_k> = exp(c.u) prod (c.g_i).
    double dpsi(const std::vector<double>& u, const std::vector<std::vector<double>>& gs) const {
        double prod = psi(u);
        for (const auto& g : gs) {
            double dot = 0.0;
            for (int j = 0; j < outer_dim; ++j)
                dot += c[static_cast<size_t>(j)] * g[static_cast<size_t>(j)];
            prod *= dot;
        }
        return prod;
    }
};

// Mixed partial d^n/dt_1...dt_n of Psi(Phi(v + sum t_i h_i)) at 0 by the
// alternating-corner central stencil with half-widths delta.
double mixed_fd(const TestMaps& maps, const std::vector<double>& v,
                const std::vector<std::vector<double>>& hs, double delta) {
    const int n = static_cast<int>(hs.size());
    const int corners = 1 << n;
    double acc = 0.0;
    std::vector<double> point(v.size());
    for (int mask = 0; mask < corners; ++mask) {
        point = v;
        int sign = 1;
        for (int i = 0; i < n; ++i) {
            const double s = (mask >> i) & 1 ? 1.0 : -1.0;
            if (s < 0) sign = -sign;
            for (size_t q = 0; q < point.size(); ++q)
                point[q] += s * delta * hs[static_cast<size_t>(i)][q];
        }
        acc += sign * maps.psi(maps.phi(point));
    }
    return acc / std::pow(2.0 * delta, n);
}

}  // namespace

double faa_di_bruno_check(int inner_dim, int outer_dim, int order, uint64_t seed, int trials) {
    if (order < 1 || order > 4)
        throw ValidationError("faa_di_bruno_check: order must lie in [1,4]");
    if (inner_dim < 1 || outer_dim < 1)
        throw ValidationError("faa_di_bruno_check: dimensions must be positive");
    RngStream stream(seed, RngPurpose::generic_draws, 1);
    const std::vector<SetPartition> parts = enumerate_partitions(order);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        TestMaps maps;
        maps.inner_dim = inner_dim;
        maps.outer_dim = outer_dim;
        uint32_t cell = 0;
        auto draw = [&]() { return centered(stream, static_cast<uint32_t>(trial), cell++); };
        maps.w.resize(static_cast<size_t>(outer_dim));
        for (auto& row : maps.w) {
            row.resize(static_cast<size_t>(inner_dim));
            for (auto& x : row) x = draw();
        }
        maps.b.resize(static_cast<size_t>(outer_dim));
        for (auto& x : maps.b) x = draw();
        maps.c.resize(static_cast<size_t>(outer_dim));
        for (auto& x : maps.c) x = 0.5 * draw();
        std::vector<double> v(static_cast<size_t>(inner_dim));
        for (auto& x : v) x = draw();
        std::vector<std::vector<double>> hs(static_cast<size_t>(order),
                                            std::vector<double>(static_cast<size_t>(inner_dim)));
        for (auto& h : hs)
            for (auto& x : h) x = draw();

        // Partition-sum value with analytic derivatives.
        const std::vector<double> u = maps.phi(v);
        double analytic = 0.0;
        for (const SetPartition& p : parts) {
            std::vector<std::vector<double>> gs;
            gs.reserve(p.blocks.size());
            for (const auto& block : p.blocks) {
                std::vector<const std::vector<double>*> dirs;
                for (int i : block) dirs.push_back(&hs[static_cast<size_t>(i)]);
                std::vector<double> g(static_cast<size_t>(outer_dim));
                for (int j = 0; j < outer_dim; ++j) g[static_cast<size_t>(j)] = maps.dphi(j, v, dirs);
                gs.push_back(std::move(g));
            }
            analytic += maps.dpsi(u, gs);
        }

        const double coarse = mixed_fd(maps, v, hs, 0.08);
        const double fine = mixed_fd(maps, v, hs, 0.04);
        const double richardson = (4.0 * fine - coarse) / 3.0;
        worst = std::max(worst, std::abs(analytic - richardson));
    }
    return worst;
}

}  // namespace aclab

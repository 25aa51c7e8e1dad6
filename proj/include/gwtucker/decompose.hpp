#pragma once

#include <utility>
#include <vector>

#include "gwtucker/channel.hpp"
#include "gwtucker/linalg.hpp"
#include "gwtucker/tensor.hpp"

namespace gwt {

enum class ModelKind { individual, shared, groupwise };

const char* model_name(ModelKind model);
ModelKind model_from_name(const std::string& name);

/// Compressed sizes along modes 1, 2, 3 (m <= M, n <= N, p <= P).
struct CompressionRanks {
    int m = 0;
    int n = 0;
    int p = 0;

    void validate_against(int dim1, int dim2, int dim3) const;
};

/// One tensor's orthonormal factor matrices and core:
/// X ~= core x_1 rx x_2 tx x_3 delay.
struct TuckerFactors {
    Matrix rx;     // dim1 x m
    Matrix tx;     // dim2 x n
    Matrix delay;  // dim3 x p
    Tensor3 core;  // (m, n, p)
};

/// Objective values recorded by the alternating solvers: entry 0 is the
/// residual at initialization, then one entry per completed sweep.
/// Non-increasing by construction of the block updates.
struct SolveTrace {
    std::vector<double> objective;
    int iterations_run = 0;

    double initial() const { return objective.front(); }
    double final() const { return objective.back(); }
};

/// Factor grid for a whole (J, K) system: one receive-side factor per
/// user (shared across that user's serving and interfering channels), one
/// transmit-side factor per base, and per-link delay factors and cores.
struct GroupwiseFactorSet {
    int num_cells = 0;
    int users_per_cell = 0;
    CompressionRanks ranks;

    std::vector<Matrix> rx_factors;     // J*K, each M x m, indexed by user
    std::vector<Matrix> tx_factors;     // J, each N x n, indexed by base
    std::vector<Matrix> delay_factors;  // J^2*K, each P x p, indexed by link
    std::vector<Tensor3> cores;         // J^2*K, each (m, n, p)

    int user_index(int i, int j) const { return i * users_per_cell + j; }
    int link_index(int k, int i, int j) const {
        return (k * num_cells + i) * users_per_cell + j;
    }

    const Matrix& rx(int i, int j) const { return rx_factors[user_index(i, j)]; }
    const Matrix& tx(int k) const { return tx_factors[k]; }
    const Matrix& delay(int k, int i, int j) const { return delay_factors[link_index(k, i, j)]; }
    const Tensor3& core(int k, int i, int j) const { return cores[link_index(k, i, j)]; }
};

// ---------------------------------------------------------------------------
// Single-tensor solvers

/// Factors from the leading singular subspaces of the three unfoldings,
/// core = X x_1 rx^H x_2 tx^H x_3 delay^H.
TuckerFactors hosvd(const Tensor3& x, const CompressionRanks& ranks);

/// Alternating refinement starting from HOSVD (or `init` when given).
/// sweeps = 0 returns the initialization. The trace objective is the
/// squared reconstruction residual.
std::pair<TuckerFactors, SolveTrace> hooi(const Tensor3& x, const CompressionRanks& ranks,
                                          int sweeps, const TuckerFactors* init = nullptr);

/// core x_1 rx x_2 tx x_3 delay.
Tensor3 reconstruct(const TuckerFactors& f);

/// ||X - reconstruct||^2 for fixed factors with the optimal core,
/// evaluated as ||X||^2 - ||X x_1 rx^H x_2 tx^H x_3 delay^H||^2.
double tucker_residual(const Tensor3& x, const Matrix& rx, const Matrix& tx, const Matrix& delay);

// ---------------------------------------------------------------------------
// Groupwise updates (exposed individually for verification)

/// Accumulated M x M Hermitian matrix whose leading eigenvectors refresh
/// user (i,j)'s receive factor: sum over bases k of W W^H with
/// W = (X x_2 tx_k^H x_3 delay^H)_(1).
Matrix rx_update_gram(const ChannelSet& channels, const GroupwiseFactorSet& factors, int i, int j);
Matrix update_rx_factor(const ChannelSet& channels, const GroupwiseFactorSet& factors, int i, int j);

/// Same on mode 2, summed over every user reached by base k.
Matrix tx_update_gram(const ChannelSet& channels, const GroupwiseFactorSet& factors, int k);
Matrix update_tx_factor(const ChannelSet& channels, const GroupwiseFactorSet& factors, int k);

/// Per-link mode-3 update; no cross-link summation.
Matrix delay_update_gram(const ChannelSet& channels, const GroupwiseFactorSet& factors, int k,
                         int i, int j);
Matrix update_delay_factor(const ChannelSet& channels, const GroupwiseFactorSet& factors, int k,
                           int i, int j);

/// Per-link cores for fixed factors (the normal-equation optimum).
void compute_cores(const ChannelSet& channels, GroupwiseFactorSet& factors);

/// Total residual f = sum over links of ||X||^2 - ||projection||^2.
double objective_value(const ChannelSet& channels, const GroupwiseFactorSet& factors);

/// Total captured energy g = sum over links of ||X x_1 rx^H x_2 tx^H x_3 delay^H||^2.
double projection_energy(const ChannelSet& channels, const GroupwiseFactorSet& factors);

// ---------------------------------------------------------------------------
// Multi-channel solvers

/// Gauss-Seidel sweeps: all receive factors, then all transmit factors,
/// then all delay factors; cores once at the end. Stops after `sweeps`
/// passes or when the objective decrease falls below 1e-10 of the total
/// channel energy. Within one phase the updates are mutually independent;
/// the three phases are sequential barriers.
std::pair<GroupwiseFactorSet, SolveTrace> groupwise_solve(const ChannelSet& channels,
                                                          const CompressionRanks& ranks, int sweeps,
                                                          const GroupwiseFactorSet* init = nullptr);

/// One receive factor and one transmit factor for the whole system (the
/// grids hold copies); update sums run over every link.
std::pair<GroupwiseFactorSet, SolveTrace> shared_solve(const ChannelSet& channels,
                                                       const CompressionRanks& ranks, int sweeps,
                                                       const GroupwiseFactorSet* init = nullptr);

struct IndividualResult {
    std::vector<TuckerFactors> links;  // link order, one per channel tensor
    SolveTrace trace;                  // per-sweep sum over links
};

/// Independent per-link refinement; optionally warm-started from a
/// groupwise solution.
IndividualResult individual_solve(const ChannelSet& channels, const CompressionRanks& ranks,
                                  int sweeps, const GroupwiseFactorSet* init = nullptr);

}  // namespace gwt

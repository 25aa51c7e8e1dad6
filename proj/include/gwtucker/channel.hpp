#pragma once

#include <cstdint>
#include <vector>

#include "gwtucker/flops.hpp"
#include "gwtucker/tensor.hpp"

namespace gwt {

/// Multi-cell system dimensions. One base station per cell, each serving
/// the same number of users.
struct SystemTopology {
    int num_cells = 0;       // J
    int users_per_cell = 0;  // K
    int rx_antennas = 0;     // M
    int tx_antennas = 0;     // N
    int num_taps = 0;        // P submatrices: one LOS slice + P-1 NLOS taps
    int num_streams = 0;     // L spatial streams
    double noise_std = 0.1;  // sigma

    int num_users() const { return num_cells * users_per_cell; }
    int num_links() const { return num_cells * num_cells * users_per_cell; }

    /// Throws std::invalid_argument naming the violated field.
    void validate() const;
};

/// Which transmit pairs enter a user's received covariance.
/// `full` sums every (base, user) pair; `paper_experiment` keeps the
/// serving pair plus the first user of every other cell and drops
/// intra-cell terms.
enum class InterferenceScope { full, paper_experiment };

/// Synthetic ray-based generator knobs.
struct GeneratorParams {
    int rays_per_slice = 4;       // NLOS rays per tap (LOS slice uses up to 2)
    double tap_decay = 0.7;       // per-slice power rho^l
    double rician_factor = 10.0;  // LOS dominant-ray power ratio
    double coeff_decay = 0.8;     // delay profile of the coefficient vector

    void validate() const;
};

/// All channel tensors of a (J, K) system plus per-link coefficient
/// vectors. Link (k, i, j) is the channel from base k to user j of cell i;
/// grids are stored k-major, then i, then j.
struct ChannelSet {
    SystemTopology topology;
    std::vector<Tensor3> tensors;  // num_links(), each (M, N, P)
    std::vector<Vector> coeffs;    // num_links(), each length P

    int link_index(int k, int i, int j) const {
        return (k * topology.num_cells + i) * topology.users_per_cell + j;
    }
    int user_index(int i, int j) const { return i * topology.users_per_cell + j; }

    const Tensor3& tensor(int k, int i, int j) const { return tensors[link_index(k, i, j)]; }
    const Vector& coeff(int k, int i, int j) const { return coeffs[link_index(k, i, j)]; }

    double total_squared_norm() const;
};

/// Deterministic for a fixed (topology, params, seed); distinct links draw
/// from independent sub-seeds, so any parallel generation schedule yields
/// the same set. Slice 0 is a low-rank LOS-style slice; slices 1..P-1
/// carry geometrically decaying power. Coefficients have unit RMS and a
/// decaying delay profile.
ChannelSet generate_channel_set(const SystemTopology& topology, const GeneratorParams& params,
                                std::uint64_t seed);

/// H = X x_3 c^*, the M x N channel at the stored time point.
/// Charges M*N*P to ledger.reconstruct when a ledger is given.
Matrix assemble_channel_full(const Tensor3& x, const Vector& coeff, FlopLedger* ledger = nullptr);

/// Compressed-path assembly: d = c^* C (1 x p), then H~ = G x_3 d, an
/// m x n matrix in the link's factor bases. Charges m*n*p + P*p.
Matrix assemble_channel_compressed(const Tensor3& core, const Matrix& delay_factor,
                                   const Vector& coeff, FlopLedger* ledger = nullptr);

}  // namespace gwt

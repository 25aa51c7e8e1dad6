#pragma once

#include <utility>
#include <vector>

#include "gwtucker/channel.hpp"
#include "gwtucker/decompose.hpp"
#include "gwtucker/flops.hpp"
#include "gwtucker/linalg.hpp"

namespace gwt {

/// SVD precoder for one user: the leading right singular vectors of its
/// serving channel, plus the matching singular values and left vectors.
struct Precoder {
    Matrix v;                         // N x L (full path) or n x L (compressed)
    Eigen::VectorXd singular_values;  // L, non-increasing
    Matrix u;                         // M x L or m x L
};

/// Grid of assembled M x N channels, link order as in ChannelSet.
struct AssembledChannels {
    SystemTopology topology;
    std::vector<Matrix> h;

    const Matrix& at(int k, int i, int j) const {
        return h[(k * topology.num_cells + i) * topology.users_per_cell + j];
    }
};

/// Grid of compressed m x n channels; entry (k,i,j) is expressed in user
/// (i,j)'s receive basis and base k's transmit basis, which is what lets
/// the factors cancel across the covariance sum.
struct CompressedChannels {
    SystemTopology topology;
    CompressionRanks ranks;
    std::vector<Matrix> h;

    const Matrix& at(int k, int i, int j) const {
        return h[(k * topology.num_cells + i) * topology.users_per_cell + j];
    }
};

struct StreamSinr {
    double signal_power = 0.0;
    double sinr = 0.0;  // linear scale
};

/// Per-stream SINR of every user plus the flop ledger and wall time of
/// the measured stage (reconstruction through SINR).
struct SinrReport {
    int num_cells = 0;
    int users_per_cell = 0;
    int num_streams = 0;
    std::vector<double> signal_power;  // user-major, stream inner
    std::vector<double> sinr;
    FlopLedger ledger;
    double seconds = 0.0;

    int user_index(int i, int j) const { return i * users_per_cell + j; }
    double sinr_at(int i, int j, int r) const { return sinr[user_index(i, j) * num_streams + r]; }
};

/// Transmit pairs (base, user-of-that-base) entering user (i,j)'s
/// covariance under the given scope. The serving pair is always present.
std::vector<std::pair<int, int>> scope_pairs(const SystemTopology& topology,
                                             InterferenceScope scope, int i, int j);

// ---------------------------------------------------------------------------
// Full-size path

AssembledChannels assemble_all_full(const ChannelSet& channels, FlopLedger* ledger = nullptr);

Precoder precoder_full(const Matrix& h, int streams, FlopLedger* ledger = nullptr);

/// One precoder per user, from its serving channel.
std::vector<Precoder> precoders_full(const AssembledChannels& assembled, FlopLedger* ledger = nullptr);

/// Q = sum over scope of (H V)(H V)^H + sigma^2 I.
Matrix covariance_full(const AssembledChannels& assembled, const std::vector<Precoder>& precoders,
                       InterferenceScope scope, int i, int j, FlopLedger* ledger = nullptr);

/// W solving Q W = H V through a Hermitian positive-definite factorization.
Matrix filter_full(const Matrix& q, const Matrix& h_serving, const Matrix& v_serving,
                   FlopLedger* ledger = nullptr);

std::vector<StreamSinr> sinr_full(const Matrix& w, const Matrix& q, const Matrix& h_serving,
                                  const Matrix& v_serving, FlopLedger* ledger = nullptr);

// ---------------------------------------------------------------------------
// Compressed path

CompressedChannels assemble_all_compressed(const SystemTopology& topology,
                                           const GroupwiseFactorSet& factors,
                                           const std::vector<Vector>& coeffs,
                                           FlopLedger* ledger = nullptr);

Precoder precoder_compressed(const Matrix& h_small, int streams, FlopLedger* ledger = nullptr);

std::vector<Precoder> precoders_compressed(const CompressedChannels& compressed,
                                           FlopLedger* ledger = nullptr);

Matrix covariance_compressed(const CompressedChannels& compressed,
                             const std::vector<Precoder>& precoders, InterferenceScope scope,
                             int i, int j, FlopLedger* ledger = nullptr);

/// Small-form representation of the full covariance inverse:
/// Q^-1 = inv_sigma_sq * (I_M - A t A^H), with the receive factor A never
/// multiplied out.
struct WoodburyInverse {
    Matrix t;  // m x m, Qs^-1 (Qs - sigma^2 I)
    double inv_sigma_sq = 0.0;
};

WoodburyInverse woodbury_inverse_apply(const Matrix& q_small, double sigma,
                                       FlopLedger* ledger = nullptr);

/// W~ = (1/sigma^2)(I - t)(H~ V~); algebraically equal to Qs^-1 H~ V~.
Matrix filter_compressed(const WoodburyInverse& inverse, const Matrix& h_serving,
                         const Matrix& v_serving, FlopLedger* ledger = nullptr);

std::vector<StreamSinr> sinr_compressed(const Matrix& w_small, const Matrix& q_small,
                                        const Matrix& h_serving, const Matrix& v_serving,
                                        FlopLedger* ledger = nullptr);

// ---------------------------------------------------------------------------
// Whole-system runs

/// Precoders plus per-user covariance / filter / SINR on already-assembled
/// channels; `initial` carries any reconstruction cost already incurred.
SinrReport evaluate_assembled(const AssembledChannels& assembled, InterferenceScope scope,
                              FlopLedger initial = {});

SinrReport run_full_pipeline(const ChannelSet& channels, InterferenceScope scope);

SinrReport run_compressed_pipeline(const SystemTopology& topology, const GroupwiseFactorSet& factors,
                                   const std::vector<Vector>& coeffs, InterferenceScope scope);

/// Individual-model evaluation: channels are rebuilt at full size through
/// their per-link factors (the factors differ per link, so nothing
/// cancels), then the full-size path runs.
SinrReport run_reconstructed_pipeline(const SystemTopology& topology,
                                      const std::vector<TuckerFactors>& links,
                                      const std::vector<Vector>& coeffs, InterferenceScope scope);

enum class PipelinePath { full, compressed };

/// Closed-form system-wide ledger from the per-stage cost model.
FlopLedger flop_estimate(const SystemTopology& topology, const CompressionRanks& ranks,
                         PipelinePath path);

}  // namespace gwt

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gwtucker/decompose.hpp"

namespace gwt {

struct ArchiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadMagicError : ArchiveError {
    using ArchiveError::ArchiveError;
};
struct VersionMismatchError : ArchiveError {
    using ArchiveError::ArchiveError;
};
struct TruncatedArchiveError : ArchiveError {
    using ArchiveError::ArchiveError;
};

/// Binary container for a compressed channel set.
///
/// Layout: magic "GWTK"; format version (u32 LE); J, K, M, N, P, m, n, p
/// (u32 LE each); model tag (1 byte: 0 individual, 1 shared, 2 groupwise);
/// then the payload as raw complex values, each an interleaved IEEE-754
/// binary64 (real, imag) pair in little-endian order. Matrices are
/// column-major, cores mode-1-fastest; grids run k-major, then i, then j.
/// Payload order: receive factors, transmit factors, delay factors, cores,
/// coefficient vectors. The factor counts follow the declared model
/// (groupwise J*K + J, shared 1 + 1, individual J^2*K + J^2*K), so the
/// payload length equals the model's storage count plus J^2*K*P
/// coefficients exactly.
struct LoadedArchive {
    ModelKind model = ModelKind::groupwise;
    int num_cells = 0;
    int users_per_cell = 0;
    int rx_antennas = 0;
    int tx_antennas = 0;
    int num_taps = 0;
    CompressionRanks ranks;

    GroupwiseFactorSet factors;        // populated for shared / groupwise
    std::vector<TuckerFactors> links;  // populated for individual
    std::vector<Vector> coeffs;
};

/// Shared / groupwise save. The shared model stores one receive and one
/// transmit factor (the grid holds copies by construction).
void save_archive(const std::string& path, ModelKind model, const GroupwiseFactorSet& factors,
                  const std::vector<Vector>& coeffs);

/// Individual-model save: per-link factor grids.
void save_archive(const std::string& path, const std::vector<TuckerFactors>& links, int num_cells,
                  int users_per_cell, const std::vector<Vector>& coeffs);

/// Validates magic, version and exact payload length before reading any
/// value; a malformed file yields no partial result.
LoadedArchive load_archive(const std::string& path);

}  // namespace gwt

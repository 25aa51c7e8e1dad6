#pragma once

#include <cstdint>
#include <vector>

#include "gwtucker/decompose.hpp"
#include "gwtucker/sinr.hpp"

namespace gwt {

/// Element counts in complex double precision before and after
/// compression, per model variant.
struct StorageModel {
    std::int64_t original_count = 0;
    std::int64_t compressed_count = 0;
    ModelKind model = ModelKind::groupwise;

    double ratio() const { return static_cast<double>(original_count) / static_cast<double>(compressed_count); }
};

/// original = J^2*K*M*N*P for every model. Compressed:
///   groupwise:  J^2*K*(mnp + Pp) + J*K*M*m + J*N*n
///   shared:     J^2*K*(mnp + Pp) + M*m + N*n
///   individual: J^2*K*(mnp + Pp + M*m + N*n)
StorageModel storage_counts(const SystemTopology& topology, const CompressionRanks& ranks,
                            ModelKind model);

struct ErrorSummary {
    double e_c = 0.0;                // mean relative SINR error
    std::vector<double> per_stream;  // same index order as the reports
};

/// e_c = mean over (user, stream) of |SINR - SINR~| / |SINR|.
ErrorSummary sinr_error(const SinrReport& full, const SinrReport& compressed);

struct Speedup {
    double measured = 0.0;          // t_full / t_compressed
    double ledger_predicted = 0.0;  // flop-ledger ratio
};

Speedup speedup(double t_full, double t_compressed, const FlopLedger& full,
                const FlopLedger& compressed);

}  // namespace gwt

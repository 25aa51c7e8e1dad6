#include "gwtucker/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gwt {

StorageModel storage_counts(const SystemTopology& topology, const CompressionRanks& ranks,
                            ModelKind model) {
    topology.validate();
    ranks.validate_against(topology.rx_antennas, topology.tx_antennas, topology.num_taps);

    const std::int64_t J = topology.num_cells, K = topology.users_per_cell;
    const std::int64_t M = topology.rx_antennas, N = topology.tx_antennas, P = topology.num_taps;
    const std::int64_t m = ranks.m, n = ranks.n, p = ranks.p;

    StorageModel out;
    out.model = model;
    out.original_count = J * J * K * M * N * P;
    const std::int64_t per_link = m * n * p + P * p;  // core + delay factor
    switch (model) {
        case ModelKind::groupwise:
            out.compressed_count = J * J * K * per_link + J * K * M * m + J * N * n;
            break;
        case ModelKind::shared:
            out.compressed_count = J * J * K * per_link + M * m + N * n;
            break;
        case ModelKind::individual:
            out.compressed_count = J * J * K * (per_link + M * m + N * n);
            break;
    }
    return out;
}

ErrorSummary sinr_error(const SinrReport& full, const SinrReport& compressed) {
    if (full.sinr.size() != compressed.sinr.size() || full.num_streams != compressed.num_streams)
        throw std::invalid_argument("sinr_error: reports cover different (user, stream) sets");

    ErrorSummary out;
    out.per_stream.reserve(full.sinr.size());
    double acc = 0.0;
    for (std::size_t at = 0; at < full.sinr.size(); ++at) {
        if (full.sinr[at] == 0.0)
            throw std::invalid_argument("sinr_error: full-path SINR is zero at flat index " +
                                        std::to_string(at) + " (user " +
                                        std::to_string(at / full.num_streams) + ", stream " +
                                        std::to_string(at % full.num_streams) +
                                        "); relative error undefined");
        const double err = std::abs(full.sinr[at] - compressed.sinr[at]) / std::abs(full.sinr[at]);
        out.per_stream.push_back(err);
        acc += err;
    }
    out.e_c = acc / static_cast<double>(full.sinr.size());
    return out;
}

Speedup speedup(double t_full, double t_compressed, const FlopLedger& full,
                const FlopLedger& compressed) {
    if (!(t_full > 0.0) || !(t_compressed > 0.0))
        throw std::invalid_argument("speedup: durations must be positive");
    Speedup out;
    out.measured = t_full / t_compressed;
    out.ledger_predicted = static_cast<double>(full.total()) / static_cast<double>(compressed.total());
    return out;
}

}  // namespace gwt

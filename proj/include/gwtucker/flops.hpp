#pragma once

#include <cstdint>

namespace gwt {

/// Named flop counters, one per pipeline stage. Counts follow the
/// documented cost model (asymptotic terms carry unit constants), so the
/// ledger is a reproducible prediction rather than a hardware measurement.
struct FlopLedger {
    std::int64_t reconstruct = 0;
    std::int64_t precoder = 0;
    std::int64_t covariance = 0;
    std::int64_t inverse = 0;
    std::int64_t filter = 0;
    std::int64_t sinr = 0;

    std::int64_t total() const {
        return reconstruct + precoder + covariance + inverse + filter + sinr;
    }

    FlopLedger& operator+=(const FlopLedger& o) {
        reconstruct += o.reconstruct;
        precoder += o.precoder;
        covariance += o.covariance;
        inverse += o.inverse;
        filter += o.filter;
        sinr += o.sinr;
        return *this;
    }
};

}  // namespace gwt

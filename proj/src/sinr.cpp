#include "gwtucker/sinr.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace gwt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::int64_t i64(int v) { return static_cast<std::int64_t>(v); }

void check_finite(const Matrix& m, const char* what) {
    if (!m.allFinite())
        throw std::invalid_argument(std::string(what) + ": non-finite input");
}

std::vector<StreamSinr> stream_sinrs(const Matrix& w, const Matrix& q, const Matrix& hv) {
    const int streams = static_cast<int>(w.cols());
    std::vector<StreamSinr> out(streams);
    for (int r = 0; r < streams; ++r) {
        const Cplx amp = w.col(r).dot(hv.col(r));  // w_r^H (H V)_r
        const double s = std::norm(amp);
        double denom = std::real(Cplx(w.col(r).dot(q * w.col(r)))) - s;
        if (denom <= -1e-12)
            throw std::runtime_error("sinr: interference-plus-noise power is negative for stream " +
                                     std::to_string(r) + " (numerically invalid configuration)");
        denom = std::max(denom, std::numeric_limits<double>::min());
        out[r].signal_power = s;
        out[r].sinr = s / denom;
    }
    return out;
}

}  // namespace

std::vector<std::pair<int, int>> scope_pairs(const SystemTopology& topology,
                                             InterferenceScope scope, int i, int j) {
    std::vector<std::pair<int, int>> pairs;
    if (scope == InterferenceScope::full) {
        pairs.reserve(static_cast<std::size_t>(topology.num_users()));
        for (int k = 0; k < topology.num_cells; ++k)
            for (int l = 0; l < topology.users_per_cell; ++l)
                pairs.emplace_back(k, l);
        return pairs;
    }
    pairs.emplace_back(i, j);  // desired signal stays in the total covariance
    for (int k = 0; k < topology.num_cells; ++k)
        if (k != i)
            pairs.emplace_back(k, 0);
    return pairs;
}

// ---------------------------------------------------------------------------
// Full-size path

AssembledChannels assemble_all_full(const ChannelSet& channels, FlopLedger* ledger) {
    AssembledChannels out;
    out.topology = channels.topology;
    out.h.reserve(channels.tensors.size());
    for (std::size_t l = 0; l < channels.tensors.size(); ++l)
        out.h.push_back(assemble_channel_full(channels.tensors[l], channels.coeffs[l], ledger));
    return out;
}

Precoder precoder_full(const Matrix& h, int streams, FlopLedger* ledger) {
    if (streams > std::min(h.rows(), h.cols()))
        throw std::invalid_argument("precoder: stream count " + std::to_string(streams) +
                                    " exceeds min dimension of " + std::to_string(h.rows()) + "x" +
                                    std::to_string(h.cols()) + " channel");
    TruncatedSvd svd = truncated_svd(h, streams);
    if (ledger)
        ledger->precoder += i64(static_cast<int>(h.rows())) * h.cols() * streams;
    return {std::move(svd.v), std::move(svd.singular_values), std::move(svd.u)};
}

std::vector<Precoder> precoders_full(const AssembledChannels& assembled, FlopLedger* ledger) {
    const SystemTopology& topo = assembled.topology;
    std::vector<Precoder> out;
    out.reserve(static_cast<std::size_t>(topo.num_users()));
    for (int i = 0; i < topo.num_cells; ++i)
        for (int j = 0; j < topo.users_per_cell; ++j)
            out.push_back(precoder_full(assembled.at(i, i, j), topo.num_streams, ledger));
    return out;
}

Matrix covariance_full(const AssembledChannels& assembled, const std::vector<Precoder>& precoders,
                       InterferenceScope scope, int i, int j, FlopLedger* ledger) {
    const SystemTopology& topo = assembled.topology;
    const double sigma = topo.noise_std;
    Matrix q = (sigma * sigma) * Matrix::Identity(topo.rx_antennas, topo.rx_antennas);
    for (const auto& [k, l] : scope_pairs(topo, scope, i, j)) {
        const std::size_t user = static_cast<std::size_t>(k) * topo.users_per_cell + l;
        if (user >= precoders.size())
            throw std::invalid_argument("covariance: scope references missing precoder");
        Matrix term = assembled.at(k, i, j) * precoders[user].v;
        q.noalias() += term * term.adjoint();
    }
    if (ledger) {
        const std::int64_t M = topo.rx_antennas, N = topo.tx_antennas, L = topo.num_streams;
        ledger->covariance += i64(topo.num_users()) * (M * N * L + M * M * L);
    }
    return q;
}

Matrix filter_full(const Matrix& q, const Matrix& h_serving, const Matrix& v_serving,
                   FlopLedger* ledger) {
    check_finite(q, "filter");
    check_finite(h_serving, "filter");
    check_finite(v_serving, "filter");
    Matrix hv = h_serving * v_serving;
    Eigen::LLT<Matrix> llt(q);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("filter: covariance is not positive definite");
    Matrix w = llt.solve(hv);
    if (ledger) {
        const std::int64_t M = q.rows(), L = v_serving.cols();
        ledger->inverse += M * M * M;
        ledger->filter += M * M * L;
    }
    return w;
}

std::vector<StreamSinr> sinr_full(const Matrix& w, const Matrix& q, const Matrix& h_serving,
                                  const Matrix& v_serving, FlopLedger* ledger) {
    Matrix hv = h_serving * v_serving;
    if (ledger) {
        const std::int64_t M = q.rows(), L = w.cols();
        ledger->sinr += L * (M * M + 2 * M);
    }
    return stream_sinrs(w, q, hv);
}

// ---------------------------------------------------------------------------
// Compressed path

CompressedChannels assemble_all_compressed(const SystemTopology& topology,
                                           const GroupwiseFactorSet& factors,
                                           const std::vector<Vector>& coeffs, FlopLedger* ledger) {
    if (coeffs.size() != factors.cores.size())
        throw std::invalid_argument("assemble_all_compressed: coefficient grid does not match cores");
    CompressedChannels out;
    out.topology = topology;
    out.ranks = factors.ranks;
    out.h.reserve(factors.cores.size());
    for (std::size_t l = 0; l < factors.cores.size(); ++l)
        out.h.push_back(assemble_channel_compressed(factors.cores[l], factors.delay_factors[l],
                                                    coeffs[l], ledger));
    return out;
}

Precoder precoder_compressed(const Matrix& h_small, int streams, FlopLedger* ledger) {
    if (streams > std::min(h_small.rows(), h_small.cols()))
        throw std::invalid_argument("precoder: stream count " + std::to_string(streams) +
                                    " exceeds compressed channel size " + std::to_string(h_small.rows()) +
                                    "x" + std::to_string(h_small.cols()) +
                                    " (ranks chosen below stream count)");
    TruncatedSvd svd = truncated_svd(h_small, streams);
    if (ledger)
        ledger->precoder += i64(static_cast<int>(h_small.rows())) * h_small.cols() * streams;
    return {std::move(svd.v), std::move(svd.singular_values), std::move(svd.u)};
}

std::vector<Precoder> precoders_compressed(const CompressedChannels& compressed, FlopLedger* ledger) {
    const SystemTopology& topo = compressed.topology;
    std::vector<Precoder> out;
    out.reserve(static_cast<std::size_t>(topo.num_users()));
    for (int i = 0; i < topo.num_cells; ++i)
        for (int j = 0; j < topo.users_per_cell; ++j)
            out.push_back(precoder_compressed(compressed.at(i, i, j), topo.num_streams, ledger));
    return out;
}

Matrix covariance_compressed(const CompressedChannels& compressed,
                             const std::vector<Precoder>& precoders, InterferenceScope scope,
                             int i, int j, FlopLedger* ledger) {
    const SystemTopology& topo = compressed.topology;
    const double sigma = topo.noise_std;
    const int m = compressed.ranks.m;
    Matrix q = (sigma * sigma) * Matrix::Identity(m, m);
    for (const auto& [k, l] : scope_pairs(topo, scope, i, j)) {
        const std::size_t user = static_cast<std::size_t>(k) * topo.users_per_cell + l;
        if (user >= precoders.size())
            throw std::invalid_argument("covariance: scope references missing precoder");
        Matrix term = compressed.at(k, i, j) * precoders[user].v;
        q.noalias() += term * term.adjoint();
    }
    if (ledger) {
        const std::int64_t mm = m, n = compressed.ranks.n, L = topo.num_streams;
        ledger->covariance += i64(topo.num_users()) * (mm * n * L + mm * mm * L);
    }
    return q;
}

WoodburyInverse woodbury_inverse_apply(const Matrix& q_small, double sigma, FlopLedger* ledger) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("woodbury_inverse_apply: sigma must be > 0");
    check_finite(q_small, "woodbury_inverse_apply");

    Eigen::LLT<Matrix> llt(q_small);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("woodbury_inverse_apply: covariance is numerically singular");
    // Cheap condition estimate from the Cholesky diagonal.
    const Eigen::VectorXd diag = llt.matrixLLT().diagonal().real();
    const double ratio = diag.maxCoeff() / diag.minCoeff();
    if (ratio * ratio > 1e14)
        throw std::runtime_error("woodbury_inverse_apply: covariance is numerically singular "
                                 "(condition estimate above 1e14)");

    const Eigen::Index m = q_small.rows();
    WoodburyInverse out;
    out.t = llt.solve(q_small - (sigma * sigma) * Matrix::Identity(m, m));
    out.inv_sigma_sq = 1.0 / (sigma * sigma);
    if (ledger)
        ledger->inverse += 2 * static_cast<std::int64_t>(m) * m * m;  // factorization + product
    return out;
}

Matrix filter_compressed(const WoodburyInverse& inverse, const Matrix& h_serving,
                         const Matrix& v_serving, FlopLedger* ledger) {
    check_finite(h_serving, "filter_compressed");
    check_finite(v_serving, "filter_compressed");
    Matrix hv = h_serving * v_serving;
    Matrix w = inverse.inv_sigma_sq * (hv - inverse.t * hv);
    if (ledger) {
        const std::int64_t m = inverse.t.rows(), L = v_serving.cols();
        ledger->filter += m * m * L + m * L;
    }
    return w;
}

std::vector<StreamSinr> sinr_compressed(const Matrix& w_small, const Matrix& q_small,
                                        const Matrix& h_serving, const Matrix& v_serving,
                                        FlopLedger* ledger) {
    Matrix hv = h_serving * v_serving;
    if (ledger) {
        const std::int64_t m = q_small.rows(), L = w_small.cols();
        ledger->sinr += L * (m * m + 2 * m);
    }
    // Denominator uses w~^H Qs w~: the receive factor drops out of
    // w^H Q w because it has orthonormal columns, so the small-form value
    // equals the full-form one.
    return stream_sinrs(w_small, q_small, hv);
}

// ---------------------------------------------------------------------------
// Whole-system runs

SinrReport evaluate_assembled(const AssembledChannels& assembled, InterferenceScope scope,
                              FlopLedger initial) {
    const SystemTopology& topo = assembled.topology;
    SinrReport report;
    report.num_cells = topo.num_cells;
    report.users_per_cell = topo.users_per_cell;
    report.num_streams = topo.num_streams;
    report.ledger = initial;
    report.signal_power.resize(static_cast<std::size_t>(topo.num_users()) * topo.num_streams);
    report.sinr.resize(report.signal_power.size());

    std::vector<Precoder> precoders = precoders_full(assembled, &report.ledger);
    for (int i = 0; i < topo.num_cells; ++i)
        for (int j = 0; j < topo.users_per_cell; ++j) {
            const Matrix& h = assembled.at(i, i, j);
            const Precoder& pre = precoders[report.user_index(i, j)];
            Matrix q = covariance_full(assembled, precoders, scope, i, j, &report.ledger);
            Matrix w = filter_full(q, h, pre.v, &report.ledger);
            std::vector<StreamSinr> streams = sinr_full(w, q, h, pre.v, &report.ledger);
            for (int r = 0; r < topo.num_streams; ++r) {
                const std::size_t at = static_cast<std::size_t>(report.user_index(i, j)) * topo.num_streams + r;
                report.signal_power[at] = streams[r].signal_power;
                report.sinr[at] = streams[r].sinr;
            }
        }
    return report;
}

SinrReport run_full_pipeline(const ChannelSet& channels, InterferenceScope scope) {
    const auto t0 = Clock::now();
    FlopLedger ledger;
    AssembledChannels assembled = assemble_all_full(channels, &ledger);
    SinrReport report = evaluate_assembled(assembled, scope, ledger);
    report.seconds = seconds_since(t0);
    return report;
}

SinrReport run_compressed_pipeline(const SystemTopology& topology, const GroupwiseFactorSet& factors,
                                   const std::vector<Vector>& coeffs, InterferenceScope scope) {
    const auto t0 = Clock::now();
    SinrReport report;
    report.num_cells = topology.num_cells;
    report.users_per_cell = topology.users_per_cell;
    report.num_streams = topology.num_streams;
    report.signal_power.resize(static_cast<std::size_t>(topology.num_users()) * topology.num_streams);
    report.sinr.resize(report.signal_power.size());

    CompressedChannels compressed = assemble_all_compressed(topology, factors, coeffs, &report.ledger);
    std::vector<Precoder> precoders = precoders_compressed(compressed, &report.ledger);
    const double sigma = topology.noise_std;

    for (int i = 0; i < topology.num_cells; ++i)
        for (int j = 0; j < topology.users_per_cell; ++j) {
            const Matrix& h = compressed.at(i, i, j);
            const Precoder& pre = precoders[report.user_index(i, j)];
            Matrix q = covariance_compressed(compressed, precoders, scope, i, j, &report.ledger);
            WoodburyInverse inverse = woodbury_inverse_apply(q, sigma, &report.ledger);
            Matrix w = filter_compressed(inverse, h, pre.v, &report.ledger);
            std::vector<StreamSinr> streams = sinr_compressed(w, q, h, pre.v, &report.ledger);
            for (int r = 0; r < topology.num_streams; ++r) {
                const std::size_t at = static_cast<std::size_t>(report.user_index(i, j)) * topology.num_streams + r;
                report.signal_power[at] = streams[r].signal_power;
                report.sinr[at] = streams[r].sinr;
            }
        }
    report.seconds = seconds_since(t0);
    return report;
}

SinrReport run_reconstructed_pipeline(const SystemTopology& topology,
                                      const std::vector<TuckerFactors>& links,
                                      const std::vector<Vector>& coeffs, InterferenceScope scope) {
    if (links.size() != coeffs.size() || static_cast<int>(links.size()) != topology.num_links())
        throw std::invalid_argument("run_reconstructed_pipeline: grid sizes do not match topology");

    const auto t0 = Clock::now();
    FlopLedger ledger;
    AssembledChannels assembled;
    assembled.topology = topology;
    assembled.h.reserve(links.size());
    for (std::size_t l = 0; l < links.size(); ++l) {
        const TuckerFactors& f = links[l];
        Matrix h_small = assemble_channel_compressed(f.core, f.delay, coeffs[l], &ledger);
        // Distinct per-link factors: expand back to full size. Transposed
        // transmit factor per the Tucker mode-2 convention.
        assembled.h.push_back(f.rx * h_small * f.tx.transpose());
        const std::int64_t M = f.rx.rows(), m = f.rx.cols(), n = f.tx.cols(), N = f.tx.rows();
        ledger.reconstruct += M * m * n + M * n * N;
    }
    SinrReport report = evaluate_assembled(assembled, scope, ledger);
    report.seconds = seconds_since(t0);
    return report;
}

FlopLedger flop_estimate(const SystemTopology& topology, const CompressionRanks& ranks,
                         PipelinePath path) {
    topology.validate();
    ranks.validate_against(topology.rx_antennas, topology.tx_antennas, topology.num_taps);

    const std::int64_t J = topology.num_cells, K = topology.users_per_cell;
    const std::int64_t M = topology.rx_antennas, N = topology.tx_antennas, P = topology.num_taps;
    const std::int64_t L = topology.num_streams;
    const std::int64_t m = ranks.m, n = ranks.n, p = ranks.p;
    const std::int64_t links = J * J * K;
    const std::int64_t users = J * K;

    FlopLedger out;
    if (path == PipelinePath::full) {
        out.reconstruct = links * (M * N * P);
        out.precoder = users * (M * N * L);
        out.covariance = users * users * (M * N * L + M * M * L);
        out.inverse = users * (M * M * M);
        out.filter = users * (M * M * L);
        out.sinr = users * L * (M * M + 2 * M);
    } else {
        out.reconstruct = links * (m * n * p + P * p);
        out.precoder = users * (m * n * L);
        out.covariance = users * users * (m * n * L + m * m * L);
        out.inverse = users * (2 * m * m * m);
        out.filter = users * (m * m * L + m * L);
        out.sinr = users * L * (m * m + 2 * m);
    }
    return out;
}

}  // namespace gwt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gwtucker/metrics.hpp"
#include "gwtucker/sinr.hpp"
#include "support/oracles.hpp"
#include "support/random_inputs.hpp"

using namespace gwt;
using testing_inputs::Rng;

namespace {

SystemTopology desk_topology(int cells, int users, int m_dim = 6, int n_dim = 8, int taps = 5,
                             int streams = 2, double sigma = 0.1) {
    SystemTopology topo;
    topo.num_cells = cells;
    topo.users_per_cell = users;
    topo.rx_antennas = m_dim;
    topo.tx_antennas = n_dim;
    topo.num_taps = taps;
    topo.num_streams = streams;
    topo.noise_std = sigma;
    return topo;
}

/// Expand a groupwise solution back to approximate full-size channels.
AssembledChannels reconstructed_channels(const ChannelSet& set, const GroupwiseFactorSet& fs) {
    AssembledChannels out;
    out.topology = set.topology;
    for (int k = 0; k < set.topology.num_cells; ++k)
        for (int i = 0; i < set.topology.num_cells; ++i)
            for (int j = 0; j < set.topology.users_per_cell; ++j) {
                Matrix h_small =
                    assemble_channel_compressed(fs.core(k, i, j), fs.delay(k, i, j), set.coeff(k, i, j));
                out.h.push_back(fs.rx(i, j) * h_small * fs.tx(k).transpose());
            }
    return out;
}

}  // namespace

TEST_CASE("precoder on a diagonal channel picks the leading axes") {
    Matrix h = Matrix::Zero(4, 3);
    h(0, 0) = 3.0;
    h(1, 1) = 2.0;
    h(2, 2) = 1.0;
    FlopLedger ledger;
    Precoder pre = precoder_full(h, 2, &ledger);
    CHECK(pre.singular_values(0) == doctest::Approx(3.0));
    CHECK(pre.singular_values(1) == doctest::Approx(2.0));
    CHECK(std::abs(pre.v(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(pre.v(1, 1)) == doctest::Approx(1.0));
    CHECK(pre.v(0, 0).real() > 0.0);  // phase convention: largest entry real positive
    CHECK(ledger.precoder == 4 * 3 * 2);

    CHECK_THROWS_AS(precoder_full(h, 4), std::invalid_argument);
}

TEST_CASE("rank-one channel has singular value ||u|| * ||v||") {
    Rng rng(70);
    Vector u = rng.vector(5);
    Vector v = rng.vector(7);
    Matrix h = u * v.adjoint();
    Precoder pre = precoder_full(h, 1);
    CHECK(pre.singular_values(0) == doctest::Approx(u.norm() * v.norm()).epsilon(1e-12));
}

TEST_CASE("truncated precoder is the best low-rank fit") {
    Rng rng(71);
    Matrix h = rng.matrix(6, 10);
    Precoder pre = precoder_full(h, 3);
    Matrix approx = pre.u * pre.singular_values.asDiagonal() * pre.v.adjoint();
    const double err = (h - approx).squaredNorm();

    std::vector<double> sv = oracle::singular_values(h);
    double tail = 0.0;
    for (std::size_t r = 3; r < sv.size(); ++r)
        tail += sv[r] * sv[r];
    CHECK(err == doctest::Approx(tail).epsilon(1e-8));
}

TEST_CASE("covariance with only the serving link and unit noise") {
    Rng rng(72);
    SystemTopology topo = desk_topology(1, 1, 6, 8, 5, 2, 1.0);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 5);
    AssembledChannels assembled = assemble_all_full(set);
    std::vector<Precoder> precs = precoders_full(assembled);
    Matrix q = covariance_full(assembled, precs, InterferenceScope::full, 0, 0);
    Matrix hv = assembled.at(0, 0, 0) * precs[0].v;
    Matrix want = hv * hv.adjoint() + Matrix::Identity(6, 6);
    CHECK((q - want).norm() < 1e-12 * want.norm());
}

TEST_CASE("covariance approaches sigma^2 I in the noise-dominated limit") {
    SystemTopology topo = desk_topology(2, 1, 6, 8, 5, 2, 1e6);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 6);
    AssembledChannels assembled = assemble_all_full(set);
    std::vector<Precoder> precs = precoders_full(assembled);
    Matrix q = covariance_full(assembled, precs, InterferenceScope::full, 0, 0);
    const double s2 = 1e12;
    CHECK((q - s2 * Matrix::Identity(6, 6)).norm() / s2 < 1e-9);
}

TEST_CASE("covariance matches a term-by-term reference sum") {
    SystemTopology topo = desk_topology(2, 1);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 7);
    AssembledChannels assembled = assemble_all_full(set);
    FlopLedger ledger;
    std::vector<Precoder> precs = precoders_full(assembled);

    for (InterferenceScope scope : {InterferenceScope::full, InterferenceScope::paper_experiment}) {
        for (int i = 0; i < 2; ++i) {
            Matrix q = covariance_full(assembled, precs, scope, i, 0, &ledger);
            Matrix ref = (0.1 * 0.1) * Matrix::Identity(6, 6);
            for (const auto& [k, l] : scope_pairs(topo, scope, i, 0)) {
                Matrix term = assembled.at(k, i, 0) * precs[topo.users_per_cell * k + l].v;
                ref += term * term.adjoint();
            }
            CHECK((q - ref).norm() < 1e-10);
        }
    }
    // ledger charges the closed-form JK(MNL + M^2 L) per user regardless of scope
    CHECK(ledger.covariance == 4 * 2 * (6 * 8 * 2 + 6 * 6 * 2));
}

TEST_CASE("scope selection keeps the serving pair and first users of other cells") {
    SystemTopology topo = desk_topology(3, 2);
    auto pairs = scope_pairs(topo, InterferenceScope::paper_experiment, 1, 1);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0] == std::pair<int, int>{1, 1});
    CHECK(pairs[1] == std::pair<int, int>{0, 0});
    CHECK(pairs[2] == std::pair<int, int>{2, 0});
    CHECK(scope_pairs(topo, InterferenceScope::full, 1, 1).size() == 6);
}

TEST_CASE("filter solves against simple covariances") {
    Rng rng(73);
    Matrix h = rng.matrix(6, 8);
    Matrix v = rng.orthonormal(8, 2);
    Matrix hv = h * v;

    FlopLedger ledger;
    Matrix w1 = filter_full(Matrix::Identity(6, 6), h, v, &ledger);
    CHECK((w1 - hv).norm() < 1e-12);
    Matrix w2 = filter_full(2.0 * Matrix::Identity(6, 6), h, v);
    CHECK((w2 - 0.5 * hv).norm() < 1e-12);
    CHECK(ledger.inverse == 6 * 6 * 6);
    CHECK(ledger.filter == 6 * 6 * 2);

    Matrix a = rng.matrix(6, 6);
    Matrix q = a * a.adjoint() + Matrix::Identity(6, 6);
    Matrix w = filter_full(q, h, v);
    CHECK((q * w - hv).norm() <= 1e-10 * hv.norm());

    Matrix bad = h;
    bad(0, 0) = Cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(filter_full(q, bad, v), std::invalid_argument);
}

TEST_CASE("single-user single-stream SINR has the closed form s1^2 / sigma^2") {
    for (std::uint64_t seed : {11u, 22u, 33u}) {
        SystemTopology topo = desk_topology(1, 1, 6, 8, 5, 1, 0.3);
        ChannelSet set = generate_channel_set(topo, GeneratorParams{}, seed);
        AssembledChannels assembled = assemble_all_full(set);
        std::vector<Precoder> precs = precoders_full(assembled);
        Matrix q = covariance_full(assembled, precs, InterferenceScope::full, 0, 0);
        Matrix w = filter_full(q, assembled.at(0, 0, 0), precs[0].v);
        auto streams = sinr_full(w, q, assembled.at(0, 0, 0), precs[0].v);
        const double s1 = precs[0].singular_values(0);
        CHECK(streams[0].sinr ==
              doctest::Approx(s1 * s1 / (0.3 * 0.3)).epsilon(1e-10));
    }
}

TEST_CASE("precoder sets are orthonormal with non-increasing singular values") {
    SystemTopology topo = desk_topology(2, 2);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 77);
    AssembledChannels assembled = assemble_all_full(set);
    for (const Precoder& pre : precoders_full(assembled)) {
        CHECK((pre.v.adjoint() * pre.v - Matrix::Identity(2, 2)).norm() < 1e-10);
        CHECK((pre.u.adjoint() * pre.u - Matrix::Identity(2, 2)).norm() < 1e-10);
        CHECK(pre.singular_values(0) >= pre.singular_values(1));
    }
}

TEST_CASE("SINR is invariant to singular-vector phase twists") {
    SystemTopology topo = desk_topology(2, 2);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 78);
    AssembledChannels assembled = assemble_all_full(set);
    std::vector<Precoder> precs = precoders_full(assembled);

    auto run_user = [&](const std::vector<Precoder>& p, int i, int j) {
        Matrix q = covariance_full(assembled, p, InterferenceScope::full, i, j);
        const Matrix& h = assembled.at(i, i, j);
        const Matrix& v = p[topo.users_per_cell * i + j].v;
        Matrix w = filter_full(q, h, v);
        return sinr_full(w, q, h, v);
    };

    std::vector<Precoder> twisted = precs;
    for (Precoder& pre : twisted)
        for (int r = 0; r < 2; ++r) {
            const Cplx phase = std::polar(1.0, 0.31 + 0.7 * r);
            pre.v.col(r) *= phase;
            pre.u.col(r) *= phase;
        }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            auto base = run_user(precs, i, j);
            auto other = run_user(twisted, i, j);
            for (int r = 0; r < 2; ++r) {
                CHECK(other[r].signal_power == doctest::Approx(base[r].signal_power).epsilon(1e-10));
                CHECK(other[r].sinr == doctest::Approx(base[r].sinr).epsilon(1e-10));
            }
        }
}

TEST_CASE("per-stream SINR is invariant to rescaling a filter column") {
    Rng rng(74);
    SystemTopology topo = desk_topology(2, 2);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 8);
    AssembledChannels assembled = assemble_all_full(set);
    std::vector<Precoder> precs = precoders_full(assembled);
    Matrix q = covariance_full(assembled, precs, InterferenceScope::full, 0, 1);
    const Matrix& h = assembled.at(0, 0, 1);
    const Matrix& v = precs[1].v;
    Matrix w = filter_full(q, h, v);
    auto base = sinr_full(w, q, h, v);

    Matrix scaled = w;
    scaled.col(0) *= Cplx(0.3, -1.7);
    scaled.col(1) *= Cplx(-2.0, 0.4);
    auto other = sinr_full(scaled, q, h, v);
    for (int r = 0; r < 2; ++r)
        CHECK(other[r].sinr == doctest::Approx(base[r].sinr).epsilon(1e-10));
}

TEST_CASE("SINR vanishes in the noise-dominated limit") {
    SystemTopology topo = desk_topology(1, 1, 6, 8, 5, 2, 1e6);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 9);
    SinrReport report = run_full_pipeline(set, InterferenceScope::full);
    for (double s : report.sinr)
        CHECK(s < 1e-6);
}

TEST_CASE("lossless covariance satisfies the factor-elimination identity") {
    SystemTopology topo = desk_topology(2, 2);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 10);
    auto [fs, trace] = groupwise_solve(set, {6, 8, 5}, 2);

    AssembledChannels assembled = assemble_all_full(set);
    std::vector<Precoder> full_precs = precoders_full(assembled);
    CompressedChannels compressed = assemble_all_compressed(topo, fs, set.coeffs);
    std::vector<Precoder> small_precs = precoders_compressed(compressed);

    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Matrix q = covariance_full(assembled, full_precs, InterferenceScope::paper_experiment, i, j);
            Matrix qs = covariance_compressed(compressed, small_precs,
                                              InterferenceScope::paper_experiment, i, j);
            const Matrix& a = fs.rx(i, j);
            Matrix lifted = a * (qs - 0.01 * Matrix::Identity(6, 6)) * a.adjoint() +
                            0.01 * Matrix::Identity(6, 6);
            CHECK((lifted - q).norm() <= 1e-8 * q.norm());
        }
}

TEST_CASE("small-form inverse matches a dense inverse and the identity check") {
    Rng rng(75);
    SUBCASE("pure noise gives t = 0") {
        Matrix q = 0.25 * Matrix::Identity(4, 4);
        WoodburyInverse wb = woodbury_inverse_apply(q, 0.5);
        CHECK(wb.t.norm() < 1e-12);
        CHECK(wb.inv_sigma_sq == doctest::Approx(4.0));
    }
    SUBCASE("random positive definite case") {
        Matrix a = rng.matrix(4, 4);
        Matrix q = a * a.adjoint() + 0.04 * Matrix::Identity(4, 4);
        FlopLedger ledger;
        WoodburyInverse wb = woodbury_inverse_apply(q, 0.2, &ledger);
        Matrix want = q.inverse() * (q - 0.04 * Matrix::Identity(4, 4));
        CHECK((wb.t - want).norm() < 1e-10);
        CHECK(ledger.inverse == 2 * 4 * 4 * 4);
    }
    SUBCASE("singular covariance is rejected") {
        Matrix q = Matrix::Zero(3, 3);
        q(0, 0) = 1.0;  // rank deficient
        CHECK_THROWS_AS(woodbury_inverse_apply(q, 1e-9), std::runtime_error);
    }
}

TEST_CASE("lossless full inverse assembled from the small form is the true inverse") {
    SystemTopology topo = desk_topology(2, 2);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 11);
    auto [fs, trace] = groupwise_solve(set, {6, 8, 5}, 2);

    AssembledChannels assembled = assemble_all_full(set);
    std::vector<Precoder> full_precs = precoders_full(assembled);
    CompressedChannels compressed = assemble_all_compressed(topo, fs, set.coeffs);
    std::vector<Precoder> small_precs = precoders_compressed(compressed);

    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Matrix q = covariance_full(assembled, full_precs, InterferenceScope::full, i, j);
            Matrix qs =
                covariance_compressed(compressed, small_precs, InterferenceScope::full, i, j);
            WoodburyInverse wb = woodbury_inverse_apply(qs, 0.1);
            const Matrix& a = fs.rx(i, j);
            Matrix qinv =
                wb.inv_sigma_sq * (Matrix::Identity(6, 6) - a * wb.t * a.adjoint());
            CHECK((q * qinv - Matrix::Identity(6, 6)).norm() <= 1e-8);
        }
}

TEST_CASE("compressed filter forms agree") {
    Rng rng(76);
    SUBCASE("no signal reduces to scaling") {
        Matrix h = rng.matrix(4, 6);
        Matrix v = rng.orthonormal(6, 2);
        WoodburyInverse wb{Matrix::Zero(4, 4), 1.0 / 0.04};
        Matrix w = filter_compressed(wb, h, v);
        CHECK((w - (h * v) / 0.04).norm() < 1e-12);
    }
    SUBCASE("matches the direct solve") {
        Matrix a = rng.matrix(4, 4);
        Matrix q = a * a.adjoint() + 0.04 * Matrix::Identity(4, 4);
        Matrix h = rng.matrix(4, 6);
        Matrix v = rng.orthonormal(6, 2);
        WoodburyInverse wb = woodbury_inverse_apply(q, 0.2);
        Matrix w = filter_compressed(wb, h, v);
        Matrix direct = q.llt().solve(h * v);
        CHECK((w - direct).norm() <= 1e-10 * direct.norm());
    }
}

TEST_CASE("lossless compressed pipeline reproduces the full pipeline exactly") {
    SystemTopology topo = desk_topology(2, 2);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 12);
    auto [fs, trace] = groupwise_solve(set, {6, 8, 5}, 2);

    SinrReport full = run_full_pipeline(set, InterferenceScope::paper_experiment);
    SinrReport comp =
        run_compressed_pipeline(topo, fs, set.coeffs, InterferenceScope::paper_experiment);
    REQUIRE(full.sinr.size() == comp.sinr.size());
    for (std::size_t at = 0; at < full.sinr.size(); ++at)
        CHECK(comp.sinr[at] == doctest::Approx(full.sinr[at]).epsilon(1e-8));

    // filter lift: A w~ is collinear with the full filter column by column
    AssembledChannels assembled = assemble_all_full(set);
    std::vector<Precoder> full_precs = precoders_full(assembled);
    CompressedChannels compressed = assemble_all_compressed(topo, fs, set.coeffs);
    std::vector<Precoder> small_precs = precoders_compressed(compressed);
    Matrix q = covariance_full(assembled, full_precs, InterferenceScope::paper_experiment, 0, 0);
    Matrix w = filter_full(q, assembled.at(0, 0, 0), full_precs[0].v);
    Matrix qs = covariance_compressed(compressed, small_precs, InterferenceScope::paper_experiment, 0, 0);
    WoodburyInverse wb = woodbury_inverse_apply(qs, 0.1);
    Matrix ws = filter_compressed(wb, compressed.at(0, 0, 0), small_precs[0].v);
    Matrix lifted = fs.rx(0, 0) * ws;
    for (int r = 0; r < 2; ++r) {
        const double align = std::abs(lifted.col(r).dot(w.col(r)));
        CHECK(align == doctest::Approx(lifted.col(r).norm() * w.col(r).norm()).epsilon(1e-8));
        CHECK(lifted.col(r).norm() == doctest::Approx(w.col(r).norm()).epsilon(1e-8));
    }
}

TEST_CASE("compressed covariance matches a term-by-term reference sum") {
    SystemTopology topo = desk_topology(2, 1);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 17);
    auto [fs, trace] = groupwise_solve(set, {4, 5, 3}, 3);
    CompressedChannels compressed = assemble_all_compressed(topo, fs, set.coeffs);
    std::vector<Precoder> precs = precoders_compressed(compressed);
    for (int i = 0; i < 2; ++i) {
        Matrix q = covariance_compressed(compressed, precs, InterferenceScope::full, i, 0);
        Matrix ref = (0.1 * 0.1) * Matrix::Identity(4, 4);
        for (const auto& [k, l] : scope_pairs(topo, InterferenceScope::full, i, 0)) {
            Matrix term = compressed.at(k, i, 0) * precs[k].v;
            ref += term * term.adjoint();
        }
        CHECK((q - ref).norm() < 1e-10);
    }
}

TEST_CASE("compressed precoder refuses ranks below the stream count") {
    Rng rng(79);
    Matrix h_small = rng.matrix(3, 4);
    CHECK_THROWS_WITH_AS(precoder_compressed(h_small, 4), doctest::Contains("stream count"),
                         std::invalid_argument);
}

TEST_CASE("single-user compressed run keeps the closed form at full ranks") {
    SystemTopology topo = desk_topology(1, 1, 6, 8, 5, 1, 0.3);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 13);
    auto [fs, trace] = groupwise_solve(set, {6, 8, 5}, 1);
    SinrReport comp = run_compressed_pipeline(topo, fs, set.coeffs, InterferenceScope::full);
    Precoder pre = precoder_full(assemble_channel_full(set.tensor(0, 0, 0), set.coeff(0, 0, 0)), 1);
    const double s1 = pre.singular_values(0);
    CHECK(comp.sinr[0] == doctest::Approx(s1 * s1 / 0.09).epsilon(1e-8));
}

TEST_CASE("zero serving channel yields zero signal power and zero SINR") {
    Matrix w = Matrix::Zero(4, 2);
    Matrix q = 0.04 * Matrix::Identity(4, 4);
    Matrix h = Matrix::Zero(4, 6);
    Matrix v = Matrix::Identity(6, 2);
    auto streams = sinr_compressed(w, q, h, v);
    for (const StreamSinr& s : streams) {
        CHECK(s.signal_power == 0.0);
        CHECK(s.sinr == 0.0);
    }
}

TEST_CASE("truncated compressed pipeline equals the full pipeline on rebuilt channels") {
    SystemTopology topo = desk_topology(2, 2);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 14);
    auto [fs, trace] = groupwise_solve(set, {4, 5, 3}, 6);

    SinrReport comp =
        run_compressed_pipeline(topo, fs, set.coeffs, InterferenceScope::paper_experiment);
    AssembledChannels rebuilt = reconstructed_channels(set, fs);
    SinrReport ref = evaluate_assembled(rebuilt, InterferenceScope::paper_experiment);
    REQUIRE(comp.sinr.size() == ref.sinr.size());
    for (std::size_t at = 0; at < comp.sinr.size(); ++at)
        CHECK(comp.sinr[at] == doctest::Approx(ref.sinr[at]).epsilon(1e-8));
}

TEST_CASE("flop model: closed forms, spot values and pipeline agreement") {
    SystemTopology production;
    production.num_cells = 21;
    production.users_per_cell = 5;
    production.rx_antennas = 64;
    production.tx_antennas = 512;
    production.num_taps = 401;
    production.num_streams = 4;
    production.noise_std = 0.1;
    const CompressionRanks ranks{60, 230, 150};

    FlopLedger full = flop_estimate(production, ranks, PipelinePath::full);
    FlopLedger comp = flop_estimate(production, ranks, PipelinePath::compressed);
    const std::int64_t links = 21 * 21 * 5;
    CHECK(full.reconstruct / links == 13139968);
    CHECK(comp.reconstruct / links == 2130150);
    CHECK(full.total() > comp.total());

    // no-compression corner: the factored rebuild costs more, not less
    SystemTopology small = desk_topology(2, 2);
    CompressionRanks lossless{6, 8, 5};
    FlopLedger f2 = flop_estimate(small, lossless, PipelinePath::full);
    FlopLedger c2 = flop_estimate(small, lossless, PipelinePath::compressed);
    CHECK(c2.reconstruct >= f2.reconstruct);

    // the pipelines charge exactly what the closed form predicts
    ChannelSet set = generate_channel_set(small, GeneratorParams{}, 15);
    auto [fs, trace] = groupwise_solve(set, {4, 5, 3}, 2);
    SinrReport full_run = run_full_pipeline(set, InterferenceScope::paper_experiment);
    SinrReport comp_run =
        run_compressed_pipeline(small, fs, set.coeffs, InterferenceScope::paper_experiment);
    FlopLedger fwant = flop_estimate(small, {4, 5, 3}, PipelinePath::full);
    FlopLedger cwant = flop_estimate(small, {4, 5, 3}, PipelinePath::compressed);
    CHECK(full_run.ledger.total() == fwant.total());
    CHECK(comp_run.ledger.total() == cwant.total());
    CHECK(full_run.ledger.reconstruct == fwant.reconstruct);
    CHECK(full_run.ledger.precoder == fwant.precoder);
    CHECK(full_run.ledger.covariance == fwant.covariance);
    CHECK(full_run.ledger.inverse == fwant.inverse);
    CHECK(full_run.ledger.filter == fwant.filter);
    CHECK(full_run.ledger.sinr == fwant.sinr);
    CHECK(comp_run.ledger.inverse == cwant.inverse);
    CHECK(comp_run.ledger.filter == cwant.filter);
}

TEST_CASE("individual-model pipeline rebuilds at full size and matches per-link fits") {
    SystemTopology topo = desk_topology(2, 2);
    ChannelSet set = generate_channel_set(topo, GeneratorParams{}, 16);
    IndividualResult ind = individual_solve(set, {4, 5, 3}, 6);
    SinrReport rec =
        run_reconstructed_pipeline(topo, ind.links, set.coeffs, InterferenceScope::paper_experiment);
    CHECK(rec.sinr.size() == static_cast<std::size_t>(topo.num_users() * topo.num_streams));
    for (double s : rec.sinr) {
        CHECK(s >= 0.0);
        CHECK(std::isfinite(s));
    }
    // full-size downstream stages: ledger matches the full-path closed form
    FlopLedger fwant = flop_estimate(topo, {4, 5, 3}, PipelinePath::full);
    CHECK(rec.ledger.covariance == fwant.covariance);
    CHECK(rec.ledger.inverse == fwant.inverse);
}

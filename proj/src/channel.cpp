#include "gwtucker/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace gwt {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t link_seed(std::uint64_t master, int k, int i, int j) {
    std::uint64_t s = master;
    s = mix64(s ^ (static_cast<std::uint64_t>(k) + 1));
    s = mix64(s ^ (static_cast<std::uint64_t>(i) + 1));
    s = mix64(s ^ (static_cast<std::uint64_t>(j) + 1));
    return s;
}

// mt19937_64 output is pinned by the standard; the distributions are not.
// Hand-rolled uniform/Gaussian draws keep generated sets bit-identical
// across platforms and library versions.
class LinkRng {
public:
    explicit LinkRng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {  // in (0, 1)
        const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
        return u;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

Vector steering(int count, double angle) {
    Vector a(count);
    const double step = std::numbers::pi * std::sin(angle);
    for (int q = 0; q < count; ++q)
        a(q) = std::polar(1.0, step * q);
    return a;
}

}  // namespace

void SystemTopology::validate() const {
    if (num_cells < 1) throw std::invalid_argument("topology: num_cells (J) must be >= 1");
    if (users_per_cell < 1) throw std::invalid_argument("topology: users_per_cell (K) must be >= 1");
    if (rx_antennas < 1) throw std::invalid_argument("topology: rx_antennas (M) must be >= 1");
    if (tx_antennas < 1) throw std::invalid_argument("topology: tx_antennas (N) must be >= 1");
    if (num_taps < 1) throw std::invalid_argument("topology: num_taps (P) must be >= 1");
    if (num_streams < 1) throw std::invalid_argument("topology: num_streams (L) must be >= 1");
    if (num_streams > std::min(rx_antennas, tx_antennas))
        throw std::invalid_argument("topology: num_streams (L) must satisfy L <= min(M, N)");
    if (!(noise_std > 0.0)) throw std::invalid_argument("topology: noise_std (sigma) must be > 0");
}

void GeneratorParams::validate() const {
    if (rays_per_slice < 1) throw std::invalid_argument("generator: rays_per_slice must be >= 1");
    if (!(tap_decay > 0.0)) throw std::invalid_argument("generator: tap_decay must be > 0");
    if (!(rician_factor > 0.0)) throw std::invalid_argument("generator: rician_factor must be > 0");
    if (!(coeff_decay > 0.0)) throw std::invalid_argument("generator: coeff_decay must be > 0");
}

double ChannelSet::total_squared_norm() const {
    double acc = 0.0;
    for (const Tensor3& x : tensors)
        acc += squared_norm(x);
    return acc;
}

namespace {

Cplx draw_cn(LinkRng& rng) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    return Cplx(re, im) * std::numbers::sqrt2 / 2.0;  // unit variance total
}

// Arrival rays cluster around the user's scattering environment and
// departure rays around the base's sector, so channels sharing a user (or
// a base) share most of their mode-1 (or mode-2) subspace. That alignment
// is what the factor sharing compresses.
constexpr double kClusterSpread = 0.25;  // radians of per-ray jitter

double angle_center(std::uint64_t master, std::uint64_t tag, int index) {
    LinkRng rng(mix64(master ^ mix64(tag + static_cast<std::uint64_t>(index) + 1)));
    return (rng.uniform01() - 0.5) * 2.0;  // radians in (-1, 1)
}

void fill_link(Tensor3& x, Vector& coeff, const SystemTopology& topo, const GeneratorParams& gp,
               LinkRng& rng, double rx_center, double tx_center) {
    const int m_dim = topo.rx_antennas;
    const int n_dim = topo.tx_antennas;
    const int taps = topo.num_taps;

    for (int l = 0; l < taps; ++l) {
        const bool los = (l == 0);
        const int rays = los ? std::min(gp.rays_per_slice, 2) : gp.rays_per_slice;
        Matrix slice = Matrix::Zero(m_dim, n_dim);
        for (int r = 0; r < rays; ++r) {
            const double theta = rx_center + (rng.uniform01() - 0.5) * 2.0 * kClusterSpread;
            const double phi = tx_center + (rng.uniform01() - 0.5) * 2.0 * kClusterSpread;
            Cplx gain = draw_cn(rng);
            if (los && r == 0)
                gain = std::sqrt(gp.rician_factor) * std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform01());
            slice += gain * (steering(m_dim, theta) * steering(n_dim, phi).adjoint());
        }
        // Pin per-slice energy to rho^l * M * N so the tap power profile is
        // exactly geometric.
        const double target = std::pow(gp.tap_decay, l) * m_dim * n_dim;
        const double actual = slice.squaredNorm();
        if (actual > 0.0)
            slice *= std::sqrt(target / actual);
        for (int b = 0; b < n_dim; ++b)
            for (int a = 0; a < m_dim; ++a)
                x(a, b, l) = slice(a, b);
    }

    coeff.resize(taps);
    for (int l = 0; l < taps; ++l)
        coeff(l) = draw_cn(rng) * std::sqrt(std::pow(gp.coeff_decay, l));
    const double norm = coeff.norm();
    if (norm > 0.0)
        coeff *= std::sqrt(static_cast<double>(taps)) / norm;  // unit RMS
}

}  // namespace

ChannelSet generate_channel_set(const SystemTopology& topology, const GeneratorParams& params,
                                std::uint64_t seed) {
    topology.validate();
    params.validate();

    ChannelSet set;
    set.topology = topology;
    set.tensors.reserve(topology.num_links());
    set.coeffs.reserve(topology.num_links());

    constexpr std::uint64_t kUserTag = 0x75736572u;  // arrival clusters per user
    constexpr std::uint64_t kBaseTag = 0x62617365u;  // departure clusters per base
    for (int k = 0; k < topology.num_cells; ++k)
        for (int i = 0; i < topology.num_cells; ++i)
            for (int j = 0; j < topology.users_per_cell; ++j) {
                LinkRng rng(link_seed(seed, k, i, j));
                const double rx_center =
                    angle_center(seed, kUserTag, i * topology.users_per_cell + j);
                const double tx_center = angle_center(seed, kBaseTag, k);
                Tensor3 x(topology.rx_antennas, topology.tx_antennas, topology.num_taps);
                Vector c;
                fill_link(x, c, topology, params, rng, rx_center, tx_center);
                set.tensors.push_back(std::move(x));
                set.coeffs.push_back(std::move(c));
            }
    return set;
}

Matrix assemble_channel_full(const Tensor3& x, const Vector& coeff, FlopLedger* ledger) {
    Matrix h = contract_mode3(x, coeff);
    if (ledger)
        ledger->reconstruct += static_cast<std::int64_t>(x.dim1()) * x.dim2() * x.dim3();
    return h;
}

Matrix assemble_channel_compressed(const Tensor3& core, const Matrix& delay_factor,
                                   const Vector& coeff, FlopLedger* ledger) {
    if (delay_factor.rows() != coeff.size())
        throw std::invalid_argument("assemble_channel_compressed: delay factor has " +
                                    std::to_string(delay_factor.rows()) + " rows but coefficient length is " +
                                    std::to_string(coeff.size()));
    if (delay_factor.cols() != core.dim3())
        throw std::invalid_argument("assemble_channel_compressed: delay factor has " +
                                    std::to_string(delay_factor.cols()) + " cols but core mode-3 size is " +
                                    std::to_string(core.dim3()));

    // contract_mode3 conjugates its argument, so feeding C^H c yields
    // H~(a,b) = sum_q G(a,b,q) * (c^* C)_q.
    Vector d = delay_factor.adjoint() * coeff;
    Matrix h = contract_mode3(core, d);
    if (ledger)
        ledger->reconstruct += static_cast<std::int64_t>(core.dim1()) * core.dim2() * core.dim3() +
                               static_cast<std::int64_t>(delay_factor.rows()) * delay_factor.cols();
    return h;
}

}  // namespace gwt

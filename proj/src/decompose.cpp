#include "gwtucker/decompose.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gwt {

namespace {

constexpr double kRelativeStopFloor = 1e-10;

void check_channel_dims(const ChannelSet& channels) {
    const SystemTopology& topo = channels.topology;
    if (static_cast<int>(channels.tensors.size()) != topo.num_links())
        throw std::invalid_argument("channel set has " + std::to_string(channels.tensors.size()) +
                                    " tensors but topology expects " + std::to_string(topo.num_links()));
    for (const Tensor3& x : channels.tensors)
        if (x.dim1() != topo.rx_antennas || x.dim2() != topo.tx_antennas || x.dim3() != topo.num_taps)
            throw std::invalid_argument("channel set: inconsistent tensor dims");
}

Tensor3 project_core(const Tensor3& x, const Matrix& rx, const Matrix& tx, const Matrix& delay) {
    return mode_product(mode_product(mode_product(x, rx.adjoint(), 1), tx.adjoint(), 2),
                        delay.adjoint(), 3);
}

// Residual via explicit reconstruction rather than the energy split
// ||X||^2 - ||G||^2; the subtraction form bottoms out at ~1e-16 * ||X||^2
// while the direct form resolves exact-rank fits to machine zero.
double residual_for(const Tensor3& x, const Matrix& rx, const Matrix& tx, const Matrix& delay) {
    Tensor3 core = project_core(x, rx, tx, delay);
    Tensor3 xhat = mode_product(mode_product(mode_product(core, rx, 1), tx, 2), delay, 3);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += std::norm(x.data()[i] - xhat.data()[i]);
    return acc;
}

}  // namespace

const char* model_name(ModelKind model) {
    switch (model) {
        case ModelKind::individual: return "individual";
        case ModelKind::shared: return "shared";
        case ModelKind::groupwise: return "groupwise";
    }
    return "unknown";
}

ModelKind model_from_name(const std::string& name) {
    if (name == "individual") return ModelKind::individual;
    if (name == "shared") return ModelKind::shared;
    if (name == "groupwise") return ModelKind::groupwise;
    throw std::invalid_argument("unknown model '" + name + "' (expected individual, shared or groupwise)");
}

void CompressionRanks::validate_against(int dim1, int dim2, int dim3) const {
    if (m < 1 || m > dim1)
        throw std::invalid_argument("rank m = " + std::to_string(m) + " out of range for mode-1 size " +
                                    std::to_string(dim1));
    if (n < 1 || n > dim2)
        throw std::invalid_argument("rank n = " + std::to_string(n) + " out of range for mode-2 size " +
                                    std::to_string(dim2));
    if (p < 1 || p > dim3)
        throw std::invalid_argument("rank p = " + std::to_string(p) + " out of range for mode-3 size " +
                                    std::to_string(dim3));
}

// ---------------------------------------------------------------------------
// Single-tensor solvers

TuckerFactors hosvd(const Tensor3& x, const CompressionRanks& ranks) {
    ranks.validate_against(x.dim1(), x.dim2(), x.dim3());

    TuckerFactors f;
    {
        auto x1 = x.mode1_view();
        f.rx = leading_eigenvectors(x1 * x1.adjoint(), ranks.m);
    }
    {
        Matrix x2 = matricize(x, 2);
        f.tx = leading_eigenvectors(x2 * x2.adjoint(), ranks.n);
    }
    {
        Matrix x3 = matricize(x, 3);
        f.delay = leading_eigenvectors(x3 * x3.adjoint(), ranks.p);
    }
    f.core = project_core(x, f.rx, f.tx, f.delay);
    return f;
}

double tucker_residual(const Tensor3& x, const Matrix& rx, const Matrix& tx, const Matrix& delay) {
    return residual_for(x, rx, tx, delay);
}

std::pair<TuckerFactors, SolveTrace> hooi(const Tensor3& x, const CompressionRanks& ranks,
                                          int sweeps, const TuckerFactors* init) {
    ranks.validate_against(x.dim1(), x.dim2(), x.dim3());
    if (sweeps < 0)
        throw std::invalid_argument("hooi: sweeps must be >= 0");

    if (init && (init->rx.rows() != x.dim1() || init->rx.cols() != ranks.m ||
                 init->tx.rows() != x.dim2() || init->tx.cols() != ranks.n ||
                 init->delay.rows() != x.dim3() || init->delay.cols() != ranks.p))
        throw std::invalid_argument("hooi: init factor shapes do not match tensor dims and ranks");

    TuckerFactors f = init ? *init : hosvd(x, ranks);
    const double energy = squared_norm(x);

    SolveTrace trace;
    trace.objective.push_back(tucker_residual(x, f.rx, f.tx, f.delay));

    for (int s = 0; s < sweeps; ++s) {
        {
            Matrix w = matricize(mode_product(mode_product(x, f.tx.adjoint(), 2), f.delay.adjoint(), 3), 1);
            f.rx = leading_eigenvectors(w * w.adjoint(), ranks.m);
        }
        {
            Matrix w = matricize(mode_product(mode_product(x, f.rx.adjoint(), 1), f.delay.adjoint(), 3), 2);
            f.tx = leading_eigenvectors(w * w.adjoint(), ranks.n);
        }
        {
            Matrix w = matricize(mode_product(mode_product(x, f.rx.adjoint(), 1), f.tx.adjoint(), 2), 3);
            f.delay = leading_eigenvectors(w * w.adjoint(), ranks.p);
        }
        const double obj = tucker_residual(x, f.rx, f.tx, f.delay);
        const double decrease = trace.objective.back() - obj;
        trace.objective.push_back(obj);
        trace.iterations_run = s + 1;
        if (decrease < kRelativeStopFloor * energy)
            break;
    }

    f.core = project_core(x, f.rx, f.tx, f.delay);
    return {std::move(f), std::move(trace)};
}

Tensor3 reconstruct(const TuckerFactors& f) {
    return mode_product(mode_product(mode_product(f.core, f.rx, 1), f.tx, 2), f.delay, 3);
}

// ---------------------------------------------------------------------------
// Groupwise updates

Matrix rx_update_gram(const ChannelSet& channels, const GroupwiseFactorSet& factors, int i, int j) {
    const int dim = channels.topology.rx_antennas;
    Matrix gram = Matrix::Zero(dim, dim);
    for (int k = 0; k < channels.topology.num_cells; ++k) {
        const Tensor3& x = channels.tensor(k, i, j);
        Tensor3 t = mode_product(mode_product(x, factors.tx(k).adjoint(), 2),
                                 factors.delay(k, i, j).adjoint(), 3);
        auto w = t.mode1_view();
        gram.noalias() += w * w.adjoint();
    }
    return gram;
}

Matrix update_rx_factor(const ChannelSet& channels, const GroupwiseFactorSet& factors, int i, int j) {
    return leading_eigenvectors(rx_update_gram(channels, factors, i, j), factors.ranks.m);
}

Matrix tx_update_gram(const ChannelSet& channels, const GroupwiseFactorSet& factors, int k) {
    const int dim = channels.topology.tx_antennas;
    Matrix gram = Matrix::Zero(dim, dim);
    for (int i = 0; i < channels.topology.num_cells; ++i)
        for (int j = 0; j < channels.topology.users_per_cell; ++j) {
            const Tensor3& x = channels.tensor(k, i, j);
            Tensor3 t = mode_product(mode_product(x, factors.rx(i, j).adjoint(), 1),
                                     factors.delay(k, i, j).adjoint(), 3);
            Matrix w = matricize(t, 2);
            gram.noalias() += w * w.adjoint();
        }
    return gram;
}

Matrix update_tx_factor(const ChannelSet& channels, const GroupwiseFactorSet& factors, int k) {
    return leading_eigenvectors(tx_update_gram(channels, factors, k), factors.ranks.n);
}

Matrix delay_update_gram(const ChannelSet& channels, const GroupwiseFactorSet& factors, int k,
                         int i, int j) {
    const Tensor3& x = channels.tensor(k, i, j);
    Tensor3 t = mode_product(mode_product(x, factors.rx(i, j).adjoint(), 1),
                             factors.tx(k).adjoint(), 2);
    Matrix w = matricize(t, 3);
    return w * w.adjoint();
}

Matrix update_delay_factor(const ChannelSet& channels, const GroupwiseFactorSet& factors, int k,
                           int i, int j) {
    return leading_eigenvectors(delay_update_gram(channels, factors, k, i, j), factors.ranks.p);
}

void compute_cores(const ChannelSet& channels, GroupwiseFactorSet& factors) {
    const SystemTopology& topo = channels.topology;
    factors.cores.assign(topo.num_links(), Tensor3());
    for (int k = 0; k < topo.num_cells; ++k)
        for (int i = 0; i < topo.num_cells; ++i)
            for (int j = 0; j < topo.users_per_cell; ++j)
                factors.cores[factors.link_index(k, i, j)] =
                    project_core(channels.tensor(k, i, j), factors.rx(i, j), factors.tx(k),
                                 factors.delay(k, i, j));
}

double projection_energy(const ChannelSet& channels, const GroupwiseFactorSet& factors) {
    const SystemTopology& topo = channels.topology;
    double g = 0.0;
    for (int k = 0; k < topo.num_cells; ++k)
        for (int i = 0; i < topo.num_cells; ++i)
            for (int j = 0; j < topo.users_per_cell; ++j)
                g += squared_norm(project_core(channels.tensor(k, i, j), factors.rx(i, j),
                                               factors.tx(k), factors.delay(k, i, j)));
    return g;
}

double objective_value(const ChannelSet& channels, const GroupwiseFactorSet& factors) {
    const SystemTopology& topo = channels.topology;
    double f = 0.0;
    for (int k = 0; k < topo.num_cells; ++k)
        for (int i = 0; i < topo.num_cells; ++i)
            for (int j = 0; j < topo.users_per_cell; ++j)
                f += residual_for(channels.tensor(k, i, j), factors.rx(i, j), factors.tx(k),
                                  factors.delay(k, i, j));
    return f;
}

// ---------------------------------------------------------------------------
// Multi-channel solvers

namespace {

GroupwiseFactorSet make_empty_set(const SystemTopology& topo, const CompressionRanks& ranks) {
    GroupwiseFactorSet fs;
    fs.num_cells = topo.num_cells;
    fs.users_per_cell = topo.users_per_cell;
    fs.ranks = ranks;
    fs.rx_factors.resize(topo.num_users());
    fs.tx_factors.resize(topo.num_cells);
    fs.delay_factors.resize(topo.num_links());
    return fs;
}

// Mode-wise singular-subspace initialization: the multi-channel analogue
// of initializing each factor from its unfolding's leading vectors. When
// `pool_rx`/`pool_tx` is set the corresponding sum runs over every link
// (shared model); otherwise over the grouping the factor serves.
GroupwiseFactorSet initial_factors(const ChannelSet& channels, const CompressionRanks& ranks,
                                   bool pool_rx, bool pool_tx) {
    const SystemTopology& topo = channels.topology;
    GroupwiseFactorSet fs = make_empty_set(topo, ranks);

    if (pool_rx) {
        Matrix gram = Matrix::Zero(topo.rx_antennas, topo.rx_antennas);
        for (const Tensor3& x : channels.tensors) {
            auto w = x.mode1_view();
            gram.noalias() += w * w.adjoint();
        }
        Matrix shared = leading_eigenvectors(gram, ranks.m);
        for (Matrix& f : fs.rx_factors) f = shared;
    } else {
        for (int i = 0; i < topo.num_cells; ++i)
            for (int j = 0; j < topo.users_per_cell; ++j) {
                Matrix gram = Matrix::Zero(topo.rx_antennas, topo.rx_antennas);
                for (int k = 0; k < topo.num_cells; ++k) {
                    auto w = channels.tensor(k, i, j).mode1_view();
                    gram.noalias() += w * w.adjoint();
                }
                fs.rx_factors[fs.user_index(i, j)] = leading_eigenvectors(gram, ranks.m);
            }
    }

    if (pool_tx) {
        Matrix gram = Matrix::Zero(topo.tx_antennas, topo.tx_antennas);
        for (const Tensor3& x : channels.tensors) {
            Matrix w = matricize(x, 2);
            gram.noalias() += w * w.adjoint();
        }
        Matrix shared = leading_eigenvectors(gram, ranks.n);
        for (Matrix& f : fs.tx_factors) f = shared;
    } else {
        for (int k = 0; k < topo.num_cells; ++k) {
            Matrix gram = Matrix::Zero(topo.tx_antennas, topo.tx_antennas);
            for (int i = 0; i < topo.num_cells; ++i)
                for (int j = 0; j < topo.users_per_cell; ++j) {
                    Matrix w = matricize(channels.tensor(k, i, j), 2);
                    gram.noalias() += w * w.adjoint();
                }
            fs.tx_factors[k] = leading_eigenvectors(gram, ranks.n);
        }
    }

    for (int k = 0; k < topo.num_cells; ++k)
        for (int i = 0; i < topo.num_cells; ++i)
            for (int j = 0; j < topo.users_per_cell; ++j) {
                Matrix w = matricize(channels.tensor(k, i, j), 3);
                fs.delay_factors[fs.link_index(k, i, j)] = leading_eigenvectors(w * w.adjoint(), ranks.p);
            }
    return fs;
}

void check_init_shape(const GroupwiseFactorSet& init, const SystemTopology& topo,
                      const CompressionRanks& ranks) {
    if (init.num_cells != topo.num_cells || init.users_per_cell != topo.users_per_cell ||
        init.ranks.m != ranks.m || init.ranks.n != ranks.n || init.ranks.p != ranks.p)
        throw std::invalid_argument("solver init: factor set shape does not match channels/ranks");
}

std::pair<GroupwiseFactorSet, SolveTrace> alternating_solve(const ChannelSet& channels,
                                                            const CompressionRanks& ranks,
                                                            int sweeps,
                                                            const GroupwiseFactorSet* init,
                                                            bool pooled) {
    check_channel_dims(channels);
    const SystemTopology& topo = channels.topology;
    ranks.validate_against(topo.rx_antennas, topo.tx_antennas, topo.num_taps);
    if (sweeps < 0)
        throw std::invalid_argument("solve: sweeps must be >= 0");
    if (init)
        check_init_shape(*init, topo, ranks);

    GroupwiseFactorSet fs = init ? *init : initial_factors(channels, ranks, pooled, pooled);
    const double energy = channels.total_squared_norm();

    SolveTrace trace;
    trace.objective.push_back(objective_value(channels, fs));

    for (int s = 0; s < sweeps; ++s) {
        if (pooled) {
            Matrix gram = Matrix::Zero(topo.rx_antennas, topo.rx_antennas);
            for (int i = 0; i < topo.num_cells; ++i)
                for (int j = 0; j < topo.users_per_cell; ++j)
                    gram += rx_update_gram(channels, fs, i, j);
            Matrix shared = leading_eigenvectors(gram, ranks.m);
            for (Matrix& f : fs.rx_factors) f = shared;
        } else {
            std::vector<Matrix> fresh(topo.num_users());
            for (int i = 0; i < topo.num_cells; ++i)
                for (int j = 0; j < topo.users_per_cell; ++j)
                    fresh[fs.user_index(i, j)] = update_rx_factor(channels, fs, i, j);
            fs.rx_factors = std::move(fresh);
        }

        if (pooled) {
            Matrix gram = Matrix::Zero(topo.tx_antennas, topo.tx_antennas);
            for (int k = 0; k < topo.num_cells; ++k)
                gram += tx_update_gram(channels, fs, k);
            Matrix shared = leading_eigenvectors(gram, ranks.n);
            for (Matrix& f : fs.tx_factors) f = shared;
        } else {
            std::vector<Matrix> fresh(topo.num_cells);
            for (int k = 0; k < topo.num_cells; ++k)
                fresh[k] = update_tx_factor(channels, fs, k);
            fs.tx_factors = std::move(fresh);
        }

        for (int k = 0; k < topo.num_cells; ++k)
            for (int i = 0; i < topo.num_cells; ++i)
                for (int j = 0; j < topo.users_per_cell; ++j)
                    fs.delay_factors[fs.link_index(k, i, j)] =
                        update_delay_factor(channels, fs, k, i, j);

        const double obj = objective_value(channels, fs);
        const double decrease = trace.objective.back() - obj;
        trace.objective.push_back(obj);
        trace.iterations_run = s + 1;
        if (decrease < kRelativeStopFloor * energy)
            break;
    }

    compute_cores(channels, fs);
    return {std::move(fs), std::move(trace)};
}

}  // namespace

std::pair<GroupwiseFactorSet, SolveTrace> groupwise_solve(const ChannelSet& channels,
                                                          const CompressionRanks& ranks, int sweeps,
                                                          const GroupwiseFactorSet* init) {
    return alternating_solve(channels, ranks, sweeps, init, /*pooled=*/false);
}

std::pair<GroupwiseFactorSet, SolveTrace> shared_solve(const ChannelSet& channels,
                                                       const CompressionRanks& ranks, int sweeps,
                                                       const GroupwiseFactorSet* init) {
    return alternating_solve(channels, ranks, sweeps, init, /*pooled=*/true);
}

IndividualResult individual_solve(const ChannelSet& channels, const CompressionRanks& ranks,
                                  int sweeps, const GroupwiseFactorSet* init) {
    check_channel_dims(channels);
    const SystemTopology& topo = channels.topology;
    ranks.validate_against(topo.rx_antennas, topo.tx_antennas, topo.num_taps);
    if (init)
        check_init_shape(*init, topo, ranks);

    IndividualResult result;
    result.links.reserve(topo.num_links());
    std::vector<SolveTrace> traces;
    traces.reserve(topo.num_links());

    for (int k = 0; k < topo.num_cells; ++k)
        for (int i = 0; i < topo.num_cells; ++i)
            for (int j = 0; j < topo.users_per_cell; ++j) {
                const Tensor3& x = channels.tensor(k, i, j);
                if (init) {
                    TuckerFactors warm;
                    warm.rx = init->rx(i, j);
                    warm.tx = init->tx(k);
                    warm.delay = init->delay(k, i, j);
                    auto [f, t] = hooi(x, ranks, sweeps, &warm);
                    result.links.push_back(std::move(f));
                    traces.push_back(std::move(t));
                } else {
                    auto [f, t] = hooi(x, ranks, sweeps);
                    result.links.push_back(std::move(f));
                    traces.push_back(std::move(t));
                }
            }

    // Links may early-stop at different sweeps; a stopped link holds its
    // final objective for the remaining entries.
    std::size_t longest = 1;
    int max_iters = 0;
    for (const SolveTrace& t : traces) {
        longest = std::max(longest, t.objective.size());
        max_iters = std::max(max_iters, t.iterations_run);
    }
    result.trace.objective.assign(longest, 0.0);
    result.trace.iterations_run = max_iters;
    for (const SolveTrace& t : traces)
        for (std::size_t s = 0; s < longest; ++s)
            result.trace.objective[s] += t.objective[std::min(s, t.objective.size() - 1)];
    return result;
}

}  // namespace gwt

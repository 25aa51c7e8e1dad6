#include "gwtucker/archive.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace gwt {

namespace {

constexpr char kMagic[4] = {'G', 'W', 'T', 'K'};
constexpr std::uint32_t kVersion = 1;

void append_u32(std::string& buf, std::uint32_t v) {
    for (int b = 0; b < 4; ++b)
        buf.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void append_f64(std::string& buf, double d) {
    const std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    for (int b = 0; b < 8; ++b)
        buf.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void append_complex(std::string& buf, const Cplx& c) {
    append_f64(buf, c.real());
    append_f64(buf, c.imag());
}

void append_matrix(std::string& buf, const Matrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            append_complex(buf, m(r, c));
}

void append_tensor(std::string& buf, const Tensor3& t) {
    const Cplx* d = t.data();
    for (std::size_t i = 0; i < t.size(); ++i)
        append_complex(buf, d[i]);
}

void append_vector(std::string& buf, const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        append_complex(buf, v(i));
}

class Reader {
public:
    explicit Reader(const std::string& data) : data_(data) {}

    std::uint32_t u32() {
        require(4);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
        pos_ += 4;
        return v;
    }

    std::uint8_t u8() {
        require(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }

    double f64() {
        require(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
        pos_ += 8;
        return std::bit_cast<double>(v);
    }

    Cplx cplx() {
        const double re = f64();
        const double im = f64();
        return {re, im};
    }

    Matrix matrix(int rows, int cols) {
        Matrix m(rows, cols);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r)
                m(r, c) = cplx();
        return m;
    }

    Tensor3 tensor(int d1, int d2, int d3) {
        Tensor3 t(d1, d2, d3);
        Cplx* d = t.data();
        for (std::size_t i = 0; i < t.size(); ++i)
            d[i] = cplx();
        return t;
    }

    Vector vector(int size) {
        Vector v(size);
        for (int i = 0; i < size; ++i)
            v(i) = cplx();
        return v;
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t pos() const { return pos_; }

private:
    void require(std::size_t bytes) const {
        if (pos_ + bytes > data_.size())
            throw TruncatedArchiveError("archive truncated: need " + std::to_string(bytes) +
                                        " bytes at offset " + std::to_string(pos_));
    }

    const std::string& data_;
    std::size_t pos_ = 0;
};

std::uint8_t model_tag(ModelKind model) {
    switch (model) {
        case ModelKind::individual: return 0;
        case ModelKind::shared: return 1;
        case ModelKind::groupwise: return 2;
    }
    throw std::invalid_argument("model_tag: unknown model");
}

std::string header_bytes(ModelKind model, std::uint32_t J, std::uint32_t K, std::uint32_t M,
                         std::uint32_t N, std::uint32_t P, const CompressionRanks& ranks) {
    std::string buf;
    buf.append(kMagic, 4);
    append_u32(buf, kVersion);
    append_u32(buf, J);
    append_u32(buf, K);
    append_u32(buf, M);
    append_u32(buf, N);
    append_u32(buf, P);
    append_u32(buf, static_cast<std::uint32_t>(ranks.m));
    append_u32(buf, static_cast<std::uint32_t>(ranks.n));
    append_u32(buf, static_cast<std::uint32_t>(ranks.p));
    buf.push_back(static_cast<char>(model_tag(model)));
    return buf;
}

std::int64_t payload_complex_count(ModelKind model, std::int64_t J, std::int64_t K, std::int64_t M,
                                   std::int64_t N, std::int64_t P, std::int64_t m, std::int64_t n,
                                   std::int64_t p) {
    const std::int64_t links = J * J * K;
    const std::int64_t per_link = m * n * p + P * p;
    std::int64_t stored = 0;
    switch (model) {
        case ModelKind::groupwise: stored = links * per_link + J * K * M * m + J * N * n; break;
        case ModelKind::shared: stored = links * per_link + M * m + N * n; break;
        case ModelKind::individual: stored = links * (per_link + M * m + N * n); break;
    }
    return stored + links * P;  // plus coefficient vectors
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ArchiveError("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw ArchiveError("short write to '" + path + "'");
}

void check_coeffs(const std::vector<Vector>& coeffs, std::size_t links, int taps) {
    if (coeffs.size() != links)
        throw std::invalid_argument("archive: coefficient grid has " + std::to_string(coeffs.size()) +
                                    " entries, expected " + std::to_string(links));
    for (const Vector& c : coeffs)
        if (c.size() != taps)
            throw std::invalid_argument("archive: coefficient vector length mismatch");
}

}  // namespace

void save_archive(const std::string& path, ModelKind model, const GroupwiseFactorSet& factors,
                  const std::vector<Vector>& coeffs) {
    if (model == ModelKind::individual)
        throw std::invalid_argument("save_archive: individual model takes the per-link overload");
    if (factors.rx_factors.empty() || factors.tx_factors.empty() || factors.cores.empty())
        throw std::invalid_argument("save_archive: factor set is incomplete");

    const int J = factors.num_cells, K = factors.users_per_cell;
    const int M = static_cast<int>(factors.rx_factors[0].rows());
    const int N = static_cast<int>(factors.tx_factors[0].rows());
    const int P = static_cast<int>(factors.delay_factors[0].rows());

    std::string buf = header_bytes(model, J, K, M, N, P, factors.ranks);
    if (model == ModelKind::groupwise) {
        for (const Matrix& f : factors.rx_factors) append_matrix(buf, f);
        for (const Matrix& f : factors.tx_factors) append_matrix(buf, f);
    } else {
        append_matrix(buf, factors.rx_factors[0]);
        append_matrix(buf, factors.tx_factors[0]);
    }
    for (const Matrix& f : factors.delay_factors) append_matrix(buf, f);
    for (const Tensor3& g : factors.cores) append_tensor(buf, g);
    check_coeffs(coeffs, factors.cores.size(), P);
    for (const Vector& c : coeffs) append_vector(buf, c);
    write_file(path, buf);
}

void save_archive(const std::string& path, const std::vector<TuckerFactors>& links, int num_cells,
                  int users_per_cell, const std::vector<Vector>& coeffs) {
    if (links.empty() ||
        links.size() != static_cast<std::size_t>(num_cells) * num_cells * users_per_cell)
        throw std::invalid_argument("save_archive: link grid does not match J^2*K");

    const TuckerFactors& first = links[0];
    CompressionRanks ranks{static_cast<int>(first.rx.cols()), static_cast<int>(first.tx.cols()),
                           static_cast<int>(first.delay.cols())};
    const int M = static_cast<int>(first.rx.rows());
    const int N = static_cast<int>(first.tx.rows());
    const int P = static_cast<int>(first.delay.rows());

    std::string buf = header_bytes(ModelKind::individual, num_cells, users_per_cell, M, N, P, ranks);
    for (const TuckerFactors& f : links) append_matrix(buf, f.rx);
    for (const TuckerFactors& f : links) append_matrix(buf, f.tx);
    for (const TuckerFactors& f : links) append_matrix(buf, f.delay);
    for (const TuckerFactors& f : links) append_tensor(buf, f.core);
    check_coeffs(coeffs, links.size(), P);
    for (const Vector& c : coeffs) append_vector(buf, c);
    write_file(path, buf);
}

LoadedArchive load_archive(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ArchiveError("cannot open '" + path + "' for reading");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (data.size() < 4 || std::memcmp(data.data(), kMagic, 4) != 0)
        throw BadMagicError("archive: bad magic (expected GWTK)");

    Reader reader(data);
    reader.u32();  // skip magic, already checked
    const std::uint32_t version = reader.u32();
    if (version != kVersion)
        throw VersionMismatchError("archive: version " + std::to_string(version) +
                                   " not supported (expected " + std::to_string(kVersion) + ")");

    LoadedArchive out;
    out.num_cells = static_cast<int>(reader.u32());
    out.users_per_cell = static_cast<int>(reader.u32());
    out.rx_antennas = static_cast<int>(reader.u32());
    out.tx_antennas = static_cast<int>(reader.u32());
    out.num_taps = static_cast<int>(reader.u32());
    out.ranks.m = static_cast<int>(reader.u32());
    out.ranks.n = static_cast<int>(reader.u32());
    out.ranks.p = static_cast<int>(reader.u32());
    const std::uint8_t tag = reader.u8();
    switch (tag) {
        case 0: out.model = ModelKind::individual; break;
        case 1: out.model = ModelKind::shared; break;
        case 2: out.model = ModelKind::groupwise; break;
        default: throw ArchiveError("archive: unknown model tag " + std::to_string(tag));
    }

    if (out.num_cells < 1 || out.users_per_cell < 1 || out.rx_antennas < 1 || out.tx_antennas < 1 ||
        out.num_taps < 1)
        throw ArchiveError("archive: non-positive dimension in header");
    out.ranks.validate_against(out.rx_antennas, out.tx_antennas, out.num_taps);

    const std::int64_t expected = payload_complex_count(
        out.model, out.num_cells, out.users_per_cell, out.rx_antennas, out.tx_antennas, out.num_taps,
        out.ranks.m, out.ranks.n, out.ranks.p);
    const std::int64_t actual_bytes = static_cast<std::int64_t>(reader.remaining());
    if (actual_bytes != expected * 16)
        throw TruncatedArchiveError("archive: payload is " + std::to_string(actual_bytes) +
                                    " bytes, expected exactly " + std::to_string(expected * 16));

    const int J = out.num_cells, K = out.users_per_cell;
    const int M = out.rx_antennas, N = out.tx_antennas, P = out.num_taps;
    const int links = J * J * K;

    if (out.model == ModelKind::individual) {
        out.links.resize(links);
        for (int l = 0; l < links; ++l) out.links[l].rx = reader.matrix(M, out.ranks.m);
        for (int l = 0; l < links; ++l) out.links[l].tx = reader.matrix(N, out.ranks.n);
        for (int l = 0; l < links; ++l) out.links[l].delay = reader.matrix(P, out.ranks.p);
        for (int l = 0; l < links; ++l)
            out.links[l].core = reader.tensor(out.ranks.m, out.ranks.n, out.ranks.p);
    } else {
        GroupwiseFactorSet& fs = out.factors;
        fs.num_cells = J;
        fs.users_per_cell = K;
        fs.ranks = out.ranks;
        if (out.model == ModelKind::groupwise) {
            fs.rx_factors.reserve(J * K);
            for (int u = 0; u < J * K; ++u) fs.rx_factors.push_back(reader.matrix(M, out.ranks.m));
            fs.tx_factors.reserve(J);
            for (int k = 0; k < J; ++k) fs.tx_factors.push_back(reader.matrix(N, out.ranks.n));
        } else {
            Matrix rx = reader.matrix(M, out.ranks.m);
            Matrix tx = reader.matrix(N, out.ranks.n);
            fs.rx_factors.assign(J * K, rx);
            fs.tx_factors.assign(J, tx);
        }
        fs.delay_factors.reserve(links);
        for (int l = 0; l < links; ++l) fs.delay_factors.push_back(reader.matrix(P, out.ranks.p));
        fs.cores.reserve(links);
        for (int l = 0; l < links; ++l)
            fs.cores.push_back(reader.tensor(out.ranks.m, out.ranks.n, out.ranks.p));
    }

    out.coeffs.reserve(links);
    for (int l = 0; l < links; ++l) out.coeffs.push_back(reader.vector(P));
    return out;
}

}  // namespace gwt

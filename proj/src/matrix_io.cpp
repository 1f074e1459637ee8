#include "amrpe/matrix_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "amrpe/errors.hpp"

namespace amrpe {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'E', '1'};

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

template <typename T>
void append_value(std::string& out, T v) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    out.append(bytes, sizeof(T)); // x86 little-endian layout
}

} // namespace

void write_matrix(const std::string& path, const Eigen::MatrixXd& m, MatDtype dtype) {
    std::string payload;
    payload.reserve(28 + static_cast<std::size_t>(m.size()) * (dtype == MatDtype::f32 ? 4 : 8));
    payload.append(kMagic, 4);
    put_u64_le(payload, static_cast<std::uint64_t>(m.rows()));
    put_u64_le(payload, static_cast<std::uint64_t>(m.cols()));
    put_u64_le(payload, static_cast<std::uint64_t>(dtype));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (dtype == MatDtype::f32)
                append_value(payload, static_cast<float>(m(r, c)));
            else
                append_value(payload, m(r, c));
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) fail(errc::io_error, "short write to '" + path + "'");
}

Eigen::MatrixXd read_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 28 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        fail(errc::io_error, "'" + path + "' is not an SPE1 matrix file");
    std::uint64_t rows = get_u64_le(bytes.data() + 4);
    std::uint64_t cols = get_u64_le(bytes.data() + 12);
    std::uint64_t dtype = get_u64_le(bytes.data() + 20);
    if (dtype != 1 && dtype != 2) fail(errc::io_error, "unknown dtype in '" + path + "'");
    std::size_t value_size = dtype == 1 ? 4 : 8;
    if (bytes.size() != 28 + rows * cols * value_size)
        fail(errc::io_error, "payload size mismatch in '" + path + "'");

    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const unsigned char* p = bytes.data() + 28;
    for (std::uint64_t r = 0; r < rows; ++r) {
        for (std::uint64_t c = 0; c < cols; ++c, p += value_size) {
            if (dtype == 1) {
                float v;
                std::memcpy(&v, p, 4);
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
            } else {
                double v;
                std::memcpy(&v, p, 8);
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
            }
        }
    }
    return m;
}

void write_complex_matrix(const std::string& base_path, const Eigen::MatrixXcd& m,
                          MatDtype dtype) {
    write_matrix(base_path + ".re.mat", m.real(), dtype);
    write_matrix(base_path + ".im.mat", m.imag(), dtype);
}

std::uint64_t fnv1a(const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open '" + path + "' for checksum");
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    std::uint64_t h = fnv1a(bytes.data(), bytes.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace amrpe

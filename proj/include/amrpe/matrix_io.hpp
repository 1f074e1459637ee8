#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace amrpe {

/// Binary matrix payload: magic "SPE1", then rows/cols/dtype as 64-bit
/// little-endian unsigned integers (dtype 1 = f32, 2 = f64), then row-major
/// values. Complex matrices are stored as "<name>.re.mat" / "<name>.im.mat".
enum class MatDtype : std::uint64_t { f32 = 1, f64 = 2 };

void write_matrix(const std::string& path, const Eigen::MatrixXd& m, MatDtype dtype);
Eigen::MatrixXd read_matrix(const std::string& path);

void write_complex_matrix(const std::string& base_path, const Eigen::MatrixXcd& m,
                          MatDtype dtype); // writes base.re.mat and base.im.mat

/// FNV-1a 64-bit, as a 16-digit lowercase hex string.
std::uint64_t fnv1a(const void* data, std::size_t len);
std::string fnv1a_file_hex(const std::string& path);

} // namespace amrpe

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sphnet {

// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);
// Checksum of a whole file; throws format_error if unreadable.
std::uint64_t file_checksum(const std::string& path);

// Dense symmetric-matrix container: magic "SPHH", u32 version (1),
// u32 dimension, then dim*dim float64 row-major little-endian.
void write_matrix_file(const std::string& path, const std::vector<double>& m, int dim);
std::vector<double> read_matrix_file(const std::string& path, int& dim);

// Standard XYZ text: count line, comment line, "Sym x y z" per atom (A).
// Parser tolerates CRLF line endings and trailing blank lines.
struct XyzRecord {
  std::string comment;
  std::vector<int> z;
  std::vector<std::array<double, 3>> pos;
};
void write_xyz_file(const std::string& path, const XyzRecord& rec);
XyzRecord read_xyz_file(const std::string& path);

int element_number(const std::string& symbol);     // H/C/N/O
std::string element_symbol(int z);

}  // namespace sphnet

#pragma once

#include <cstdint>
#include <string>

#include "poirec/matrix.hpp"

namespace poirec {

// Binary matrix dump: three little-endian uint64 header values
// (magic, rows, cols) followed by row-major doubles.
constexpr std::uint64_t kMatrixMagic = 0x5052435f4d415431ull;  // "PRC_MAT1"

void save_matrix(const Matrix& m, const std::string& path);
Matrix load_matrix(const std::string& path);

std::uint64_t fnv1a_file(const std::string& path);

bool files_identical(const std::string& a, const std::string& b);

}  // namespace poirec

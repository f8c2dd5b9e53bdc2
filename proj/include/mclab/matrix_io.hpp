#pragma once

#include <cstdint>
#include <string>

#include "mclab/linalg.hpp"

namespace mclab {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Plain-text matrix container:
///   mclab-matrix 1
///   rows <r> cols <c>
///   eps0 <value>
///   seed <value>
///   <one whitespace-separated row per line, full double precision>
struct MatrixFile {
  Matrix data;
  double eps0 = 1.0;
  std::uint64_t seed = 0;
};

void write_matrix(const std::string& path, const Matrix& A, double eps0 = 1.0,
                  std::uint64_t seed = 0);
MatrixFile read_matrix(const std::string& path);

}  // namespace mclab

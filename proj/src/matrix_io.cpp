#include "mclab/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace mclab {

void write_matrix(const std::string& path, const Matrix& A, double eps0,
                  std::uint64_t seed) {
  std::ofstream out(path);
  if (!out) throw IoError("write_matrix: cannot open " + path);
  out << "mclab-matrix 1\n";
  out << "rows " << A.rows() << " cols " << A.cols() << "\n";
  out << "eps0 " << std::setprecision(17) << eps0 << "\n";
  out << "seed " << seed << "\n";
  out << std::setprecision(17);
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) {
      out << A(i, j) << (j + 1 < A.cols() ? ' ' : '\n');
    }
  }
  if (!out) throw IoError("write_matrix: write failed for " + path);
}

MatrixFile read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_matrix: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "mclab-matrix" || version != 1) {
    throw IoError("read_matrix: " + path + " is not a version-1 matrix file");
  }
  std::string key;
  long rows = 0, cols = 0;
  MatrixFile mf;
  in >> key >> rows;
  if (key != "rows") throw IoError("read_matrix: malformed header in " + path);
  in >> key >> cols;
  if (key != "cols") throw IoError("read_matrix: malformed header in " + path);
  in >> key >> mf.eps0;
  if (key != "eps0") throw IoError("read_matrix: malformed header in " + path);
  in >> key >> mf.seed;
  if (key != "seed") throw IoError("read_matrix: malformed header in " + path);
  if (rows < 1 || cols < 1) throw IoError("read_matrix: bad dimensions in " + path);
  mf.data.resize(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      if (!(in >> mf.data(i, j))) {
        throw IoError("read_matrix: truncated body in " + path);
      }
    }
  }
  return mf;
}

}  // namespace mclab

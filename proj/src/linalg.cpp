#include "hypercone/linalg.hpp"

namespace hypercone {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
  Matrix m(rows.size(), cols);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != cols) {
      throw ValidationError("Matrix::from_rows: ragged rows");
    }
    std::size_t c = 0;
    for (double v : row) {
      m(r, c++) = v;
    }
    ++r;
  }
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows, std::size_t cols) {
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw ValidationError("Matrix::from_rows: row " + std::to_string(r) + " has wrong width");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = rows[r][c];
    }
  }
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      t(c, r) = (*this)(r, c);
    }
  }
  return t;
}

std::vector<double> normalized(std::span<const double> a, double min_norm) {
  const double n = norm(a);
  if (!(n >= min_norm)) {
    throw ValidationError("cannot normalize a vector of norm " + std::to_string(n));
  }
  return scaled(a, 1.0 / n);
}

std::vector<double> scaled(std::span<const double> a, double s) {
  std::vector<double> out(a.begin(), a.end());
  for (double& v : out) {
    v *= s;
  }
  return out;
}

}  // namespace hypercone

#include "relnav/numeric/tensor.hpp"

namespace relnav::numeric {

Tensor2 Tensor2::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Tensor2 t;
  t.rows_ = rows.size();
  t.cols_ = rows.size() ? rows.begin()->size() : 0;
  t.data_.reserve(t.rows_ * t.cols_);
  for (const auto& row : rows) {
    if (row.size() != t.cols_) {
      throw ShapeError("from_rows: ragged row of length " + std::to_string(row.size()) +
                       ", expected " + std::to_string(t.cols_));
    }
    t.data_.insert(t.data_.end(), row.begin(), row.end());
  }
  return t;
}

Tensor2 Tensor2::row_vector(const std::vector<double>& values) {
  Tensor2 t(1, values.size());
  t.data_ = values;
  return t;
}

Tensor2 Tensor2::scalar(double v) {
  Tensor2 t(1, 1);
  t.data_[0] = v;
  return t;
}

bool Tensor2::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor2::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void require_same_shape(const Tensor2& a, const Tensor2& b, const std::string& op) {
  if (!a.same_shape(b)) {
    throw ShapeError(op + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
}

void require_matmul_shapes(const Tensor2& a, const Tensor2& b, const std::string& op) {
  if (a.cols() != b.rows()) {
    throw ShapeError(op + ": inner dimensions do not match, " + a.shape_str() + " * " +
                     b.shape_str());
  }
}

}  // namespace relnav::numeric

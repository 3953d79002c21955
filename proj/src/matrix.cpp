#include "idsfx/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "idsfx/error.hpp"

namespace idsfx {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("matrix data has " + std::to_string(data_.size()) + " values, expected " +
                         std::to_string(rows_ * cols_));
    }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols_) throw ShapeError("ragged rows in Matrix::from_rows");
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows_) throw ShapeError("row index out of range");
        auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix Matrix::select_columns(std::span<const std::size_t> indices) const {
    for (auto c : indices) {
        if (c >= cols_) {
            throw ShapeError("column index " + std::to_string(c) + " out of range for " +
                             std::to_string(cols_) + " columns");
        }
    }
    Matrix out(rows_, indices.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t j = 0; j < indices.size(); ++j) out(r, j) = (*this)(r, indices[j]);
    }
    return out;
}

double frobenius_norm(const Matrix& m) {
    double sum = 0.0;
    for (double v : m.values()) sum += v * v;
    return std::sqrt(sum);
}

double min_value(const Matrix& m) {
    if (m.empty()) return 0.0;
    return *std::min_element(m.values().begin(), m.values().end());
}

double mean_value(const Matrix& m) {
    if (m.empty()) return 0.0;
    double sum = 0.0;
    for (double v : m.values()) sum += v;
    return sum / static_cast<double>(m.size());
}

}  // namespace idsfx

#ifndef DESVR_MATRIX_HPP
#define DESVR_MATRIX_HPP

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "error.hpp"

namespace desvr {

/// Dense row-major matrix of doubles. Rows are exposed as spans so that
/// feature vectors can be passed around without copies.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : _rows(rows), _cols(cols), _data(rows * cols, fill)
    {
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : _rows(rows), _cols(cols), _data(std::move(data))
    {
        detail::require(_data.size() == rows * cols, "Matrix: data size does not match shape");
    }

    std::size_t rows() const { return _rows; }
    std::size_t cols() const { return _cols; }
    bool empty() const { return _rows == 0; }

    double& operator()(std::size_t r, std::size_t c)
    {
        assert(r < _rows && c < _cols);
        return _data[r * _cols + c];
    }
    double operator()(std::size_t r, std::size_t c) const
    {
        assert(r < _rows && c < _cols);
        return _data[r * _cols + c];
    }

    std::span<double> row(std::size_t r) { return {_data.data() + r * _cols, _cols}; }
    std::span<const double> row(std::size_t r) const { return {_data.data() + r * _cols, _cols}; }

    const std::vector<double>& data() const { return _data; }

    /// Appends a row. The first row appended to an empty matrix fixes the
    /// column count.
    void append_row(std::span<const double> values)
    {
        if (_rows == 0 && _cols == 0)
            _cols = values.size();
        detail::require(values.size() == _cols, "Matrix: appended row has wrong width");
        _data.insert(_data.end(), values.begin(), values.end());
        ++_rows;
    }

    /// Copy of rows [first, first + count).
    Matrix slice_rows(std::size_t first, std::size_t count) const
    {
        detail::require(first + count <= _rows, "Matrix: row slice out of range");
        auto begin = _data.begin() + static_cast<std::ptrdiff_t>(first * _cols);
        return Matrix(count, _cols, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count * _cols)));
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t _rows = 0;
    std::size_t _cols = 0;
    std::vector<double> _data;
};

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += a[k] * b[k];
    return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

} // namespace desvr

#endif

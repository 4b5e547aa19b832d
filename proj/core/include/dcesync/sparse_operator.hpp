#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dcesync/hilbert.hpp"

namespace dcesync {

/// Square complex matrix kept both as a sorted coordinate list and in compressed-row form.
class SparseOperator {
public:
    struct Entry {
        std::size_t row;
        std::size_t col;
        Complex value;
    };

    SparseOperator() = default;

    /// Duplicate (row, col) pairs are summed; exact zeros are dropped.
    /// Throws OutOfRangeError for indices outside the dimension.
    SparseOperator(std::size_t dimension, std::vector<Entry> entries);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    /// Entries in row-major order.
    std::vector<Entry> entries() const;

    Complex value(std::size_t row, std::size_t col) const;

    /// y = A x
    void apply(std::span<const Complex> x, std::span<Complex> y) const;
    /// y += scale * A x
    void apply_add(std::span<const Complex> x, std::span<Complex> y, Complex scale = 1.0) const;

    bool is_hermitian(double tol = 1e-12) const;
    double max_abs() const noexcept;
    /// Largest absolute row sum; bounds the spectral radius.
    double row_sum_bound() const noexcept;

    SparseOperator scaled(Complex factor) const;
    SparseOperator adjoint() const;

    std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
    std::span<const std::size_t> columns() const noexcept { return columns_; }
    std::span<const Complex> values() const noexcept { return values_; }

private:
    std::size_t dimension_ = 0;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<std::size_t> columns_;
    std::vector<Complex> values_;
};

/// Throws InvalidArgumentError on dimension mismatch.
SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
/// Sparse matrix product.
SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);

/// [A, B] = AB - BA
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);

/// <psi| A |psi>
Complex expectation(const SparseOperator& op, std::span<const Complex> psi);

}  // namespace dcesync

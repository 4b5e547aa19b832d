#include "dcesync/sparse_operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "dcesync/error.hpp"

namespace dcesync {

SparseOperator::SparseOperator(std::size_t dimension, std::vector<Entry> entries) : dimension_(dimension) {
    for (const auto& e : entries) {
        if (e.row >= dimension || e.col >= dimension) {
            throw OutOfRangeError("operator entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                                  ") outside dimension " + std::to_string(dimension));
        }
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });

    row_offsets_.assign(dimension + 1, 0);
    columns_.reserve(entries.size());
    values_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size();) {
        const std::size_t row = entries[i].row, col = entries[i].col;
        Complex sum{};
        for (; i < entries.size() && entries[i].row == row && entries[i].col == col; ++i) sum += entries[i].value;
        if (sum == Complex{}) continue;
        columns_.push_back(col);
        values_.push_back(sum);
        ++row_offsets_[row + 1];
    }
    for (std::size_t r = 0; r < dimension; ++r) row_offsets_[r + 1] += row_offsets_[r];
}

std::vector<SparseOperator::Entry> SparseOperator::entries() const {
    std::vector<Entry> out;
    out.reserve(values_.size());
    for (std::size_t r = 0; r < dimension_; ++r) {
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) out.push_back({r, columns_[k], values_[k]});
    }
    return out;
}

Complex SparseOperator::value(std::size_t row, std::size_t col) const {
    if (row >= dimension_ || col >= dimension_) throw OutOfRangeError("operator index outside dimension");
    const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row]);
    const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[row + 1]);
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) return {};
    return values_[static_cast<std::size_t>(it - columns_.begin())];
}

void SparseOperator::apply(std::span<const Complex> x, std::span<Complex> y) const {
    for (std::size_t r = 0; r < dimension_; ++r) {
        Complex acc{};
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) acc += values_[k] * x[columns_[k]];
        y[r] = acc;
    }
}

void SparseOperator::apply_add(std::span<const Complex> x, std::span<Complex> y, Complex scale) const {
    for (std::size_t r = 0; r < dimension_; ++r) {
        Complex acc{};
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) acc += values_[k] * x[columns_[k]];
        y[r] += scale * acc;
    }
}

bool SparseOperator::is_hermitian(double tol) const {
    for (std::size_t r = 0; r < dimension_; ++r) {
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            if (std::abs(values_[k] - std::conj(value(columns_[k], r))) > tol) return false;
        }
    }
    return true;
}

double SparseOperator::max_abs() const noexcept {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

double SparseOperator::row_sum_bound() const noexcept {
    double bound = 0.0;
    for (std::size_t r = 0; r < dimension_; ++r) {
        double sum = 0.0;
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) sum += std::abs(values_[k]);
        bound = std::max(bound, sum);
    }
    return bound;
}

SparseOperator SparseOperator::scaled(Complex factor) const {
    auto e = entries();
    for (auto& x : e) x.value *= factor;
    return SparseOperator(dimension_, std::move(e));
}

SparseOperator SparseOperator::adjoint() const {
    auto e = entries();
    for (auto& x : e) {
        std::swap(x.row, x.col);
        x.value = std::conj(x.value);
    }
    return SparseOperator(dimension_, std::move(e));
}

namespace {

void require_same_dimension(const SparseOperator& a, const SparseOperator& b) {
    if (a.dimension() != b.dimension()) {
        throw InvalidArgumentError("operator dimension mismatch: " + std::to_string(a.dimension()) + " vs " +
                                   std::to_string(b.dimension()));
    }
}

}  // namespace

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
    require_same_dimension(a, b);
    auto e = a.entries();
    auto eb = b.entries();
    e.insert(e.end(), eb.begin(), eb.end());
    return SparseOperator(a.dimension(), std::move(e));
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) { return a + b.scaled(-1.0); }

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
    require_same_dimension(a, b);
    std::vector<SparseOperator::Entry> out;
    const auto ao = a.row_offsets(), bo = b.row_offsets();
    const auto ac = a.columns(), bc = b.columns();
    const auto av = a.values(), bv = b.values();
    for (std::size_t r = 0; r < a.dimension(); ++r) {
        std::map<std::size_t, Complex> row;
        for (std::size_t k = ao[r]; k < ao[r + 1]; ++k) {
            const std::size_t mid = ac[k];
            for (std::size_t l = bo[mid]; l < bo[mid + 1]; ++l) row[bc[l]] += av[k] * bv[l];
        }
        for (const auto& [c, v] : row) out.push_back({r, c, v});
    }
    return SparseOperator(a.dimension(), std::move(out));
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) { return a * b - b * a; }

Complex expectation(const SparseOperator& op, std::span<const Complex> psi) {
    const auto offs = op.row_offsets();
    const auto cols = op.columns();
    const auto vals = op.values();
    Complex sum{};
    for (std::size_t r = 0; r < op.dimension(); ++r) {
        Complex acc{};
        for (std::size_t k = offs[r]; k < offs[r + 1]; ++k) acc += vals[k] * psi[cols[k]];
        sum += std::conj(psi[r]) * acc;
    }
    return sum;
}

}  // namespace dcesync

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mongemmd {

using Point = std::vector<double>;

/// A finite cloud of d-dimensional points, stored row-major (one point per row).
/// Represents the empirical measure (1/n) sum_i delta_{x_i}.
class SampleSet {
public:
    SampleSet() = default;

    /// n points of dimension dim, zero-initialised.
    SampleSet(std::size_t n, std::size_t dim);

    /// Takes ownership of row-major storage; data.size() must equal n * dim.
    SampleSet(std::size_t dim, std::vector<double> data);

    static SampleSet from_points(const std::vector<Point>& points);

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return n_ == 0; }

    std::span<const double> operator[](std::size_t i) const noexcept
    {
        return {data_.data() + i * dim_, dim_};
    }
    std::span<double> operator[](std::size_t i) noexcept
    {
        return {data_.data() + i * dim_, dim_};
    }

    const std::vector<double>& data() const noexcept { return data_; }

    /// Rows selected by index, in the given order.
    SampleSet select(std::span<const std::size_t> indices) const;

    bool operator==(const SampleSet&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

// Throws InputError unless both sets are non-empty and share a dimension.
void require_same_dim(const SampleSet& a, const SampleSet& b, const char* what);

} // namespace mongemmd

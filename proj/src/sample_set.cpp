#include "mongemmd/sample_set.hpp"

#include "mongemmd/error.hpp"

#include <string>

namespace mongemmd {

SampleSet::SampleSet(std::size_t n, std::size_t dim) : n_(n), dim_(dim), data_(n * dim, 0.0)
{
    if (dim == 0 && n > 0)
        throw InputError("SampleSet: dimension must be >= 1");
}

SampleSet::SampleSet(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data))
{
    if (dim == 0)
        throw InputError("SampleSet: dimension must be >= 1");
    if (data_.size() % dim != 0)
        throw InputError("SampleSet: storage size " + std::to_string(data_.size()) +
                         " is not a multiple of dimension " + std::to_string(dim));
    n_ = data_.size() / dim;
}

SampleSet SampleSet::from_points(const std::vector<Point>& points)
{
    if (points.empty())
        return {};
    const std::size_t dim = points.front().size();
    std::vector<double> data;
    data.reserve(points.size() * dim);
    for (const auto& p : points) {
        if (p.size() != dim)
            throw InputError("SampleSet: points have inconsistent dimensions");
        data.insert(data.end(), p.begin(), p.end());
    }
    return SampleSet(dim, std::move(data));
}

SampleSet SampleSet::select(std::span<const std::size_t> indices) const
{
    SampleSet out(indices.size(), dim_);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        if (indices[r] >= n_)
            throw InputError("SampleSet::select: index out of range");
        const auto src = (*this)[indices[r]];
        auto dst = out[r];
        for (std::size_t k = 0; k < dim_; ++k)
            dst[k] = src[k];
    }
    return out;
}

void require_same_dim(const SampleSet& a, const SampleSet& b, const char* what)
{
    if (a.empty() || b.empty())
        throw InputError(std::string(what) + ": sample sets must be non-empty");
    if (a.dim() != b.dim())
        throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
}

} // namespace mongemmd

#include "mongemmd/data.hpp"

#include "mongemmd/binary_io.hpp"
#include "mongemmd/error.hpp"
#include "mongemmd/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace mongemmd {

std::string to_string(DatasetFamily family)
{
    switch (family) {
    case DatasetFamily::TwoMoons:
        return "moons";
    case DatasetFamily::TwoCircles:
        return "circles";
    case DatasetFamily::IsotropicGaussian:
        return "gaussian";
    }
    return "?";
}

DatasetFamily parse_dataset_family(const std::string& text)
{
    if (text == "moons")
        return DatasetFamily::TwoMoons;
    if (text == "circles")
        return DatasetFamily::TwoCircles;
    if (text == "gaussian")
        return DatasetFamily::IsotropicGaussian;
    throw InputError("unknown dataset family '" + text + "' (expected moons, circles or gaussian)");
}

void DatasetSpec::validate() const
{
    if (n < 1)
        throw InputError("dataset: n must be >= 1");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        throw InputError("dataset: noise must be a finite non-negative number");
    if (family == DatasetFamily::TwoCircles && !(factor > 0.0 && factor < 1.0))
        throw InputError("dataset: factor must lie in (0, 1)");
    if (family == DatasetFamily::IsotropicGaussian) {
        if (mean.empty())
            throw InputError("dataset: Gaussian mean must have at least one coordinate");
        if (!(variance > 0.0) || !std::isfinite(variance))
            throw InputError("dataset: variance must be positive");
        for (double m : mean)
            if (!std::isfinite(m))
                throw InputError("dataset: Gaussian mean must be finite");
    }
}

SampleSet generate(const DatasetSpec& spec)
{
    spec.validate();
    Rng rng(spec.seed);

    if (spec.family == DatasetFamily::IsotropicGaussian) {
        const std::size_t d = spec.mean.size();
        const double sd = std::sqrt(spec.variance);
        SampleSet out(spec.n, d);
        for (std::size_t i = 0; i < spec.n; ++i) {
            auto p = out[i];
            for (std::size_t k = 0; k < d; ++k)
                p[k] = spec.mean[k] + sd * rng.normal();
        }
        return out;
    }

    SampleSet out(spec.n, 2);
    const std::size_t first = spec.n / 2;
    for (std::size_t i = 0; i < spec.n; ++i) {
        const bool outer = i < first;
        double x = 0.0;
        double y = 0.0;
        if (spec.family == DatasetFamily::TwoMoons) {
            const double t = rng.uniform(0.0, std::numbers::pi);
            if (outer) {
                x = std::cos(t);
                y = std::sin(t);
            } else {
                x = 1.0 - std::cos(t);
                y = 0.5 - std::sin(t);
            }
        } else {
            const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double radius = outer ? 1.0 : spec.factor;
            x = radius * std::cos(t);
            y = radius * std::sin(t);
        }
        auto p = out[i];
        p[0] = x;
        p[1] = y;
    }
    if (spec.noise > 0.0) {
        for (std::size_t i = 0; i < spec.n; ++i) {
            auto p = out[i];
            p[0] += spec.noise * rng.normal();
            p[1] += spec.noise * rng.normal();
        }
    }
    return out;
}

std::string to_csv(const SampleSet& points)
{
    std::string out;
    for (std::size_t k = 0; k < points.dim(); ++k) {
        if (k)
            out += ',';
        out += "x" + std::to_string(k);
    }
    out += '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto p = points[i];
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (k)
                out += ',';
            out += io::format_double(p[k]);
        }
        out += '\n';
    }
    return out;
}

SampleSet from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != 'x')
        throw InputError("csv: missing x0,x1,... header");
    std::size_t dim = 1;
    for (char c : line)
        if (c == ',')
            ++dim;

    std::vector<double> data;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const char* cur = line.c_str();
        for (std::size_t k = 0; k < dim; ++k) {
            char* end = nullptr;
            const double v = std::strtod(cur, &end);
            if (end == cur || !std::isfinite(v))
                throw InputError("csv: bad number on line " + std::to_string(row));
            data.push_back(v);
            cur = end;
            if (k + 1 < dim) {
                if (*cur != ',')
                    throw InputError("csv: expected " + std::to_string(dim) + " columns on line " +
                                     std::to_string(row));
                ++cur;
            }
        }
        if (*cur != '\0')
            throw InputError("csv: trailing characters on line " + std::to_string(row));
    }
    return SampleSet(dim, std::move(data));
}

void write_csv(const std::filesystem::path& path, const SampleSet& points)
{
    io::atomic_write(path, to_csv(points));
}

SampleSet read_csv(const std::filesystem::path& path)
{
    try {
        return from_csv(io::read_file(path));
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

} // namespace mongemmd

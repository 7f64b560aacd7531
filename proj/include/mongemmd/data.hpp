#pragma once

#include "mongemmd/sample_set.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mongemmd {

enum class DatasetFamily { TwoMoons, TwoCircles, IsotropicGaussian };

std::string to_string(DatasetFamily family);
DatasetFamily parse_dataset_family(const std::string& text);

struct DatasetSpec {
    DatasetFamily family = DatasetFamily::IsotropicGaussian;
    std::size_t n = 500;
    double noise = 0.05;         // moons / circles
    double factor = 0.5;         // circles: inner radius
    Point mean{0.0, 0.0};        // Gaussian
    double variance = 1.0;       // Gaussian
    std::uint64_t seed = 0;

    void validate() const;
};

/// Draws an IID sample. Geometry (before noise):
///   TwoMoons   first n/2 points (cos t, sin t); the rest (1 - cos t, 0.5 - sin t); t ~ U[0, pi]
///   TwoCircles first n/2 points on the unit circle; the rest on radius `factor`; angle ~ U[0, 2 pi)
///   IsotropicGaussian  N(mean, variance I)
/// Moons and circles then receive N(0, noise^2 I) jitter.
SampleSet generate(const DatasetSpec& spec);

/// Header `x0,...,x{d-1}`, one point per row, 17 significant digits.
std::string to_csv(const SampleSet& points);
SampleSet from_csv(const std::string& text);

void write_csv(const std::filesystem::path& path, const SampleSet& points);
SampleSet read_csv(const std::filesystem::path& path);

} // namespace mongemmd

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace elev {

// Image-like representation: the signal is resampled to a fixed number of
// points and drawn as a 1-px polyline on a small RGB raster. The y-axis is
// fit per sample; the line color encodes which equal-width interval of the
// dataset-wide elevation range the sample mean falls into.

using Rgb = std::array<std::uint8_t, 3>;

std::vector<Rgb> default_palette();  // 8 fixed distinct hues

struct RasterConfig {
    int width = 32;
    int height = 32;
    int points = 200;
    std::vector<Rgb> palette = default_palette();
    double global_min = 0.0;  // dataset-wide elevation range, feet
    double global_max = 1.0;
};

struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // height * width * 3, row 0 at the top

    Rgb at(int row, int col) const {
        const auto off = static_cast<std::size_t>(row * width + col) * 3;
        return {pixels[off], pixels[off + 1], pixels[off + 2]};
    }
};

inline constexpr Rgb kBackground{255, 255, 255};

// Mean over equal-length index partitions when downsampling; linear
// interpolation when upsampling. Throws DataError when |values| < 2.
std::vector<double> resample(const std::vector<double>& values, int points);

// values must already have config.points entries. Deterministic: integer
// line stepping, no anti-aliasing; flat signals draw at the center row.
RasterImage rasterize(const std::vector<double>& values, const RasterConfig& config);

// Which palette bucket a signal falls into (equal-width intervals of the
// global range keyed by the sample mean).
std::size_t color_bucket(const std::vector<double>& values, const RasterConfig& config);

void write_png(const RasterImage& image, const std::filesystem::path& path);

// Row-major RGB floats scaled to [0,1]; the flattened model input.
std::vector<double> to_unit_floats(const RasterImage& image);

}  // namespace elev

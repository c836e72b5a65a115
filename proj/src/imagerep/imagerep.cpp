#include "elevinfer/imagerep.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <string>

#include "elevinfer/error.hpp"
#include "elevinfer/kernels.hpp"

namespace elev {

std::vector<Rgb> default_palette() {
    return {
        Rgb{230, 25, 75},    // red
        Rgb{245, 130, 48},   // orange
        Rgb{255, 225, 25},   // yellow
        Rgb{60, 180, 75},    // green
        Rgb{70, 240, 240},   // cyan
        Rgb{0, 130, 200},    // blue
        Rgb{145, 30, 180},   // purple
        Rgb{240, 50, 230},   // magenta
    };
}

namespace {

void validate(const RasterConfig& config) {
    if (config.width < 8 || config.height < 8) {
        throw UsageError("raster: width and height must be >= 8");
    }
    if (config.points < 2) throw UsageError("raster: points must be >= 2");
    if (config.palette.size() < 2) throw UsageError("raster: palette needs at least 2 colors");
    std::set<Rgb> distinct(config.palette.begin(), config.palette.end());
    if (distinct.size() != config.palette.size()) {
        throw UsageError("raster: palette colors must be distinct");
    }
}

}  // namespace

std::vector<double> resample(const std::vector<double>& values, int points) {
    if (values.size() < 2) throw DataError("resample: signal too short (need >= 2 values)");
    if (points < 2) throw UsageError("resample: points must be >= 2");
    const std::size_t n = values.size();
    const auto p = static_cast<std::size_t>(points);

    std::vector<double> out(p, 0.0);
    if (n >= p) {
        // mean of each of p equal-length index partitions
        for (std::size_t i = 0; i < p; ++i) {
            const std::size_t lo = i * n / p;
            const std::size_t hi = (i + 1) * n / p;
            out[i] = kernels::sum(values.data() + lo, hi - lo) / static_cast<double>(hi - lo);
        }
    } else {
        for (std::size_t i = 0; i < p; ++i) {
            const double t = static_cast<double>(i) * static_cast<double>(n - 1) /
                             static_cast<double>(p - 1);
            const auto lo = static_cast<std::size_t>(std::floor(t));
            const std::size_t hi = std::min(lo + 1, n - 1);
            const double frac = t - static_cast<double>(lo);
            out[i] = values[lo] * (1.0 - frac) + values[hi] * frac;
        }
    }
    return out;
}

std::size_t color_bucket(const std::vector<double>& values, const RasterConfig& config) {
    const double mean = kernels::sum(values.data(), values.size()) /
                        static_cast<double>(values.size());
    const double span = config.global_max - config.global_min;
    if (span <= 0.0) return 0;
    const double t = (mean - config.global_min) / span;
    const auto k = static_cast<long>(std::floor(t * static_cast<double>(config.palette.size())));
    return static_cast<std::size_t>(
        std::clamp(k, 0L, static_cast<long>(config.palette.size()) - 1L));
}

namespace {

void put_pixel(RasterImage& img, int x, int y, const Rgb& color) {
    if (x < 0 || x >= img.width || y < 0 || y >= img.height) return;
    const auto off = static_cast<std::size_t>(y * img.width + x) * 3;
    img.pixels[off] = color[0];
    img.pixels[off + 1] = color[1];
    img.pixels[off + 2] = color[2];
}

// classic integer line stepping, all octants
void draw_line(RasterImage& img, int x0, int y0, int x1, int y1, const Rgb& color) {
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        put_pixel(img, x0, y0, color);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

}  // namespace

RasterImage rasterize(const std::vector<double>& values, const RasterConfig& config) {
    validate(config);
    if (values.size() != static_cast<std::size_t>(config.points)) {
        throw DataError("rasterize: expected a resampled signal of " +
                        std::to_string(config.points) + " points, got " +
                        std::to_string(values.size()));
    }

    RasterImage img;
    img.width = config.width;
    img.height = config.height;
    img.pixels.assign(static_cast<std::size_t>(config.width) * config.height * 3, 0);
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = kBackground[0];
        img.pixels[i + 1] = kBackground[1];
        img.pixels[i + 2] = kBackground[2];
    }

    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    const double vmin = *min_it;
    const double vmax = *max_it;
    const Rgb color = config.palette[color_bucket(values, config)];

    auto x_of = [&](std::size_t i) {
        return static_cast<int>(std::lround(static_cast<double>(i) * (config.width - 1) /
                                            static_cast<double>(config.points - 1)));
    };
    auto y_of = [&](double v) {
        if (vmax == vmin) return config.height / 2;  // flat signal at the center row
        const double t = (v - vmin) / (vmax - vmin);
        return (config.height - 1) - static_cast<int>(std::lround(t * (config.height - 1)));
    };

    int px = x_of(0);
    int py = y_of(values[0]);
    for (std::size_t i = 1; i < values.size(); ++i) {
        const int x = x_of(i);
        const int y = y_of(values[i]);
        draw_line(img, px, py, x, y, color);
        px = x;
        py = y;
    }
    return img;
}

std::vector<double> to_unit_floats(const RasterImage& image) {
    std::vector<double> out(image.pixels.size());
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        out[i] = static_cast<double>(image.pixels[i]) / 255.0;
    }
    return out;
}

namespace {

void write_be32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

void write_chunk(std::ofstream& out, const char type[4], const std::string& data) {
    std::string head;
    write_be32(head, static_cast<std::uint32_t>(data.size()));
    out.write(head.data(), 4);

    std::string body(type, 4);
    body += data;
    out.write(body.data(), static_cast<std::streamsize>(body.size()));

    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
                           static_cast<uInt>(body.size()));
    std::string tail;
    write_be32(tail, static_cast<std::uint32_t>(crc));
    out.write(tail.data(), 4);
}

}  // namespace

void write_png(const RasterImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("write_png: cannot open " + path.string());

    static const unsigned char signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.write(reinterpret_cast<const char*>(signature), 8);

    std::string ihdr;
    write_be32(ihdr, static_cast<std::uint32_t>(image.width));
    write_be32(ihdr, static_cast<std::uint32_t>(image.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // color type: truecolor
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // interlace
    write_chunk(out, "IHDR", ihdr);

    // raw scanlines with filter byte 0
    std::string raw;
    raw.reserve(static_cast<std::size_t>(image.height) * (1 + 3 * image.width));
    for (int row = 0; row < image.height; ++row) {
        raw.push_back(0);
        const auto off = static_cast<std::size_t>(row) * image.width * 3;
        raw.append(reinterpret_cast<const char*>(image.pixels.data() + off),
                   static_cast<std::size_t>(image.width) * 3);
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string idat(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(idat.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                  Z_BEST_COMPRESSION) != Z_OK) {
        throw RuntimeError("write_png: deflate failed");
    }
    idat.resize(bound);
    write_chunk(out, "IDAT", idat);
    write_chunk(out, "IEND", "");
}

}  // namespace elev

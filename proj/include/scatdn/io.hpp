// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "scatdn/core.hpp"

namespace scatdn {

/// Write an image as flat little-endian float64 binary plus a JSON sidecar
/// ("<path>.json") recording the side length and value range.
inline void write_image(const GridImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_image: cannot open " + path);
    out.write(reinterpret_cast<const char*>(img.v.data()),
              static_cast<std::streamsize>(img.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write_image: short write to " + path);

    double lo = 0.0, hi = 0.0;
    if (!img.v.empty()) {
        auto [mn, mx] = std::minmax_element(img.v.begin(), img.v.end());
        lo = *mn;
        hi = *mx;
    }
    nlohmann::json meta;
    meta["n"] = img.n;
    meta["dtype"] = "float64";
    meta["range"] = {lo, hi};
    std::ofstream side(path + ".json");
    if (!side) throw std::runtime_error("write_image: cannot open " + path + ".json");
    side << meta.dump(2) << '\n';
}

/// Read an image written by write_image; the sidecar provides the geometry.
inline GridImage read_image(const std::string& path) {
    std::ifstream side(path + ".json");
    if (!side) throw std::runtime_error("read_image: missing sidecar " + path + ".json");
    nlohmann::json meta = nlohmann::json::parse(side);
    if (!meta.contains("n")) throw std::runtime_error("read_image: sidecar lacks field 'n'");
    std::size_t n = meta["n"].get<std::size_t>();
    if (n == 0) throw std::runtime_error("read_image: sidecar reports n = 0");
    if (meta.value("dtype", std::string("float64")) != "float64")
        throw std::runtime_error("read_image: unsupported dtype in sidecar");

    GridImage img(n);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_image: cannot open " + path);
    in.read(reinterpret_cast<char*>(img.v.data()), static_cast<std::streamsize>(img.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(img.size() * sizeof(double)))
        throw std::runtime_error("read_image: file shorter than sidecar geometry implies");
    return img;
}

/// Write a 16-bit binary PGM for visual inspection, mapping [lo, hi] (or the
/// image's own range when lo >= hi) linearly onto [0, 65535]. PGM stores the
/// sample big-endian per the format specification.
inline void write_pgm16(const GridImage& img, const std::string& path, double lo = 0.0, double hi = 0.0) {
    if (lo >= hi) {
        auto [mn, mx] = std::minmax_element(img.v.begin(), img.v.end());
        lo = *mn;
        hi = *mx;
        if (lo >= hi) hi = lo + 1.0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm16: cannot open " + path);
    out << "P5\n" << img.n << ' ' << img.n << "\n65535\n";
    double scale = 65535.0 / (hi - lo);
    for (double v : img.v) {
        double t = std::clamp((v - lo) * scale, 0.0, 65535.0);
        auto q = static_cast<std::uint16_t>(t + 0.5);
        char bytes[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xff)};
        out.write(bytes, 2);
    }
    if (!out) throw std::runtime_error("write_pgm16: short write to " + path);
}

}  // namespace scatdn

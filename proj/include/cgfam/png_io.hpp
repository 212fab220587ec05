#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cgfam {

void write_png_gray(const std::string& path, std::size_t width, std::size_t height,
                    const std::vector<std::uint8_t>& pixels);
void write_png_rgb(const std::string& path, std::size_t width, std::size_t height,
                   const std::vector<std::uint8_t>& rgb);

struct PngImage {
    std::size_t width = 0;
    std::size_t height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;
};
PngImage read_png(const std::string& path);

}  // namespace cgfam

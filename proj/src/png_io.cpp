#include "cgfam/png_io.hpp"

#include "cgfam/common.hpp"

#include <cstdio>
#include <memory>
#include <png.h>

namespace cgfam {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_png(const std::string& path, std::size_t width, std::size_t height, int color_type, int channels,
               const std::vector<std::uint8_t>& data) {
    if (data.size() != width * height * static_cast<std::size_t>(channels))
        throw std::invalid_argument("png buffer size mismatch");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error(ErrorKind::input_format, "cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::input_format, "libpng initialisation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::input_format, "libpng failed writing " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t r = 0; r < height; ++r)
        png_write_row(png, const_cast<png_bytep>(data.data() + r * width * static_cast<std::size_t>(channels)));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png_gray(const std::string& path, std::size_t width, std::size_t height,
                    const std::vector<std::uint8_t>& pixels) {
    write_png(path, width, height, PNG_COLOR_TYPE_GRAY, 1, pixels);
}

void write_png_rgb(const std::string& path, std::size_t width, std::size_t height,
                   const std::vector<std::uint8_t>& rgb) {
    write_png(path, width, height, PNG_COLOR_TYPE_RGB, 3, rgb);
}

PngImage read_png(const std::string& path) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str()))
        throw Error(ErrorKind::input_format, "cannot read png " + path);
    PngImage out;
    out.width = img.width;
    out.height = img.height;
    const bool gray = (img.format & PNG_FORMAT_FLAG_COLOR) == 0;
    img.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    out.channels = gray ? 1 : 3;
    out.data.resize(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, out.data.data(), 0, nullptr)) {
        png_image_free(&img);
        throw Error(ErrorKind::input_format, "cannot decode png " + path);
    }
    return out;
}

}  // namespace cgfam

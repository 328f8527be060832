#pragma once

#include <algorithm>
#include <cstdio>
#include <csetjmp>
#include <cstring>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "rotinv/errors.hpp"
#include "rotinv/image.hpp"

namespace rotinv {

namespace detail {

struct FileHandle {
    std::FILE* fp = nullptr;
    explicit FileHandle(const std::string& path, const char* mode) : fp(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (fp) std::fclose(fp);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

inline GrayImage gray_from_rgb8(const std::vector<unsigned char>& rgb, int w, int h, int channels) {
    GrayImage img(w, h);
    std::size_t idx = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x, idx += channels) {
            double v;
            if (channels == 1) {
                v = rgb[idx];
            } else {
                v = 0.299 * rgb[idx] + 0.587 * rgb[idx + 1] + 0.114 * rgb[idx + 2];
            }
            img.at(x, y) = v / 255.0;
        }
    }
    return img;
}

}  // namespace detail

/// Read an 8-bit PNG as grayscale in [0, 1]. Color inputs are converted with
/// the 0.299/0.587/0.114 luminance weights; alpha is dropped.
inline GrayImage read_png(const std::string& path) {
    detail::FileHandle file(path, "rb");
    if (!file.fp) throw MissingFile(path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png: allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png: failed to decode " + path);
    }
    png_init_io(png, file.fp);
    png_read_info(png, info);

    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int channels = static_cast<int>(png_get_channels(png, info));

    std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * channels);
    std::vector<png_bytep> rows(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) rows[static_cast<std::size_t>(y)] = buf.data() + static_cast<std::size_t>(y) * w * channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    return detail::gray_from_rgb8(buf, w, h, channels);
}

/// Write an 8-bit grayscale PNG; intensities are clamped to [0, 1].
inline void write_png(const std::string& path, const GrayImage& img) {
    detail::FileHandle file(path, "wb");
    if (!file.fp) throw IoError("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png: failed to encode " + path);
    }
    png_init_io(png, file.fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<unsigned char> row(static_cast<std::size_t>(img.width));
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double v = std::clamp(img.at(x, y), 0.0, 1.0);
            row[static_cast<std::size_t>(x)] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

namespace detail {

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jmp;
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(mgr->jmp, 1);
}

}  // namespace detail

/// Read a JPEG as grayscale in [0, 1] (libjpeg performs the luma conversion).
inline GrayImage read_jpeg(const std::string& path) {
    detail::FileHandle file(path, "rb");
    if (!file.fp) throw MissingFile(path);

    jpeg_decompress_struct cinfo;
    detail::JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = detail::jpeg_error_exit;
    if (setjmp(err.jmp)) {
        jpeg_destroy_decompress(&cinfo);
        throw IoError("jpeg: failed to decode " + path);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, file.fp);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_GRAYSCALE;
    jpeg_start_decompress(&cinfo);

    const int w = static_cast<int>(cinfo.output_width);
    const int h = static_cast<int>(cinfo.output_height);
    GrayImage img(w, h);
    std::vector<unsigned char> row(static_cast<std::size_t>(w));
    unsigned char* rowp = row.data();
    while (cinfo.output_scanline < cinfo.output_height) {
        const int y = static_cast<int>(cinfo.output_scanline);
        jpeg_read_scanlines(&cinfo, &rowp, 1);
        for (int x = 0; x < w; ++x) img.at(x, y) = row[static_cast<std::size_t>(x)] / 255.0;
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

/// Dispatch on file extension (.png / .jpg / .jpeg, case-insensitive).
inline GrayImage read_image(const std::string& path) {
    auto ends_with_ci = [&](const char* suffix) {
        const std::size_t n = std::strlen(suffix);
        if (path.size() < n) return false;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::tolower(path[path.size() - n + i]) != suffix[i]) return false;
        }
        return true;
    };
    if (ends_with_ci(".png")) return read_png(path);
    if (ends_with_ci(".jpg") || ends_with_ci(".jpeg")) return read_jpeg(path);
    throw IoError("unsupported image format: " + path);
}

}  // namespace rotinv

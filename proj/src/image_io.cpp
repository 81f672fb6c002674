#include "csalsa/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace csalsa {
namespace {

// Reads one header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in)
{
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

std::size_t header_number(std::istream& in, const std::string& path, const char* what)
{
    const std::string tok = header_token(in);
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw DomainError(path + ": bad " + what + " in header");
    }
    return static_cast<std::size_t>(std::stoul(tok));
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write " + path);
    return out;
}

}  // namespace

PgmImage read_pgm(const std::string& path)
{
    std::ifstream in = open_in(path);
    if (header_token(in) != "P5") throw DomainError(path + ": not a binary PGM (P5)");
    PgmImage img;
    img.shape.width = header_number(in, path, "width");
    img.shape.height = header_number(in, path, "height");
    const std::size_t maxval = header_number(in, path, "maxval");
    if (img.shape.size() == 0) throw DomainError(path + ": empty image");
    if (maxval < 1 || maxval > 65535) throw DomainError(path + ": maxval out of range");
    img.maxval = static_cast<int>(maxval);

    const std::size_t n = img.shape.size();
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(n * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw DomainError(path + ": truncated pixel data");
    img.pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        img.pixels[i] = bytes == 2 ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
        if (img.pixels[i] > maxval) throw DomainError(path + ": sample exceeds maxval");
    }
    return img;
}

void write_pgm(const std::string& path, const PgmImage& image)
{
    if (image.pixels.size() != image.shape.size() || image.shape.size() == 0) {
        throw DomainError("write_pgm: pixel count does not match shape");
    }
    if (image.maxval < 1 || image.maxval > 65535) throw DomainError("write_pgm: maxval out of range");
    std::ofstream out = open_out(path);
    out << "P5\n" << image.shape.width << ' ' << image.shape.height << '\n' << image.maxval << '\n';
    const bool wide = image.maxval > 255;
    std::vector<unsigned char> raw;
    raw.reserve(image.pixels.size() * (wide ? 2 : 1));
    for (std::uint16_t p : image.pixels) {
        if (p > image.maxval) throw DomainError("write_pgm: sample exceeds maxval");
        if (wide) raw.push_back(static_cast<unsigned char>(p >> 8));
        raw.push_back(static_cast<unsigned char>(p & 0xff));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw DomainError("write_pgm: write failed for " + path);
}

PgmImage quantize(const ImageGrid& image, double lo, double hi, int maxval)
{
    if (!(hi > lo)) throw DomainError("quantize needs hi > lo");
    if (maxval < 1 || maxval > 65535) throw DomainError("quantize: maxval out of range");
    PgmImage out{image.shape(), maxval, std::vector<std::uint16_t>(image.size())};
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double t = std::clamp((image[i] - lo) / (hi - lo), 0.0, 1.0);
        out.pixels[i] = static_cast<std::uint16_t>(std::lround(t * maxval));
    }
    return out;
}

ImageGrid to_image(const PgmImage& image, double scale)
{
    RVec v(image.pixels.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = image.pixels[i] * scale / image.maxval;
    return ImageGrid(image.shape, std::move(v));
}

Mask read_pbm(const std::string& path)
{
    std::ifstream in = open_in(path);
    if (header_token(in) != "P4") throw DomainError(path + ": not a binary PBM (P4)");
    Shape shape;
    shape.width = header_number(in, path, "width");
    shape.height = header_number(in, path, "height");
    if (shape.size() == 0) throw DomainError(path + ": empty mask");
    const std::size_t row_bytes = (shape.width + 7) / 8;
    std::vector<unsigned char> raw(row_bytes * shape.height);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw DomainError(path + ": truncated bit data");
    Mask mask(shape, 0);
    for (std::size_t r = 0; r < shape.height; ++r) {
        for (std::size_t c = 0; c < shape.width; ++c) {
            mask(r, c) = (raw[r * row_bytes + c / 8] >> (7 - c % 8)) & 1;
        }
    }
    return mask;
}

void write_pbm(const std::string& path, const Mask& mask)
{
    std::ofstream out = open_out(path);
    out << "P4\n" << mask.width() << ' ' << mask.height() << '\n';
    const std::size_t row_bytes = (mask.width() + 7) / 8;
    std::vector<unsigned char> raw(row_bytes * mask.height(), 0);
    for (std::size_t r = 0; r < mask.height(); ++r) {
        for (std::size_t c = 0; c < mask.width(); ++c) {
            if (mask(r, c)) raw[r * row_bytes + c / 8] |= static_cast<unsigned char>(1u << (7 - c % 8));
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw DomainError("write_pbm: write failed for " + path);
}

}  // namespace csalsa

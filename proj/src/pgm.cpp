#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "elastic/io.hpp"

namespace elastic::io {

namespace {

// Skips whitespace and '#' comments in a PNM header.
void skip_header_space(std::istream& in) {
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string ignored;
            std::getline(in, ignored);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            in.get();
        } else {
            return;
        }
    }
}

long read_header_int(std::istream& in, const std::filesystem::path& path) {
    skip_header_space(in);
    long v = -1;
    if (!(in >> v) || v < 0) throw IoError("malformed PGM header in " + path.string());
    return v;
}

}  // namespace

Image8 read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::array<char, 2> magic{};
    if (!in.read(magic.data(), 2) || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2'))
        throw IoError(path.string() + " is not a P5/P2 PGM file");
    const long width = read_header_int(in, path);
    const long height = read_header_int(in, path);
    const long maxval = read_header_int(in, path);
    if (width < 1 || height < 1) throw IoError("PGM has empty dimensions: " + path.string());
    if (maxval < 1 || maxval > 255) throw IoError("only 8-bit PGM is supported: " + path.string());

    Image8 img(height, width);
    const auto count = static_cast<std::size_t>(width * height);
    std::vector<long> raw(count);
    if (magic[1] == '5') {
        // Exactly one whitespace byte separates the header from the raster.
        const int sep = in.get();
        if (sep == EOF || !std::isspace(sep)) throw IoError("malformed PGM header in " + path.string());
        std::vector<unsigned char> bytes(count);
        if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count)))
            throw IoError("truncated PGM raster in " + path.string());
        std::copy(bytes.begin(), bytes.end(), raw.begin());
    } else {
        for (auto& v : raw) v = read_header_int(in, path);
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (raw[i] > maxval) throw IoError("PGM sample exceeds maxval in " + path.string());
        img.data()[i] = static_cast<std::uint8_t>(maxval == 255 ? raw[i] : std::lround(255.0 * double(raw[i]) / double(maxval)));
    }
    return img;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

void write_pgm(const std::filesystem::path& path, const Image8& image) {
    std::string buf = "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
    buf.append(reinterpret_cast<const char*>(image.data()), static_cast<std::size_t>(image.size()));
    write_file_atomic(path, buf);
}

BinaryMask image_to_mask(const Image8& image) { return (image >= std::uint8_t(128)).cast<std::uint8_t>(); }

ScalarField2D image_to_unit(const Image8& image) { return image.cast<double>() / 255.0; }

Image8 mask_to_image(const BinaryMask& mask) {
    return mask.unaryExpr([](std::uint8_t v) { return std::uint8_t(v ? 255 : 0); });
}

Image8 unit_to_image(const ScalarField2D& field) {
    return field.unaryExpr([](double v) {
        const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
        return static_cast<std::uint8_t>(std::lround(c * 255.0));
    });
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

RunReport::RunReport(std::string command) { lines_.emplace_back("command", std::move(command)); }

RunReport& RunReport::param(const std::string& key, const std::string& value) {
    lines_.emplace_back("param." + key, value);
    return *this;
}
RunReport& RunReport::param(const std::string& key, double value) { return param(key, format_number(value)); }

RunReport& RunReport::result(const std::string& key, const std::string& value) {
    lines_.emplace_back(key, value);
    return *this;
}
RunReport& RunReport::result(const std::string& key, double value) { return result(key, format_number(value)); }

RunReport& RunReport::output(const std::filesystem::path& written) {
    outputs_.push_back(written);
    lines_.emplace_back("output", written.string());
    return *this;
}

RunReport& RunReport::timing(const std::string& key, double milliseconds) {
    lines_.emplace_back("time_ms." + key, format_number(milliseconds));
    return *this;
}

void RunReport::print(std::ostream& os) const {
    for (const auto& [k, v] : lines_) os << k << '=' << v << '\n';
}

}  // namespace elastic::io

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "elastic/field.hpp"

namespace elastic::io {

/// 8-bit grayscale raster, row-major.
using Image8 = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Reads binary (P5) or ASCII (P2) PGM with maxval <= 255; samples are
/// rescaled to 0..255 when maxval < 255.
Image8 read_pgm(const std::filesystem::path& path);

/// Writes binary P5 with maxval 255, through a temporary file and a rename.
void write_pgm(const std::filesystem::path& path, const Image8& image);

/// Replaces `path` with `contents` atomically (temporary file, then rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Ground-truth convention: intensity >= 128 is foreground.
BinaryMask image_to_mask(const Image8& image);
/// Prediction convention: intensity / 255.
ScalarField2D image_to_unit(const Image8& image);
Image8 mask_to_image(const BinaryMask& mask);
/// Rounds values in [0,1] (clamped) to 0..255.
Image8 unit_to_image(const ScalarField2D& field);

/// Shortest round-trip decimal form, independent of the C++ locale.
std::string format_number(double value);

/// Line-oriented `key=value` record, printed in insertion order.
class RunReport {
  public:
    explicit RunReport(std::string command);

    RunReport& param(const std::string& key, const std::string& value);
    RunReport& param(const std::string& key, double value);
    RunReport& result(const std::string& key, const std::string& value);
    RunReport& result(const std::string& key, double value);
    RunReport& output(const std::filesystem::path& written);
    RunReport& timing(const std::string& key, double milliseconds);

    const std::vector<std::filesystem::path>& outputs() const { return outputs_; }
    void print(std::ostream& os) const;

  private:
    std::vector<std::pair<std::string, std::string>> lines_;
    std::vector<std::filesystem::path> outputs_;
};

}  // namespace elastic::io

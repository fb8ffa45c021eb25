#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <doctest.h>

#include "elastic/io.hpp"

using namespace elastic;
using namespace elastic::io;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("elastic_io_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path operator/(const std::string& name) const { return path / name; }
};

void write_raw(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

}  // namespace

TEST_CASE("P5 round trip") {
    TempDir dir;
    Image8 img(3, 5);
    for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = std::uint8_t(i * 17);
    write_pgm(dir / "a.pgm", img);
    CHECK(fs::exists(dir / "a.pgm"));
    CHECK_FALSE(fs::exists(dir / "a.pgm.tmp"));
    const Image8 back = read_pgm(dir / "a.pgm");
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 5);
    CHECK((back == img).all());

    // Overwrite in place.
    img.setConstant(9);
    write_pgm(dir / "a.pgm", img);
    CHECK((read_pgm(dir / "a.pgm") == 9).all());
}

TEST_CASE("P2, comments and reduced maxval") {
    TempDir dir;
    write_raw(dir / "b.pgm", "P2\n# a comment\n3 2 # trailing\n15\n0 15 7\n1 2 3\n");
    const Image8 img = read_pgm(dir / "b.pgm");
    REQUIRE(img.rows() == 2);
    REQUIRE(img.cols() == 3);
    CHECK(img(0, 0) == 0);
    CHECK(img(0, 1) == 255);
    CHECK(img(0, 2) == 119);
    CHECK(img(1, 0) == 17);

    write_raw(dir / "c.pgm", std::string("P5 2 1 255\n") + char(4) + char(200));
    const Image8 c = read_pgm(dir / "c.pgm");
    CHECK(c(0, 0) == 4);
    CHECK(c(0, 1) == 200);
}

TEST_CASE("malformed PGM files are rejected") {
    TempDir dir;
    CHECK_THROWS_AS(read_pgm(dir / "missing.pgm"), IoError);
    write_raw(dir / "p6.pgm", "P6\n1 1\n255\n\x01\x02\x03");
    CHECK_THROWS_AS(read_pgm(dir / "p6.pgm"), IoError);
    write_raw(dir / "short.pgm", "P5\n4 4\n255\n\x01\x02");
    CHECK_THROWS_AS(read_pgm(dir / "short.pgm"), IoError);
    write_raw(dir / "deep.pgm", "P2\n1 1\n65535\n9\n");
    CHECK_THROWS_AS(read_pgm(dir / "deep.pgm"), IoError);
    write_raw(dir / "over.pgm", "P2\n1 1\n10\n11\n");
    CHECK_THROWS_AS(read_pgm(dir / "over.pgm"), IoError);
    write_raw(dir / "empty.pgm", "P2\n0 3\n255\n");
    CHECK_THROWS_AS(read_pgm(dir / "empty.pgm"), IoError);
    write_raw(dir / "bad.pgm", "P2\nx 3\n255\n");
    CHECK_THROWS_AS(read_pgm(dir / "bad.pgm"), IoError);
}

TEST_CASE("image conversions") {
    Image8 img(1, 4);
    img << 0, 127, 128, 255;
    const BinaryMask m = image_to_mask(img);
    CHECK(m(0, 0) == 0);
    CHECK(m(0, 1) == 0);
    CHECK(m(0, 2) == 1);
    CHECK(m(0, 3) == 1);
    CHECK((mask_to_image(m) == (Image8(1, 4) << 0, 0, 255, 255).finished()).all());

    const ScalarField2D u = image_to_unit(img);
    CHECK(u(0, 3) == 1.0);
    CHECK(u(0, 1) == doctest::Approx(127.0 / 255.0));
    CHECK((unit_to_image(u) == img).all());

    ScalarField2D wild(1, 3);
    wild << -1.0, 2.0, std::numeric_limits<double>::quiet_NaN();
    const Image8 clamped = unit_to_image(wild);
    CHECK(clamped(0, 0) == 0);
    CHECK(clamped(0, 1) == 255);
    CHECK(clamped(0, 2) == 0);
}

TEST_CASE("format_number round-trips") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(-3.0) == "-3");
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 123456.789}) CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("RunReport prints key=value lines in order") {
    RunReport r("loss");
    r.param("alpha", 0.35).result("loss", 1.5).result("status", "ok").timing("total", 2.0);
    std::ostringstream os;
    r.print(os);
    CHECK(os.str() == "command=loss\nparam.alpha=0.35\nloss=1.5\nstatus=ok\ntime_ms.total=2\n");
}

TEST_CASE("write_file_atomic") {
    TempDir dir;
    write_file_atomic(dir / "t.csv", "a,b\n1,2\n");
    std::ifstream in(dir / "t.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "a,b\n1,2\n");
    CHECK_THROWS_AS(write_file_atomic(dir / "no" / "such" / "dir.csv", "x"), IoError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "exfseg/io.hpp"
#include "exfseg/rng.hpp"

using namespace exfseg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("exfseg_io_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("text grid round-trips at full precision") {
    TempDir tmp;
    Rng rng(1);
    ScalarField field(23, 17);
    for (double& v : field.data) v = (rng.uniform01() - 0.3) * 1e3;
    field.at(0, 0) = 1.0 / 3.0;
    field.at(1, 0) = 1e-300;
    write_text_grid(tmp.file("f.txt"), field);
    ScalarField back = read_field(tmp.file("f.txt"));
    REQUIRE(back.width == field.width);
    REQUIRE(back.height == field.height);
    CHECK(back.data == field.data); // bit-exact through %.17g
}

TEST_CASE("16-bit graymap preserves integer data in range") {
    TempDir tmp;
    ScalarField field(8, 4);
    for (size_t i = 0; i < field.size(); ++i)
        field.data[i] = static_cast<double>(i * 2000); // 0 .. 62000
    write_pgm16(tmp.file("f.pgm"), field);
    ScalarField back = read_field(tmp.file("f.pgm"));
    // min..max spans 0..62000 and the scale maps onto 0..65535;
    // check monotone agreement after unscaling.
    for (size_t i = 0; i < field.size(); ++i) {
        double unscaled = back.data[i] * 62000.0 / 65535.0;
        CHECK(unscaled == doctest::Approx(field.data[i]).epsilon(1e-3));
    }
}

TEST_CASE("mask graymap round-trips") {
    TempDir tmp;
    BoolGrid mask(9, 6);
    for (size_t i = 0; i < mask.size(); ++i) mask.data[i] = (i % 3) == 0;
    write_mask_pgm(tmp.file("m.pgm"), mask);
    BoolGrid back = read_mask(tmp.file("m.pgm"));
    CHECK(back.data == mask.data);
}

TEST_CASE("P2 plain graymap reads") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("p2.pgm"));
        out << "P2\n# comment line\n3 2\n255\n0 10 20\n30 40 50\n";
    }
    ScalarField f = read_field(tmp.file("p2.pgm"));
    REQUIRE(f.width == 3);
    REQUIRE(f.height == 2);
    CHECK(f.at(2, 1) == 50.0);
}

TEST_CASE("ill-formed inputs throw") {
    TempDir tmp;
    CHECK_THROWS(read_field(tmp.file("missing.txt")));
    {
        std::ofstream out(tmp.file("ragged.txt"));
        out << "1 2 3\n4 5\n";
    }
    CHECK_THROWS(read_field(tmp.file("ragged.txt")));
    {
        std::ofstream out(tmp.file("junk.txt"));
        out << "1 2 xyz\n";
    }
    CHECK_THROWS(read_field(tmp.file("junk.txt")));
    {
        std::ofstream out(tmp.file("trunc.pgm"), std::ios::binary);
        out << "P5\n4 4\n255\nab"; // declares 16 bytes, provides 2
    }
    CHECK_THROWS(read_field(tmp.file("trunc.pgm")));
}

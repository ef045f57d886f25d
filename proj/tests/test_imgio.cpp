#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "lungpipe/imgio.hpp"
#include "lungpipe/rng.hpp"

using namespace lungpipe;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("imgio_tmp_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("ascii P2 decodes exactly") {
    TempFile f("p2.pgm");
    write_bytes(f.path, "P2\n2 2\n3\n0 1 2 3\n");
    const GrayImage img = load_image(f.path);
    CHECK(img.width == 2);
    CHECK(img.height == 2);
    CHECK(img.pixels == std::vector<std::uint16_t>{0, 1, 2, 3});
}

TEST_CASE("8-bit P5 values are preserved without rescale") {
    TempFile f("p5_8bit.pgm");
    write_bytes(f.path, std::string("P5\n3 1\n255\n") + '\x00' + '\x80' + '\xFF');
    const GrayImage img = load_image(f.path);
    CHECK(img.pixels == std::vector<std::uint16_t>{0, 128, 255});
}

TEST_CASE("header comments are skipped") {
    TempFile f("comment.pgm");
    write_bytes(f.path, "P2\n# a comment line\n2 1\n# another\n65535\n7 65535\n");
    const GrayImage img = load_image(f.path);
    CHECK(img.pixels == std::vector<std::uint16_t>{7, 65535});
}

TEST_CASE("save/load round-trips random images bit-exactly") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 1 + static_cast<int>(rng.uniform_int(12));
        const int h = 1 + static_cast<int>(rng.uniform_int(12));
        GrayImage img(w, h);
        for (auto& px : img.pixels)
            px = static_cast<std::uint16_t>(rng.uniform_int(65536));
        TempFile f("roundtrip.pgm");
        save_image(img, f.path);
        CHECK(load_image(f.path) == img);
    }
}

TEST_CASE("payload bytes that look like whitespace survive the round trip") {
    GrayImage img(3, 1);
    img.pixels = {0x0A0A, 0x2020, 0x0D09};
    TempFile f("wspayload.pgm");
    save_image(img, f.path);
    CHECK(load_image(f.path) == img);
}

TEST_CASE("malformed inputs are rejected") {
    TempFile f("bad.pgm");

    write_bytes(f.path, "P6\n2 2\n255\n");
    CHECK_THROWS_AS(load_image(f.path), format_error);

    write_bytes(f.path, "P2\n2 x\n255\n0 0 0 0\n");
    CHECK_THROWS_AS(load_image(f.path), format_error);

    write_bytes(f.path, "P2\n2 2\n0\n0 0 0 0\n");
    CHECK_THROWS_AS(load_image(f.path), format_error);

    write_bytes(f.path, "P2\n2 2\n70000\n0 0 0 0\n");
    CHECK_THROWS_AS(load_image(f.path), format_error);

    write_bytes(f.path, "P2\n2 2\n255\n0 0 300 0\n");
    CHECK_THROWS_AS(load_image(f.path), format_error);

    write_bytes(f.path, std::string("P5\n2 2\n65535\n") + "\x00\x01\x02"); // 3 of 8 bytes
    CHECK_THROWS_AS(load_image(f.path), io_error);

    CHECK_THROWS_AS(load_image("imgio_tmp_does_not_exist.pgm"), io_error);
}

TEST_CASE("mask save/load maps through 0/65535") {
    BinaryMask mask(4, 3);
    mask.set(0, 0, true);
    mask.set(2, 3, true);
    mask.set(1, 2, true);
    TempFile f("mask.pgm");
    save_mask(mask, f.path);
    const GrayImage raw = load_image(f.path);
    CHECK(raw.at(0, 0) == 65535);
    CHECK(raw.at(0, 1) == 0);
    CHECK(load_mask(f.path) == mask);
}

TEST_CASE("dice coefficient") {
    BinaryMask a(4, 4), b(4, 4);
    CHECK(dice_coefficient(a, b) == 1.0); // both empty

    a.set(1, 1, true);
    a.set(1, 2, true);
    b.set(1, 2, true);
    b.set(2, 2, true);
    CHECK(dice_coefficient(a, b) == doctest::Approx(2.0 * 1 / 4));

    CHECK(dice_coefficient(a, a) == 1.0);

    BinaryMask c(3, 4);
    CHECK_THROWS_AS(dice_coefficient(a, c), argument_error);
}

TEST_CASE("manifest round-trips and validates") {
    DatasetManifest m;
    m.entries.push_back({"img_a.pgm", 1, Split::train});
    m.entries.push_back({"img_b.pgm", 0, Split::test});
    m.entries.push_back({"img_c.pgm", 0, Split::train});

    TempFile f("manifest.csv");
    save_manifest(m, f.path);
    const DatasetManifest back = load_manifest(f.path);
    REQUIRE(back.entries.size() == 3);
    CHECK(back.entries[1].path == "img_b.pgm");
    CHECK(back.entries[1].label == 0);
    CHECK(back.entries[1].split == Split::test);
    CHECK(back.count(Split::train) == 2);
    CHECK(back.count(Split::test) == 1);

    write_bytes(f.path, "path,label\nx,1\n");
    CHECK_THROWS_AS(load_manifest(f.path), format_error);

    write_bytes(f.path, "path,label,split\nx,2,train\n");
    CHECK_THROWS_AS(load_manifest(f.path), format_error);

    write_bytes(f.path, "path,label,split\nx,1,validation\n");
    CHECK_THROWS_AS(load_manifest(f.path), format_error);

    write_bytes(f.path, "path,label,split\nx,1,train\nx,0,test\n");
    CHECK_THROWS_AS(load_manifest(f.path), format_error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dynct/io.hpp"
#include "dynct/noise.hpp"
#include "oracles.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace dynct;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("dynct_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("sigma zero leaves data untouched") {
    const ImageGrid img = oracles::random_image(8, 3);
    const ImageGrid same = add_gaussian_noise(img, 0.0, 42);
    for (size_t p = 0; p < img.size(); ++p) CHECK(same.values()[p] == img.values()[p]);
}

TEST_CASE("the same seed reproduces the same noise") {
    const ImageGrid img = oracles::random_image(16, 4);
    const ImageGrid a = add_gaussian_noise(img, 2.0, 1234);
    const ImageGrid b = add_gaussian_noise(img, 2.0, 1234);
    for (size_t p = 0; p < img.size(); ++p) CHECK(a.values()[p] == b.values()[p]);
    const ImageGrid c = add_gaussian_noise(img, 2.0, 1235);
    size_t differs = 0;
    for (size_t p = 0; p < img.size(); ++p)
        if (a.values()[p] != c.values()[p]) ++differs;
    CHECK(differs > img.size() / 2);
}

TEST_CASE("sampler statistics at sigma = 2") {
    GaussianSampler g(987654321);
    const size_t count = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (size_t k = 0; k < count; ++k) {
        const double v = 2.0 * g.next();
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / count;
    const double std = std::sqrt(sum2 / count - mean * mean);
    CHECK(std::abs(mean) < 0.01);
    CHECK(std >= 1.99);
    CHECK(std <= 2.01);
}

TEST_CASE("gr64 round trip is bit exact") {
    TempDir tmp;
    const ImageGrid img = oracles::random_image(16, 5, -1e6, 1e6);
    save_image_gr64(tmp.file("img.gr64"), img);
    const ImageGrid back = load_image_gr64(tmp.file("img.gr64"));
    REQUIRE(back.n() == img.n());
    for (size_t p = 0; p < img.size(); ++p) CHECK(back.values()[p] == img.values()[p]);
}

TEST_CASE("gr64 header layout is 16 bytes with little-endian fields") {
    TempDir tmp;
    ImageGrid img(2);
    img(0, 0) = 1.0;
    save_image_gr64(tmp.file("h.gr64"), img);
    std::ifstream in(tmp.file("h.gr64"), std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(data.size() == 16 + 4 * 8);
    CHECK(data.substr(0, 4) == "GR64");
    CHECK(static_cast<unsigned char>(data[4]) == 2); // rows LE
    CHECK(static_cast<unsigned char>(data[5]) == 0);
    CHECK(static_cast<unsigned char>(data[8]) == 2); // cols LE
    CHECK(data.substr(12, 4) == std::string(4, '\0')); // reserved
}

TEST_CASE("truncated and corrupted gr64 files raise parse errors") {
    TempDir tmp;
    const ImageGrid img = oracles::random_image(8, 6);
    save_image_gr64(tmp.file("img.gr64"), img);

    std::ifstream in(tmp.file("img.gr64"), std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    {
        std::ofstream out(tmp.file("trunc.gr64"), std::ios::binary);
        out << data.substr(0, data.size() / 2);
    }
    CHECK_THROWS_AS(load_image_gr64(tmp.file("trunc.gr64")), ParseError);

    data[0] = 'X';
    {
        std::ofstream out(tmp.file("magic.gr64"), std::ios::binary);
        out << data;
    }
    try {
        load_image_gr64(tmp.file("magic.gr64"));
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.byte_offset == 0);
    }
}

TEST_CASE("flow fields round trip through the gr64 pair") {
    TempDir tmp;
    FlowField flow(8);
    for (size_t p = 0; p < flow.vx.size(); ++p) {
        flow.vx.values()[p] = std::sin(0.2 * static_cast<double>(p));
        flow.vy.values()[p] = std::cos(0.2 * static_cast<double>(p));
    }
    save_flow_gr64(tmp.file("flow"), flow);
    CHECK(std::filesystem::exists(tmp.file("flow.vx.gr64")));
    CHECK(std::filesystem::exists(tmp.file("flow.vy.gr64")));
    const FlowField back = load_flow_gr64(tmp.file("flow"));
    for (size_t p = 0; p < flow.vx.size(); ++p) {
        CHECK(back.vx.values()[p] == flow.vx.values()[p]);
        CHECK(back.vy.values()[p] == flow.vy.values()[p]);
    }
}

TEST_CASE("sinograms round trip with their metadata sidecar") {
    TempDir tmp;
    ScanProtocol p;
    p.m = 4;
    p.angles_per_scan = 6;
    p.n_det = 13;
    p.border = 5;
    p.dt = 2.0;
    Sinogram sino(p, 2);
    for (size_t k = 0; k < sino.values.size(); ++k) sino.values[k] = 0.5 * static_cast<double>(k);
    save_sinogram(tmp.file("s.gr64"), sino);
    const Sinogram back = load_sinogram(tmp.file("s.gr64"));
    CHECK(back.scan_index == 2);
    CHECK(back.protocol.m == 4);
    CHECK(back.protocol.n_det == 13);
    CHECK(back.protocol.dt == 2.0);
    for (size_t k = 0; k < sino.values.size(); ++k) CHECK(back.values[k] == sino.values[k]);
}

TEST_CASE("pgm export maps the range linearly and constants to zero") {
    TempDir tmp;
    ImageGrid img(2);
    img(0, 0) = -1.0;
    img(0, 1) = 0.0;
    img(1, 0) = 1.0;
    img(1, 1) = 3.0;
    save_pgm(tmp.file("img.pgm"), img);
    std::ifstream in(tmp.file("img.pgm"), std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(data.substr(0, 3) == "P5\n");
    const std::string pixels = data.substr(data.size() - 4);
    CHECK(static_cast<unsigned char>(pixels[0]) == 0);
    CHECK(static_cast<unsigned char>(pixels[1]) == 64);
    CHECK(static_cast<unsigned char>(pixels[2]) == 128);
    CHECK(static_cast<unsigned char>(pixels[3]) == 255);

    ImageGrid flat(2, 7.0);
    save_pgm(tmp.file("flat.pgm"), flat);
    std::ifstream in2(tmp.file("flat.pgm"), std::ios::binary);
    std::string data2((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
    const std::string pix2 = data2.substr(data2.size() - 4);
    for (char c : pix2) CHECK(static_cast<unsigned char>(c) == 0);
}

TEST_CASE("key=value files round trip and reject malformed lines") {
    TempDir tmp;
    write_kv_file(tmp.file("a.cfg"), {{"n", "256"}, {"motion", "shift"}});
    const auto kv = read_kv_file(tmp.file("a.cfg"));
    CHECK(kv.at("n") == "256");
    CHECK(kv.at("motion") == "shift");
    {
        std::ofstream out(tmp.file("bad.cfg"));
        out << "n=4\nnot a pair\n";
    }
    CHECK_THROWS_AS(read_kv_file(tmp.file("bad.cfg")), ParseError);
}

TEST_CASE("fnv1a64 hashes are stable") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("x.txt"), std::ios::binary);
        out << "abc";
    }
    // reference value of FNV-1a 64 for "abc"
    CHECK(fnv1a64_file(tmp.file("x.txt")) == 0xe71fa2190541574bull);
}

TEST_CASE("format_sig6 prints six significant digits") {
    CHECK(format_sig6(1.234567891) == "1.23457");
    CHECK(format_sig6(0.0) == "0");
    CHECK(format_sig6(2.0) == "2");
}

#include "dynct/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

namespace dynct {

namespace {

void put_u32le(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t get_u32le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void put_f64le(std::string& out, double v) {
    const uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

double get_f64le(const unsigned char* p) {
    uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<uint64_t>(p[k]) << (8 * k);
    return std::bit_cast<double>(bits);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace

void save_gr64(const std::string& path, const std::vector<double>& values, uint32_t rows,
               uint32_t cols) {
    if (values.size() != static_cast<size_t>(rows) * cols)
        throw std::invalid_argument("save_gr64: value count does not match rows*cols");
    std::string data;
    data.reserve(16 + values.size() * 8);
    data += "GR64";
    put_u32le(data, rows);
    put_u32le(data, cols);
    put_u32le(data, 0);
    for (double v : values) put_f64le(data, v);
    write_file(path, data);
}

std::vector<double> load_gr64(const std::string& path, uint32_t& rows, uint32_t& cols) {
    const std::string data = read_file(path);
    if (data.size() < 16) throw ParseError("'" + path + "': truncated GR64 header", data.size());
    if (std::memcmp(data.data(), "GR64", 4) != 0)
        throw ParseError("'" + path + "': bad GR64 magic", 0);
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    rows = get_u32le(p + 4);
    cols = get_u32le(p + 8);
    const uint32_t reserved = get_u32le(p + 12);
    if (reserved != 0) throw ParseError("'" + path + "': reserved field not zero", 12);
    const size_t expect = 16 + static_cast<size_t>(rows) * cols * 8;
    if (data.size() != expect)
        throw ParseError("'" + path + "': payload size mismatch, expected " +
                             std::to_string(expect) + " bytes",
                         std::min(data.size(), expect));
    std::vector<double> values(static_cast<size_t>(rows) * cols);
    for (size_t k = 0; k < values.size(); ++k) values[k] = get_f64le(p + 16 + 8 * k);
    return values;
}

void save_image_gr64(const std::string& path, const ImageGrid& img) {
    save_gr64(path, img.values(), static_cast<uint32_t>(img.n()), static_cast<uint32_t>(img.n()));
}

ImageGrid load_image_gr64(const std::string& path) {
    uint32_t rows = 0, cols = 0;
    std::vector<double> values = load_gr64(path, rows, cols);
    if (rows != cols || rows < 2)
        throw ParseError("'" + path + "': expected a square raster with n >= 2", 4);
    ImageGrid img(static_cast<int>(rows));
    img.values() = std::move(values);
    return img;
}

void save_flow_gr64(const std::string& prefix, const FlowField& flow) {
    save_image_gr64(prefix + ".vx.gr64", flow.vx);
    save_image_gr64(prefix + ".vy.gr64", flow.vy);
}

FlowField load_flow_gr64(const std::string& prefix) {
    return FlowField(load_image_gr64(prefix + ".vx.gr64"), load_image_gr64(prefix + ".vy.gr64"));
}

void save_sinogram(const std::string& path, const Sinogram& sino) {
    save_gr64(path, sino.values, static_cast<uint32_t>(sino.protocol.angles_per_scan),
              static_cast<uint32_t>(sino.protocol.n_det));
    write_kv_file(path + ".meta",
                  {{"m", std::to_string(sino.protocol.m)},
                   {"angles_per_scan", std::to_string(sino.protocol.angles_per_scan)},
                   {"dt", format_sig6(sino.protocol.dt)},
                   {"n_det", std::to_string(sino.protocol.n_det)},
                   {"det_spacing", format_sig6(sino.protocol.det_spacing)},
                   {"border", std::to_string(sino.protocol.border)},
                   {"scan_index", std::to_string(sino.scan_index)}});
}

Sinogram load_sinogram(const std::string& path) {
    uint32_t rows = 0, cols = 0;
    std::vector<double> values = load_gr64(path, rows, cols);
    const auto kv = read_kv_file(path + ".meta");
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error("'" + path + ".meta': missing key '" + key + "'");
        return it->second;
    };
    ScanProtocol p;
    p.m = std::stoi(need("m"));
    p.angles_per_scan = std::stoi(need("angles_per_scan"));
    p.dt = std::stod(need("dt"));
    p.n_det = std::stoi(need("n_det"));
    p.det_spacing = std::stod(need("det_spacing"));
    p.border = std::stoi(need("border"));
    Sinogram sino(p, std::stoi(need("scan_index")));
    if (rows != static_cast<uint32_t>(p.angles_per_scan) || cols != static_cast<uint32_t>(p.n_det))
        throw std::runtime_error("'" + path + "': raster shape does not match metadata");
    sino.values = std::move(values);
    return sino;
}

void save_pgm(const std::string& path, const ImageGrid& img) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : img.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;
    std::string data = "P5\n" + std::to_string(img.n()) + " " + std::to_string(img.n()) + "\n255\n";
    data.reserve(data.size() + img.size());
    for (double v : img.values()) {
        int g = span > 0.0 ? static_cast<int>(std::lround((v - lo) / span * 255.0)) : 0;
        g = std::clamp(g, 0, 255);
        data.push_back(static_cast<char>(g));
    }
    write_file(path, data);
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    const std::string data = read_file(path);
    std::map<std::string, std::string> out;
    size_t pos = 0;
    while (pos < data.size()) {
        size_t eol = data.find('\n', pos);
        if (eol == std::string::npos) eol = data.size();
        const std::string line = data.substr(pos, eol - pos);
        if (!line.empty() && line[0] != '#') {
            const size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ParseError("'" + path + "': expected key=value", pos);
            out[line.substr(0, eq)] = line.substr(eq + 1);
        }
        pos = eol + 1;
    }
    return out;
}

void write_kv_file(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
    std::string data;
    for (const auto& [k, v] : entries) data += k + "=" + v + "\n";
    write_file(path, data);
}

uint64_t fnv1a64_file(const std::string& path) {
    const std::string data = read_file(path);
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string format_sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace dynct

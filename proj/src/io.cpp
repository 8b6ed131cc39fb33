#include "exfseg/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace exfseg {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

int next_pnm_int(std::istream& in) {
    // Skips whitespace and '#' comment lines.
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int v;
    if (!(in >> v)) throw std::runtime_error("malformed PNM header");
    return v;
}

} // namespace

void write_pgm16(const std::string& path, const ScalarField& field) {
    double lo = *std::min_element(field.data.begin(), field.data.end());
    double hi = *std::max_element(field.data.begin(), field.data.end());
    double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P5\n" << field.width << " " << field.height << "\n65535\n";
    for (double v : field.data) {
        unsigned u = static_cast<unsigned>(std::lround((v - lo) * scale));
        out.put(static_cast<char>((u >> 8) & 0xFF));
        out.put(static_cast<char>(u & 0xFF));
    }
    if (!out) fail(path, "write error");
}

void write_mask_pgm(const std::string& path, const BoolGrid& mask) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    for (uint8_t v : mask.data) out.put(v ? static_cast<char>(255) : 0);
    if (!out) fail(path, "write error");
}

void write_text_grid(const std::string& path, const ScalarField& field) {
    std::ofstream out(path);
    if (!out) fail(path, "cannot open for writing");
    char buf[64];
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            std::snprintf(buf, sizeof(buf), "%.17g", field.at(x, y));
            out << buf << (x + 1 == field.width ? '\n' : ' ');
        }
    }
    if (!out) fail(path, "write error");
}

ScalarField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    char m0 = 0, m1 = 0;
    in.get(m0).get(m1);
    if (m0 == 'P' && (m1 == '5' || m1 == '2')) {
        int w = next_pnm_int(in);
        int h = next_pnm_int(in);
        int maxval = next_pnm_int(in);
        if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
            fail(path, "bad PNM header");
        ScalarField field(w, h);
        if (m1 == '2') {
            for (double& v : field.data) {
                int px = next_pnm_int(in);
                v = px;
            }
        } else {
            in.get(); // the single whitespace byte after maxval
            if (maxval < 256) {
                std::vector<unsigned char> row(field.size());
                in.read(reinterpret_cast<char*>(row.data()), row.size());
                if (!in) fail(path, "truncated P5 data");
                for (size_t i = 0; i < row.size(); ++i) field.data[i] = row[i];
            } else {
                std::vector<unsigned char> row(field.size() * 2);
                in.read(reinterpret_cast<char*>(row.data()), row.size());
                if (!in) fail(path, "truncated P5 data");
                for (size_t i = 0; i < field.size(); ++i)
                    field.data[i] = row[2 * i] * 256 + row[2 * i + 1];
            }
        }
        return field;
    }

    // Text grid: rows of space-separated reals.
    in.clear();
    in.seekg(0);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!ls.eof()) fail(path, "non-numeric token in text grid");
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(path, "empty text grid");
    size_t w = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != w) fail(path, "ragged text grid");
    ScalarField field(static_cast<int>(w), static_cast<int>(rows.size()));
    for (size_t y = 0; y < rows.size(); ++y)
        for (size_t x = 0; x < w; ++x)
            field.at(static_cast<int>(x), static_cast<int>(y)) = rows[y][x];
    return field;
}

BoolGrid read_mask(const std::string& path) {
    ScalarField f = read_field(path);
    BoolGrid mask(f.width, f.height);
    for (size_t i = 0; i < f.size(); ++i) mask.data[i] = f.data[i] != 0.0;
    return mask;
}

} // namespace exfseg

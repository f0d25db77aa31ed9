#include "delaygrad/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "delaygrad/errors.hpp"

namespace delaygrad {

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

CsvCell::CsvCell(double v) : text(fmt_g17(v)) {}
CsvCell::CsvCell(int v) : text(std::to_string(v)) {}
CsvCell::CsvCell(long long v) : text(std::to_string(v)) {}
CsvCell::CsvCell(const char* v) : text(v) {}
CsvCell::CsvCell(std::string v) : text(std::move(v)) {}

std::string csv_line(const std::vector<CsvCell>& cells) {
    std::string line;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) line += ',';
        line += cells[i].text;
    }
    line += '\n';
    return line;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw Error("short write to " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace delaygrad

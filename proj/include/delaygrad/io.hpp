#pragma once

#include <string>
#include <vector>

namespace delaygrad {

// Shortest text that still round-trips a double exactly is not what we want
// here: output files are diffed byte-for-byte across runs, so every number is
// printed with a fixed 17 significant digits ("%.17g", C locale).
std::string fmt_g17(double x);

// One CSV cell: numbers via fmt_g17, strings passed through.
struct CsvCell {
    std::string text;
    CsvCell(double v);          // NOLINT(google-explicit-constructor)
    CsvCell(int v);             // NOLINT(google-explicit-constructor)
    CsvCell(long long v);       // NOLINT(google-explicit-constructor)
    CsvCell(const char* v);     // NOLINT(google-explicit-constructor)
    CsvCell(std::string v);     // NOLINT(google-explicit-constructor)
};

std::string csv_line(const std::vector<CsvCell>& cells);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// FNV-1a over the given text; stable content fingerprint for metadata.
std::string content_hash(const std::string& text);

}  // namespace delaygrad

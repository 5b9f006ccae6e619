#include "chaoskit/csv.hpp"

#include <cstdio>
#include <sstream>

namespace chaoskit {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header)
    : out_(path), path_(path) {
    if (!out_) throw std::runtime_error("cannot open output file '" + path + "'");
    write_line(header);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::write_line(const std::string& line) {
    out_ << line << "\n";
    if (!out_) throw std::runtime_error("write failed on '" + path_ + "'");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
    f << content;
    if (!f) throw std::runtime_error("write failed on '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace chaoskit

#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

namespace chaoskit {

/// Shortest round-trippable decimal form, identical across runs.
std::string format_double(double v);

/// Line-buffered CSV writer with a fixed header.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header);
    ~CsvWriter();

    template <typename... Args>
    void row(const Args&... args) {
        std::string line;
        bool first = true;
        auto append = [&](const auto& v) {
            if (!first) line += ',';
            first = false;
            line += field(v);
        };
        (append(args), ...);
        write_line(line);
    }

private:
    static std::string field(double v) { return format_double(v); }
    static std::string field(const std::string& s) { return s; }
    static std::string field(const char* s) { return s; }
    static std::string field(bool v) { return v ? "1" : "0"; }
    template <typename T>
    static std::string field(T v) requires std::is_integral_v<T> {
        return std::to_string(v);
    }

    void write_line(const std::string& line);
    std::ofstream out_;
    std::string path_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace chaoskit

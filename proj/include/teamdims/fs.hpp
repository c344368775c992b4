#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "teamdims/error.hpp"

namespace teamdims {

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write file: " + path.string());
    out << content;
    if (!out.flush()) throw io_error("write failed: " + path.string());
}

} // namespace teamdims

#ifndef CSTARS_IO_HPP
#define CSTARS_IO_HPP

#include <stdexcept>
#include <string>

namespace cstars::io {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Writes content to path, creating parent directories as needed. */
void write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

bool file_exists(const std::string& path);

}  // namespace cstars::io

#endif

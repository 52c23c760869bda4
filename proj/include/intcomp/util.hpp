#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace intcomp {

// Exit-code convention shared by the library errors and the CLI:
// 1 validation/verification failure, 2 bad input, 3 resource limit.
enum class ErrorKind : int { verification = 1, bad_input = 2, resource = 3 };

struct Error : std::runtime_error {
    std::string code;
    ErrorKind kind;
    std::map<std::string, std::string> context;

    Error(std::string code_, ErrorKind kind_, const std::string& message,
          std::map<std::string, std::string> context_ = {})
        : std::runtime_error(message),
          code(std::move(code_)),
          kind(kind_),
          context(std::move(context_)) {}
};

inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("file-not-found", ErrorKind::bad_input, "cannot open " + path,
                    {{"path", path}});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace intcomp

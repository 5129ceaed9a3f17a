#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vbpbb::cli {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/**
 * Entry point shared by the executable and the tests. `args` excludes the
 * program name. Returns 0 on success, 1 on data errors, 2 on usage errors.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lower-case hex SHA-256 of a file's bytes.
[[nodiscard]] std::string file_sha256(const std::string& path);

}  // namespace vbpbb::cli

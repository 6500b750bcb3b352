#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace parlab {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  bool dump_kernels = false;
  std::optional<std::uint64_t> seed_override;
};

/// Executes the configured check suite. Exit status: 0 when every check
/// passed, 2 when some check failed, 1 on configuration or runtime errors.
int run_suite(const RunOptions& opts);

/// One line per known check id: id, default tolerance, anchor. Alphabetical.
std::string list_checks_text();

}  // namespace parlab

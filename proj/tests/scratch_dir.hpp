#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

// Fresh directory under the system temp dir, removed on destruction.
struct ScratchDir {
  std::filesystem::path path;

  explicit ScratchDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("lpq_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
};

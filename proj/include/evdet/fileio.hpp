#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace evdet {

/// Whole-file read. Throws Io.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary and renames it into place, so a failed
/// write never leaves a truncated file at `path`. Throws Io.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// A sibling scratch directory that replaces `target` on commit() and is
/// removed on destruction otherwise. `target` must be absent or empty.
class StagedDirectory {
public:
    explicit StagedDirectory(std::filesystem::path target);
    ~StagedDirectory();

    StagedDirectory(const StagedDirectory&) = delete;
    StagedDirectory& operator=(const StagedDirectory&) = delete;

    const std::filesystem::path& path() const { return staging_; }
    void commit();

private:
    std::filesystem::path target_;
    std::filesystem::path staging_;
    bool committed_ = false;
};

}  // namespace evdet

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cascade_branch::cli {

/// Collects output files in a hidden sibling directory and moves them into
/// place only on commit(); an uncommitted stage is deleted on destruction.
class OutputStage {
public:
    explicit OutputStage(std::filesystem::path target_dir);
    ~OutputStage();

    OutputStage(const OutputStage&) = delete;
    OutputStage& operator=(const OutputStage&) = delete;

    /// Writes `content` to the staged file `name`.
    void write(const std::string& name, const std::string& content);
    const std::vector<std::string>& files() const noexcept { return files_; }
    std::filesystem::path staged_path(const std::string& name) const { return stage_ / name; }

    void commit();

private:
    std::filesystem::path target_;
    std::filesystem::path stage_;
    std::vector<std::string> files_;
    bool committed_ = false;
};

/// Stages a single file next to `target` and renames it over the target.
void write_file_atomically(const std::filesystem::path& target, const std::string& content);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

} // namespace cascade_branch::cli

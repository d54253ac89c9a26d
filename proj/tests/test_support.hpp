#pragma once

#include "cascade_branch/events.hpp"
#include "cascade_branch/series.hpp"
#include "cascade_branch/temporal.hpp"

#include <filesystem>
#include <string>

#include <unistd.h>

namespace cascade_branch::testing {

inline std::string fixture(const std::string& name)
{
    return std::string(CASCADE_FIXTURE_DIR) + "/" + name;
}

inline GenerationSeries v1_series() { return read_series_file(fixture("v1_table1.csv")); }
inline GenerationSeries v2_series() { return read_series_file(fixture("v2_table1.csv")); }
inline PeriodMatrix v1_matrix() { return read_period_matrix_file(fixture("v1_table2.csv")); }

inline EventLog log_of(const std::string& body)
{
    return parse_events("sender_id,recipient_id,timestamp\n" + body).log;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("cascade_branch_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace cascade_branch::testing

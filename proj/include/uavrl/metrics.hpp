#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavrl {

// Versioned CSV metrics. Every run writes the same nine columns; fields that
// do not apply to a phase stay empty. wall_time_s is the only column that is
// not reproducible, so byte-exact comparisons strip it (strip_wall_time).

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MetricsRecord {
    std::string run_id;
    std::string phase;
    long index = 0;
    double reward = 0.0;
    double mean_aoi = 0.0;
    double mean_power_w = 0.0;
    std::optional<double> meta_loss;
    std::optional<double> epsilon;
    double wall_time_s = 0.0;
};

inline constexpr const char* kMetricsVersionLine = "# uavrl-metrics v1";
inline constexpr const char* kMetricsHeader =
    "run_id,phase,index,reward,mean_aoi,mean_power_w,meta_loss,epsilon,wall_time_s";

// Shortest decimal string that round-trips the value exactly.
std::string format_double(double value);

class MetricsWriter {
public:
    explicit MetricsWriter(const std::filesystem::path& path);

    // Indices must be strictly increasing per (run_id, phase).
    void write(const MetricsRecord& record);

private:
    std::ofstream out_;
    std::map<std::pair<std::string, std::string>, long> last_index_;
};

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

// CSV text with the wall_time_s column removed, for reproducibility checks.
std::string strip_wall_time(const std::string& csv_text);

}  // namespace uavrl

#include "uavrl/metrics.hpp"

#include <charconv>
#include <sstream>
#include <system_error>

namespace uavrl {

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw std::runtime_error("metrics: double formatting failed");
    return std::string(buf, ptr);
}

namespace {

void check_field_text(const std::string& text, const char* what) {
    if (text.find(',') != std::string::npos || text.find('\n') != std::string::npos)
        throw std::invalid_argument(std::string("metrics: ") + what +
                                    " must not contain commas or newlines");
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double_field(const std::string& text, std::size_t row, const char* column) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw SchemaError("metrics: row " + std::to_string(row) + ", column " + column +
                          ": not a number: '" + text + "'");
    return v;
}

long parse_long_field(const std::string& text, std::size_t row, const char* column) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw SchemaError("metrics: row " + std::to_string(row) + ", column " + column +
                          ": not an integer: '" + text + "'");
    return v;
}

}  // namespace

MetricsWriter::MetricsWriter(const std::filesystem::path& path)
    : out_(path, std::ios::trunc) {
    if (!out_) throw std::runtime_error("metrics: cannot open for writing: " + path.string());
    out_ << kMetricsVersionLine << '\n' << kMetricsHeader << '\n';
}

void MetricsWriter::write(const MetricsRecord& r) {
    check_field_text(r.run_id, "run_id");
    check_field_text(r.phase, "phase");
    const auto key = std::make_pair(r.run_id, r.phase);
    if (const auto it = last_index_.find(key); it != last_index_.end() && r.index <= it->second)
        throw std::logic_error("metrics: indices must be strictly increasing within a run");
    last_index_[key] = r.index;

    out_ << r.run_id << ',' << r.phase << ',' << r.index << ',' << format_double(r.reward) << ','
         << format_double(r.mean_aoi) << ',' << format_double(r.mean_power_w) << ','
         << (r.meta_loss ? format_double(*r.meta_loss) : "") << ','
         << (r.epsilon ? format_double(*r.epsilon) : "") << ',' << format_double(r.wall_time_s)
         << '\n';
    out_.flush();
    if (!out_) throw std::runtime_error("metrics: write failed");
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("metrics: cannot open for reading: " + path.string());

    std::string line;
    if (!std::getline(in, line) || line != kMetricsVersionLine)
        throw SchemaError("metrics: unknown metrics version in " + path.string());
    if (!std::getline(in, line) || line != kMetricsHeader)
        throw SchemaError("metrics: unexpected header in " + path.string());

    std::vector<MetricsRecord> records;
    std::size_t row = 2;  // 0-based line number of the first data row
    while (std::getline(in, line)) {
        if (line.empty()) {
            ++row;
            continue;
        }
        const auto fields = split_row(line);
        if (fields.size() != 9)
            throw SchemaError("metrics: row " + std::to_string(row) + ": expected 9 columns, got " +
                              std::to_string(fields.size()));
        MetricsRecord r;
        r.run_id = fields[0];
        r.phase = fields[1];
        r.index = parse_long_field(fields[2], row, "index");
        r.reward = parse_double_field(fields[3], row, "reward");
        r.mean_aoi = parse_double_field(fields[4], row, "mean_aoi");
        r.mean_power_w = parse_double_field(fields[5], row, "mean_power_w");
        if (!fields[6].empty()) r.meta_loss = parse_double_field(fields[6], row, "meta_loss");
        if (!fields[7].empty()) r.epsilon = parse_double_field(fields[7], row, "epsilon");
        r.wall_time_s = parse_double_field(fields[8], row, "wall_time_s");
        records.push_back(std::move(r));
        ++row;
    }
    return records;
}

std::string strip_wall_time(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            const std::size_t pos = line.rfind(',');
            if (pos != std::string::npos) line.erase(pos);
        }
        out << line << '\n';
    }
    return out.str();
}

}  // namespace uavrl

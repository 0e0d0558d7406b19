#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsqa::taxonomy {

struct MetricSpec {
    std::string name;        // unique within a catalog, e.g. "cpu_utilization"
    std::string domain_tag;  // AIOps | weather | finance | traffic | IoT | health
    double range_low = 0.0;  // value_range_hint
    double range_high = 1.0;
    bool nonneg = false;
};

struct CatalogError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Loads a catalog file: one `name,domain_tag,low,high,nonneg` record per
// line, UTF-8, `#` comments and blank lines allowed. Malformed lines raise
// CatalogError naming the line number; duplicate names raise CatalogError.
std::vector<MetricSpec> load_metric_catalog(const std::string& path);

// The shipped default catalog (567 entries). Resolution order for the file:
// $TSQA_DATA_DIR/metrics.csv, then the build-time data directory.
std::vector<MetricSpec> metric_catalog(const std::optional<std::string>& source = std::nullopt);

// Directory holding the shipped data files (metrics.csv, synonyms.csv).
std::string default_data_dir();

} // namespace tsqa::taxonomy

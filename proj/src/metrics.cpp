#include "tsqa/metrics.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#ifndef TSQA_SOURCE_DATA_DIR
#define TSQA_SOURCE_DATA_DIR "data"
#endif

namespace tsqa::taxonomy {

std::string default_data_dir() {
    if (const char* env = std::getenv("TSQA_DATA_DIR"); env && *env) return env;
    return TSQA_SOURCE_DATA_DIR;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    for (auto& f : fields) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.pop_back();
    }
    return fields;
}

} // namespace

std::vector<MetricSpec> load_metric_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CatalogError("cannot open metric catalog: " + path);

    std::vector<MetricSpec> out;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = line;
        while (!stripped.empty() && (stripped.front() == ' ' || stripped.front() == '\t'))
            stripped.erase(stripped.begin());
        if (stripped.empty() || stripped[0] == '#') continue;

        auto fields = split_csv_line(stripped);
        if (fields.size() != 5)
            throw CatalogError(path + ":" + std::to_string(lineno) + ": expected 5 fields, got " +
                               std::to_string(fields.size()));

        MetricSpec m;
        m.name = fields[0];
        m.domain_tag = fields[1];
        try {
            m.range_low = std::stod(fields[2]);
            m.range_high = std::stod(fields[3]);
        } catch (const std::exception&) {
            throw CatalogError(path + ":" + std::to_string(lineno) + ": bad numeric range");
        }
        if (fields[4] == "1" || fields[4] == "true") {
            m.nonneg = true;
        } else if (fields[4] == "0" || fields[4] == "false") {
            m.nonneg = false;
        } else {
            throw CatalogError(path + ":" + std::to_string(lineno) + ": bad nonneg flag '" + fields[4] + "'");
        }
        if (m.name.empty())
            throw CatalogError(path + ":" + std::to_string(lineno) + ": empty metric name");
        if (!(m.range_low < m.range_high))
            throw CatalogError(path + ":" + std::to_string(lineno) + ": require low < high for " + m.name);
        if (!seen.insert(m.name).second)
            throw CatalogError(path + ":" + std::to_string(lineno) + ": duplicate metric name '" + m.name + "'");
        out.push_back(std::move(m));
    }
    if (out.empty()) throw CatalogError(path + ": catalog has no entries");
    return out;
}

std::vector<MetricSpec> metric_catalog(const std::optional<std::string>& source) {
    if (source) return load_metric_catalog(*source);
    return load_metric_catalog(default_data_dir() + "/metrics.csv");
}

} // namespace tsqa::taxonomy

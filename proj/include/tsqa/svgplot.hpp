#pragma once

#include "tsqa/datasets.hpp"

#include <string>

namespace tsqa::plot {

// Static SVG line plot of every series in the record, one polyline each,
// with fluctuation windows shaded from pool truth.
std::string render_record_svg(const datasets::Record& record);

// Writes <out_dir>/<id>.svg plus one `t,value` CSV per series
// (<out_dir>/<id>-<series name>.csv). Returns the SVG path.
std::string write_record_plot(const datasets::Record& record, const std::string& out_dir);

} // namespace tsqa::plot

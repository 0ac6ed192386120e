#pragma once
#include <string>
#include <vector>

namespace tippingscope::cli {

/// One plotted curve (or point cloud when `markers` is set).  Non-finite
/// entries are silently dropped; an empty series contributes only its legend
/// entry.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
};

/// Standalone SVG line chart: frame, ticks, axis labels, legend, and one
/// polyline (stroke class s0, s1, ...) or circle cloud per series.
std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series);

/// Cell-class raster over a rectangular grid.  `cell[iy * nx + ix]` is a
/// small class id (rendered with fill class c0..c7, cycling); `class_labels`
/// maps ids to legend text (ids outside the list get no legend entry).
struct Heatmap {
    std::vector<double> x_edges;  ///< nx+1 ascending cell borders
    std::vector<double> y_edges;  ///< ny+1 ascending cell borders
    std::vector<int> cell;        ///< nx*ny class ids, x fastest
    std::vector<std::string> class_labels;
};

/// Standalone SVG heatmap: one rect per cell (inside <g id="cells">), axes,
/// and a legend of the class labels that actually occur.
std::string heatmap_chart(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const Heatmap& map);

} // namespace tippingscope::cli

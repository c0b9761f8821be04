#include "pimu/svg_timeline.hpp"

#include <algorithm>
#include <fstream>

#include "pimu/error.hpp"

namespace pimu_cli {

void write_timeline_svg(const std::filesystem::path& path,
                        const std::vector<bool>& swimming,
                        const std::vector<pimu::transition_event>& events,
                        std::size_t neighbor_span) {
    const std::size_t n = swimming.size();
    const double cell = n > 600 ? 2.0 : 8.0;
    const double block_h = 40.0;
    const double margin = 24.0;
    const double width = margin * 2 + cell * static_cast<double>(std::max<std::size_t>(n, 1));
    const double height = 120.0;
    const double top = 30.0;

    std::ofstream os(path, std::ios::trunc);
    if (!os) throw pimu::io_error("cannot open SVG file for writing: " + path.string());

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "  <rect width=\"100%\" height=\"100%\" fill=\"#101418\"/>\n";
    os << "  <text x=\"" << margin << "\" y=\"18\" fill=\"#d0d6dc\" font-family=\"monospace\" "
          "font-size=\"12\">prediction timeline (green = swimming, red = not swimming)</text>\n";

    for (std::size_t i = 0; i < n; ++i) {
        const double x = margin + cell * static_cast<double>(i);
        os << "  <rect x=\"" << x << "\" y=\"" << top << "\" width=\"" << cell * 0.92
           << "\" height=\"" << block_h << "\" fill=\""
           << (swimming[i] ? "#2e9e4f" : "#c23b3b") << "\"/>\n";
    }

    for (const pimu::transition_event& e : events) {
        const std::size_t lo = e.at_index >= neighbor_span ? e.at_index - neighbor_span : 0;
        const std::size_t hi = std::min(n == 0 ? 0 : n - 1, e.at_index + neighbor_span);
        const double x = margin + cell * static_cast<double>(lo) - 1.5;
        const double w = cell * static_cast<double>(hi - lo + 1) + 3.0;
        os << "  <rect x=\"" << x << "\" y=\"" << top - 4 << "\" width=\"" << w
           << "\" height=\"" << block_h + 8
           << "\" fill=\"none\" stroke=\"#f5d33a\" stroke-width=\"2\"/>\n";
        os << "  <text x=\"" << margin + cell * static_cast<double>(e.at_index) << "\" y=\""
           << top + block_h + 24 << "\" fill=\"#f5d33a\" font-family=\"monospace\" "
           << "font-size=\"11\">"
           << (e.kind == pimu::transition_kind::swim_to_stop ? "stop@" : "swim@") << e.at_index
           << "</text>\n";
    }

    const std::size_t tick_step = n > 200 ? 50 : 10;
    for (std::size_t i = 0; i < n; i += tick_step) {
        const double x = margin + cell * static_cast<double>(i);
        os << "  <text x=\"" << x << "\" y=\"" << height - 8
           << "\" fill=\"#8a939c\" font-family=\"monospace\" font-size=\"10\">" << i
           << "</text>\n";
    }
    os << "</svg>\n";
    if (!os) throw pimu::io_error("failed writing SVG file: " + path.string());
}

}  // namespace pimu_cli

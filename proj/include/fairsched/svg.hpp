#pragma once

// Standalone SVG figures rendered from the tool's delimited output files.
// Each figure embeds its input rows in a comment so it can be audited.

#include <iosfwd>
#include <string>
#include <vector>

namespace fairsched {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index; throws DataError if absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

Table read_table(std::istream& in);

enum class PlotKind { GroupBars, Tradeoff, PairedHeatmap, ScatterCoords };
PlotKind parse_plot_kind(const std::string& s);

// Report rows (policy, grouping, group, mode, delta, ..., fold_se): EOpp as
// narrow solid bars with error whiskers, DP as wide light bars behind them.
std::string render_group_bars(const Table& report, const std::string& grouping);
// Trade-off rows: points with error bars, dashed sweep curves per policy and
// the frontier as a dashed polyline.
std::string render_tradeoff(const Table& tradeoff);
// Paired rows (earlier, later, value, count) as a 6x6 diverging heat map.
std::string render_paired_heatmap(const Table& paired);
// Canonical dataset rows: latitude/longitude dots coloured by cluster.
std::string render_scatter_coords(const Table& dataset);

std::string render_plot(PlotKind kind, const Table& table, const std::string& grouping = "cluster");

}  // namespace fairsched

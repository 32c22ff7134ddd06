#include <doctest.h>

#include "fairsched/svg.hpp"
#include "fairsched/types.hpp"

#include <algorithm>
#include <sstream>

using namespace fairsched;

namespace {

Table parse(const std::string& text) {
    std::istringstream in(text);
    return read_table(in);
}

const char* kReport =
    "policy,grouping,group,mode,delta,count,fold_mean,fold_se,folds\n"
    "schenk,cluster,Purple,EOpp,-9.5,120,-9.4,0.8,16\n"
    "schenk,cluster,Purple,DP,-12,400,-12.1,0.5,16\n"
    "schenk,cluster,Brown,EOpp,14,10,13,2.5,16\n"
    "default,cluster,Purple,EOpp,0.2,120,0.1,0.3,16\n"
    "default,region,West,EOpp,1,50,1,0.1,16\n";

const char* kTradeoff =
    "policy,knob,grouping,mode,x,x_se,y,y_se,frontier\n"
    "default,,cluster,EOpp,20,1,29,0.2,0\n"
    "schenk,,cluster,EOpp,110,1.3,19,0.3,1\n"
    "zafar,c=0.001,cluster,EOpp,21,1,28,0.3,1\n"
    "zafar,c=0.01,cluster,EOpp,69,2,23,0.4,1\n"
    "broken,,cluster,EOpp,nan,0,nan,0,0\n";

}  // namespace

TEST_CASE("tables skip comment lines") {
    const Table t = parse("# window_start=2014-09-01\na,b\n1,2\n\n3,4\n");
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    CHECK(t.rows.size() == 2);
    CHECK(t.column("b") == 1);
    CHECK_THROWS_AS(t.column("c"), DataError);
}

TEST_CASE("group bars embed the data and draw whiskers") {
    const std::string svg = render_plot(PlotKind::GroupBars, parse(kReport), "cluster");
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("<!-- data\npolicy,grouping,group,mode") != std::string::npos);
    CHECK(svg.find(">Purple</text>") != std::string::npos);
    CHECK(svg.find(">Brown</text>") != std::string::npos);
    CHECK(svg.find(">West</text>") == std::string::npos);
    CHECK(svg.find("<line") != std::string::npos);
    CHECK(svg == render_plot(PlotKind::GroupBars, parse(kReport), "cluster"));
    CHECK_THROWS_AS(render_group_bars(parse(kReport), "demographic"), DataError);
}

TEST_CASE("tradeoff plot draws the frontier as a dashed polyline") {
    const std::string svg = render_tradeoff(parse(kTradeoff));
    const auto at = svg.find("class=\"frontier\"");
    REQUIRE(at != std::string::npos);
    const auto end = svg.find("/>", at);
    const std::string frontier = svg.substr(at, end - at);
    CHECK(frontier.find("stroke-dasharray") != std::string::npos);
    // Three frontier points.
    const auto pts = frontier.substr(frontier.find("points=\""));
    CHECK(std::count(pts.begin(), pts.end(), ',') == 3);
    CHECK(svg.find("class=\"sweep\"") != std::string::npos);
    CHECK(svg.find("nan") == svg.find("nan,0,nan"));  // only inside the embedded data
}

TEST_CASE("paired heat map and coordinate scatter") {
    std::string paired = "earlier,later,value,count\n";
    for (auto e : kAllClusters)
        for (auto l : kAllClusters)
            paired += std::string(cluster_name(e)) + "," + std::string(cluster_name(l)) + "," +
                      (e == l ? std::string("") : std::string("0.1")) + ",3\n";
    const std::string heat = render_plot(PlotKind::PairedHeatmap, parse(paired));
    CHECK(std::count(heat.begin(), heat.end(), '\n') > 36);
    CHECK(heat.find(">n/a</text>") != std::string::npos);

    const std::string scatter =
        render_plot(PlotKind::ScatterCoords,
                    parse("inspection_id,cluster,latitude,longitude\n1,Purple,41.9,-87.6\n2,Brown,41.8,-87.7\n3,Blue,,\n"));
    CHECK(scatter.find("#7b3294") != std::string::npos);
    CHECK_THROWS_AS(render_scatter_coords(parse("inspection_id,cluster,latitude,longitude\n3,Blue,,\n")), DataError);
}

TEST_CASE("plot errors") {
    CHECK_THROWS_AS(parse_plot_kind("pie"), UsageError);
    CHECK(parse_plot_kind("tradeoff") == PlotKind::Tradeoff);
    CHECK_THROWS_AS(render_plot(PlotKind::Tradeoff, parse("policy,knob\n")), DataError);
    CHECK_THROWS_AS(render_plot(PlotKind::Tradeoff, parse("a,b\n1,2\n")), DataError);
}

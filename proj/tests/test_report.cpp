#include <gtest/gtest.h>

#include "test_util.hpp"

namespace ajb {
namespace {

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Csv, FormatRoundTripsDoubles) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) {
    double back = 0.0;
    ASSERT_TRUE(parse_number(fmt_double(v), back));
    EXPECT_EQ(back, v);
  }
}

TEST(Csv, ParsesHeaderAndRows) {
  const CsvTable t = parse_csv("a,b\r\n1,2\n\n3,\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1], (std::vector<std::string>{"3", ""}));
}

TEST(Csv, RecallCsvLayout) {
  RecallCurve c;
  c.values = {0.25, 0.5};
  c.m_recall = 0.375;
  EXPECT_EQ(recall_csv(c), "i,recall\n1,0.25\n2,0.5\nm_recall,0.375\n");
}

TEST(Csv, TraceCsvLayout) {
  TrainReport r;
  TraceRow row;
  row.iteration = 1;
  row.parts = {1.0, 2.0, 0.5};
  row.step = 0.25;
  row.evals = 3;
  r.trace.push_back(row);
  EXPECT_EQ(trace_csv(r), "iteration,total,recon,jacobian,binary,step,evals,fallback\n1,3.5,1,2,0.5,0.25,3,0\n");
}

TEST(Plot, SingleSeriesHasOnePolyline) {
  Series s{"a", {1.0, 2.0}, {0.5, 0.75}};
  const std::string svg = render_svg({s}, PlotOptions{});
  EXPECT_EQ(count_of(svg, "<polyline"), 1u);
  const auto start = svg.find("points=\"", svg.find("<polyline")) + 8;
  const std::string pts = svg.substr(start, svg.find('"', start) - start);
  EXPECT_EQ(count_of(pts, ","), 2u);
  EXPECT_EQ(count_of(pts, " "), 1u);
}

TEST(Plot, DeterministicOutput) {
  Series a{"ajb", {1, 2, 3, 4}, {0.1, 0.3, 0.6, 1.0}};
  Series b{"lsh", {1, 2, 3, 4}, {0.05, 0.2, 0.5, 1.0}};
  PlotOptions opt;
  opt.title = "Recall & <more>";
  const std::string first = render_svg({a, b}, opt);
  EXPECT_EQ(first, render_svg({a, b}, opt));
  EXPECT_EQ(count_of(first, "<polyline"), 2u);
  EXPECT_NE(first.find("Recall &amp; &lt;more&gt;"), std::string::npos);
  EXPECT_NE(first.find(">ajb<"), std::string::npos);
  EXPECT_NE(first.find(">lsh<"), std::string::npos);
}

TEST(Plot, SeriesFromCsvSkipsSummaryRow) {
  const Series s = series_from_csv("i,recall\n1,0.5\n2,1\nm_recall,0.75\n", "x");
  EXPECT_EQ(s.xs, (std::vector<double>{1, 2}));
  EXPECT_EQ(s.ys, (std::vector<double>{0.5, 1}));
}

TEST(Plot, MalformedOrEmptyCsvRejected) {
  EXPECT_THROW(series_from_csv("", "e"), FormatError);
  EXPECT_THROW(series_from_csv("i,recall\n", "e"), FormatError);
  EXPECT_THROW(series_from_csv("i,recall\n1,abc\n", "e"), FormatError);
  EXPECT_THROW(render_svg({}, PlotOptions{}), FormatError);
}

TEST(Plot, LogAxisAcceptsPositiveData) {
  Series s{"a", {1, 10, 100, 1000}, {0.1, 0.2, 0.3, 0.4}};
  PlotOptions opt;
  opt.log_x = true;
  EXPECT_NO_THROW(render_svg({s}, opt));
}

}  // namespace
}  // namespace ajb

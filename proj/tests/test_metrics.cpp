#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "mdg/metrics.hpp"

using namespace mdg;

TEST_CASE("attack success rate is successes over rollouts") {
  CHECK(asr(30, 100) == 0.30);
  CHECK(asr(0, 17) == 0.0);
  CHECK(asr(17, 17) == 1.0);
  CHECK(asr(1, 2) == 0.5);
  CHECK_THROWS_AS((void)asr(1, 0), InvalidCounts);
  CHECK_THROWS_AS((void)asr(-1, 10), InvalidCounts);
  CHECK_THROWS_AS((void)asr(11, 10), InvalidCounts);
}

namespace {

EpisodeRecord record(Outcome o, double ar, double dr) {
  EpisodeRecord r;
  r.outcome = o;
  r.total_ar = ar;
  r.total_dr = dr;
  return r;
}

}  // namespace

TEST_CASE("aggregation averages rollouts and is order-insensitive") {
  std::vector<EpisodeRecord> recs{
      record(Outcome::Success, 12, -12), record(Outcome::Timeout, -5, 0),
      record(Outcome::Captured, -9, 9), record(Outcome::Success, 14, -14)};
  EpisodeStats s = aggregate(recs);
  CHECK(s.asr == 0.5);
  CHECK(s.mean_ar == doctest::Approx(3.0));
  CHECK(s.mean_dr == doctest::Approx(-4.25));

  std::mt19937 g(4);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(recs.begin(), recs.end(), g);
    EpisodeStats p = aggregate(recs);
    CHECK(p.asr == s.asr);
    CHECK(p.mean_ar == doctest::Approx(s.mean_ar));
    CHECK(p.mean_dr == doctest::Approx(s.mean_dr));
  }
  CHECK_THROWS_AS(aggregate({}), InvalidCounts);
}

TEST_CASE("CSV round-trips") {
  std::vector<EpisodeStats> rows{
      {0, "dqn", 7, 0.75, -3.25, 1.5},
      {1, "dqn", 7, 0.5, -2.0, 0.25},
      {0, "rrddpg", 9, 0.3333333, 4.125, -8.0},
  };
  auto path = (std::filesystem::temp_directory_path() / "metrics_rt.csv").string();
  export_csv(rows, path);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "episode,algo,seed,asr,mean_dr,mean_ar");
  std::string first;
  std::getline(in, first);
  CHECK(first == "0,dqn,7,0.750000,-3.250000,1.500000");

  auto back = read_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].episode == rows[i].episode);
    CHECK(back[i].algo == rows[i].algo);
    CHECK(back[i].seed == rows[i].seed);
    CHECK(back[i].asr == doctest::Approx(rows[i].asr).epsilon(1e-6));
    CHECK(back[i].mean_dr == doctest::Approx(rows[i].mean_dr).epsilon(1e-6));
    CHECK(back[i].mean_ar == doctest::Approx(rows[i].mean_ar).epsilon(1e-6));
  }
  std::filesystem::remove(path);
  CHECK_THROWS(read_csv(path));
}

TEST_CASE("curve rendering is deterministic, structured SVG") {
  std::vector<EpisodeStats> rows;
  for (int ep = 0; ep < 10; ++ep) {
    rows.push_back({ep, "dqn", 1, 1.0 - 0.05 * ep, -5.0 + 0.3 * ep, 0.0});
    rows.push_back({ep, "ddpg", 1, 1.0 - 0.07 * ep, -5.0 + 0.4 * ep, 0.0});
    rows.push_back({ep, "rrddpg", 1, 1.0 - 0.09 * ep, -5.0 + 0.5 * ep, 0.0});
  }
  std::string svg = render_curves(rows);
  CHECK(svg == render_curves(rows));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  // Two panels, one polyline per algorithm per panel, and a legend.
  CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
  std::size_t polylines = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++polylines;
    ++pos;
  }
  CHECK(polylines == 6);
  for (const char* algo : {"dqn", "ddpg", "rrddpg"})
    CHECK(svg.find(std::string(">") + algo + "<") != std::string::npos);

  SUBCASE("single-series input still renders") {
    std::vector<EpisodeStats> one{{0, "dqn", 1, 0.5, -1, 0}, {1, "dqn", 1, 0.4, 0, 0}};
    std::string s = render_curves(one);
    CHECK(s.find("dqn") != std::string::npos);
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(render_curves({}), InvalidCounts);
  }
  SUBCASE("seeds of the same algorithm are averaged into one curve") {
    auto two = rows;
    for (int ep = 0; ep < 10; ++ep)
      two.push_back({ep, "dqn", 2, 0.5, -2.0, 0.0});
    std::string s = render_curves(two);
    std::size_t n = 0;
    pos = 0;
    while ((pos = s.find("<polyline", pos)) != std::string::npos) {
      ++n;
      ++pos;
    }
    CHECK(n == 6);
  }
}

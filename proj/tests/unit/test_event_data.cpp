#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "survkit/csv.hpp"
#include "survkit/event_data.hpp"
#include "test_helpers.hpp"

using namespace survkit;
using testkit::rec;

TEST_CASE("validate accepts a single well-formed record") {
  auto validated = validate_records({rec("1", 0, 2, "alive", "dead")});
  CHECK(validated.records().size() == 1);
  CHECK(validated.states() == std::vector<std::string>{"alive", "dead"});
}

TEST_CASE("validate rejects a zero-length interval") {
  CHECK_THROWS_WITH_AS(validate_records({rec("1", 3, 3, "alive", "dead")}),
                       doctest::Contains("exit 3 <= entry 3"), ValidationError);
}

TEST_CASE("validate rejects self transitions") {
  try {
    validate_records({rec("1", 0, 2, "alive", "alive")});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.issues().size() == 1);
    CHECK(e.issues()[0].code == ValidationCode::self_transition);
  }
}

TEST_CASE("validate reports every violation at once") {
  try {
    validate_records({rec("1", 2, 1, "alive", "dead"),
                      rec("2", 0, 2, "alive", "alive"),
                      rec("3", 0, 1, "alive", "ghost")},
                     {"alive", "dead"});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues().size() == 3);
    std::string what = e.what();
    CHECK(what.find("subject 1") != std::string::npos);
    CHECK(what.find("subject 2") != std::string::npos);
    CHECK(what.find("subject 3") != std::string::npos);
  }
}

TEST_CASE("validate rejects overlapping intervals per subject") {
  try {
    validate_records({rec("1", 0, 3, "a", "b"), rec("1", 2, 5, "b", "c")});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.issues().size() == 1);
    CHECK(e.issues()[0].code == ValidationCode::overlapping_intervals);
  }
  // touching intervals are fine
  CHECK_NOTHROW(
      validate_records({rec("1", 0, 3, "a", "b"), rec("1", 3, 5, "b", "c")}));
}

TEST_CASE("validate checks explicit state spaces") {
  try {
    validate_records({rec("1", 0, 2, "alive", "ghost")}, {"alive", "dead"});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues()[0].code == ValidationCode::unknown_state);
  }
}

TEST_CASE("panel on D1 matches the hand enumeration") {
  const auto panel = testkit::panel_of(testkit::d1());
  const auto alive = *panel.state_index("alive");
  const auto dead = *panel.state_index("dead");

  CHECK(panel.times() == std::vector<double>{2, 3, 5});
  CHECK(panel.at_risk(0, alive) == 5);
  CHECK(panel.at_risk(1, alive) == 4);
  CHECK(panel.at_risk(2, alive) == 2);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(panel.increments(t, alive, dead) == 1);
  }
}

TEST_CASE("panel rejects all-censored input") {
  CHECK_THROWS_AS(testkit::panel_of({rec("1", 0, 1, "alive", kCensored)}),
                  Error);
  try {
    testkit::panel_of({rec("1", 0, 1, "alive", kCensored)});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_data);
  }
}

TEST_CASE("panel handles a single event record") {
  const auto panel = testkit::panel_of({rec("1", 0, 1, "alive", "dead")});
  CHECK(panel.times() == std::vector<double>{1});
  CHECK(panel.at_risk(0, *panel.state_index("alive")) == 1);
  CHECK(panel.increments(0, *panel.state_index("alive"),
                         *panel.state_index("dead")) == 1);
}

namespace {

// Brute-force oracle: Y(t,h) = #{records with entry < t <= exit, from = h}.
long at_risk_oracle(const std::vector<EventRecord>& records, double t,
                    const std::string& state) {
  long count = 0;
  for (const auto& r : records) {
    if (r.from == state && r.entry < t && t <= r.exit) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("at-risk counts equal the brute-force scan on random datasets") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto records = testkit::random_survival(seed, 25);
    const auto panel = testkit::panel_of(records);
    for (std::size_t t = 0; t < panel.times().size(); ++t) {
      for (std::size_t h = 0; h < panel.states().size(); ++h) {
        CHECK(panel.at_risk(t, h) ==
              at_risk_oracle(records, panel.times()[t], panel.states()[h]));
      }
    }
  }
}

TEST_CASE("merging record sets merges panels") {
  const auto a = testkit::random_survival(11, 15, 0.5, "A");
  const auto b = testkit::random_survival(12, 10, 0.5, "B");
  std::vector<EventRecord> merged = a;
  merged.insert(merged.end(), b.begin(), b.end());

  const auto pa = testkit::panel_of(a);
  const auto pb = testkit::panel_of(b);
  const auto pm = testkit::panel_of(merged);

  // The merged grid is the union of the two grids.
  std::vector<double> grid_union = pa.times();
  grid_union.insert(grid_union.end(), pb.times().begin(), pb.times().end());
  std::sort(grid_union.begin(), grid_union.end());
  grid_union.erase(std::unique(grid_union.begin(), grid_union.end()),
                   grid_union.end());
  REQUIRE(pm.times() == grid_union);

  const auto alive = *pm.state_index("alive");
  const auto dead = *pm.state_index("dead");
  for (std::size_t t = 0; t < pm.times().size(); ++t) {
    const double time = pm.times()[t];
    long dn = 0, y = 0;
    for (const auto* p : {&pa, &pb}) {
      const auto& ts = p->times();
      const auto it = std::lower_bound(ts.begin(), ts.end(), time);
      if (it != ts.end() && *it == time) {
        const auto idx = static_cast<std::size_t>(it - ts.begin());
        dn += p->increments(idx, *p->state_index("alive"),
                            *p->state_index("dead"));
      }
      y += at_risk_oracle(p == &pa ? a : b, time, "alive");
    }
    CHECK(pm.increments(t, alive, dead) == dn);
    CHECK(pm.at_risk(t, alive) == y);
  }
}

TEST_CASE("a censored record spanning the grid raises every at-risk count") {
  auto records = testkit::d1();
  const auto before = testkit::panel_of(records);
  records.push_back(rec("9", 0, 100, "alive", kCensored));
  const auto after = testkit::panel_of(records);

  const auto alive = *before.state_index("alive");
  REQUIRE(after.times() == before.times());
  for (std::size_t t = 0; t < before.times().size(); ++t) {
    CHECK(after.at_risk(t, alive) == before.at_risk(t, alive) + 1);
    CHECK(after.increments(t, alive, *before.state_index("dead")) ==
          before.increments(t, alive, *before.state_index("dead")));
  }

  // While one censored before every event time changes nothing.
  auto records2 = testkit::d1();
  records2.push_back(rec("9", 0, 0.5, "alive", kCensored));
  const auto after2 = testkit::panel_of(records2);
  for (std::size_t t = 0; t < before.times().size(); ++t) {
    CHECK(after2.at_risk(t, alive) == before.at_risk(t, alive));
  }
}

TEST_CASE("censoring ties keep the subject at risk at the event time") {
  // D1 at t=3: the subject censored at 3 still counts, so Y = 4.
  const auto panel = testkit::panel_of(testkit::d1());
  CHECK(panel.at_risk(1, *panel.state_index("alive")) == 4);
}

TEST_CASE("records CSV round trips") {
  Dataset dataset;
  dataset.records = validate_records(
      {rec("1", 0, 2.5, "alive", "dead", "A", {1.5, -2.0}),
       rec("2", 0.25, 3, "alive", kCensored, "B", {0.0, 0.125})});
  dataset.covariate_names = {"z1", "z2"};

  std::ostringstream out;
  write_records_csv(dataset, out);
  std::istringstream in(out.str());
  const auto reread = read_records_csv(in, "roundtrip");

  REQUIRE(reread.records.records().size() == 2);
  CHECK(reread.covariate_names == dataset.covariate_names);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& a = dataset.records.records()[i];
    const auto& b = reread.records.records()[i];
    CHECK(a.subject == b.subject);
    CHECK(a.entry == b.entry);
    CHECK(a.exit == b.exit);
    CHECK(a.from == b.from);
    CHECK(a.to == b.to);
    CHECK(a.group == b.group);
    CHECK(a.covariates == b.covariates);
  }
}

TEST_CASE("CSV reader rejects malformed input") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_records_csv(in, "test");
  };
  CHECK_THROWS_AS(parse("id,entry,exit,from\n"), Error);          // missing column
  CHECK_THROWS_AS(parse("id,entry,exit,from,to\n1,0,x,a,b\n"), Error);
  CHECK_THROWS_AS(parse("id,entry,exit,from,to,z1\n1,0,1,a,b,\n"), Error);
  CHECK_THROWS_AS(parse("id,entry,exit,from,to\n1,0,1,a\n"), Error);
  CHECK_THROWS_AS(read_records_csv("/nonexistent/file.csv"), Error);
}

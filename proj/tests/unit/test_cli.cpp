#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fracopt/cli.hpp"
#include "fracopt/errors.hpp"
#include "fracopt/io.hpp"
#include "support.hpp"

using namespace fracopt;
using unit::frac;
using unit::Q;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return std::string(FRACOPT_FIXTURE_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "fracopt-unit";
  fs::create_directories(dir);
  return dir / name;
}

std::string write_file(const std::string& name, const std::string& body) {
  fs::path p = scratch(name);
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("two-variable example") {
    Run r = cli({"solve-m2vpi", fixture("two_var.m2vpi"), "--arith", "rational"});
    CHECK(r.code == kExitSolved);
    CHECK(contains(r.out, "FEASIBLE\n"));
    CHECK(contains(r.out, "y -2 -2\n"));
    Run f = cli({"solve-m2vpi", fixture("two_var.m2vpi"), "--arith", "float", "--method", "standard"});
    CHECK(f.code == kExitSolved);
    CHECK(contains(f.out, "y -2 -2\n"));
    Run rec = cli({"solve-m2vpi", fixture("two_var.m2vpi"), "--recover-finite"});
    CHECK(rec.code == kExitSolved);
    CHECK(contains(rec.out, "-2 -2"));
  }

  TEST_CASE("rank-1 matroid table") {
    std::string path = write_file("rank1.sfm", "sfm table 2\n1 1\n0 1 1 1\n");
    Run r = cli({"solve-sfm", path, "--arith", "rational"});
    CHECK(r.code == kExitSolved);
    CHECK(contains(r.out, "delta_star 1/2\n"));
    CHECK(contains(r.out, "witness {0,1}\n"));
  }

  TEST_CASE("empty constraint file") {
    std::string path = write_file("empty.m2vpi", "m2vpi 3 0\n");
    Run r = cli({"solve-m2vpi", path});
    CHECK(r.code == kExitSolved);
    CHECK(contains(r.out, "y inf inf inf\n"));
  }

  TEST_CASE("infeasible instance prints a certificate") {
    Run r = cli({"solve-m2vpi", fixture("negative_unit_cycle.m2vpi")});
    CHECK(r.code == kExitInfeasible);
    CHECK(contains(r.out, "INFEASIBLE\n"));
    CHECK(contains(r.out, "certificate negative_unit_gain_cycle\n"));
  }

  TEST_CASE("other solvers") {
    std::string tv = write_file("a.2vpi", "2vpi 2 2\n1 0 1 1 4\n-1 0 0 0 -1\n");
    Run t = cli({"solve-2vpi", tv});
    CHECK(t.code == kExitSolved);
    CHECK(contains(t.out, "x "));
    std::string bad = write_file("b.2vpi", "2vpi 1 1\n0 0 0 0 -1\n");
    Run b = cli({"solve-2vpi", bad});
    CHECK(b.code == kExitInfeasible);
    CHECK(contains(b.out, "evidence trivial_row"));
    std::string dm = write_file("a.dmdp", "dmdp 1 2\n0 0 9/10 1\n0 0 1/2 2\n");
    Run d = cli({"solve-dmdp", dm});
    CHECK(d.code == kExitSolved);
    CHECK(contains(d.out, "y 4\n"));
    CHECK(contains(d.out, "policy: 1\n"));
    std::string mr = write_file("a.mr", "2\n3 2\n1 2\n10\n01\n");
    Run m = cli({"min-ratio", mr});
    CHECK(m.code == kExitSolved);
    CHECK(contains(m.out, "delta_star 1\n"));
  }

  TEST_CASE("parse errors carry line and column") {
    std::istringstream in("m2vpi 2 1\n# comment\n0 1 x 0\n");
    try {
      read_m2vpi<Q>(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() == 5);
    }
    std::istringstream range("m2vpi 2 1\n0 2 1 0\n");
    CHECK_THROWS_AS(read_m2vpi<Q>(range), ParseError);
    std::istringstream discount("dmdp 1 1\n0 0 2 1\n");
    CHECK_THROWS_AS(read_dmdp<Q>(discount), ParseError);
    std::istringstream dead("dmdp 2 1\n0 1 1/2 1\n");
    CHECK_THROWS_AS(read_dmdp<Q>(dead), ParseError);
    std::string path = write_file("bad.m2vpi", "m2vpi 2 1\n0 1 1\n");
    Run r = cli({"solve-m2vpi", path});
    CHECK(r.code == kExitError);
    CHECK(contains(r.err, "line 2"));
  }

  TEST_CASE("usage errors") {
    CHECK(cli({}).code == kExitError);
    CHECK(cli({"solve-m2vpi"}).code == kExitError);
    CHECK(cli({"solve-m2vpi", fixture("two_var.m2vpi"), "--arith", "double"}).code == kExitError);
    CHECK(cli({"solve-m2vpi", scratch("missing.m2vpi").string()}).code == kExitError);
    CHECK(cli({"gen", "nonsense"}).code == kExitError);
  }

  TEST_CASE("gen is reproducible") {
    for (std::string kind : {"m2vpi", "2vpi", "dmdp", "sfm", "min-ratio"}) {
      Run a = cli({"gen", kind, "--seed", "17"});
      Run b = cli({"gen", kind, "--seed", "17"});
      CHECK(a.code == kExitSolved);
      CHECK(a.out == b.out);
      fs::path p = scratch("gen." + kind);
      CHECK(cli({"gen", kind, "--seed", "17", "--out", p.string()}).code == kExitSolved);
      CHECK(slurp(p) == a.out);
      std::string sub = kind == "min-ratio" ? kind : "solve-" + kind;
      Run s1 = cli({sub, p.string()});
      Run s2 = cli({sub, p.string()});
      CHECK(s1.code != kExitError);
      CHECK(s1.out == s2.out);
    }
    Run seeded = cli({"gen", "m2vpi", "--seed", "3"});
    ::setenv("NEWTON_FRAC_SEED", "3", 1);
    Run env = cli({"gen", "m2vpi", "--seed", "99"});
    ::unsetenv("NEWTON_FRAC_SEED");
    CHECK(env.out == seeded.out);
  }

  TEST_CASE("compare, report and trace outputs") {
    Run c = cli({"compare", "m2vpi", fixture("two_var.m2vpi")});
    REQUIRE(c.code == kExitSolved);
    auto j = nlohmann::json::parse(c.out);
    CHECK(j.contains("standard"));
    CHECK(j.contains("lookahead"));
    CHECK(j["lookahead"]["iterations"].get<int>() <= j["standard"]["iterations"].get<int>());
    fs::path report = scratch("report.json"), trace = scratch("trace.csv");
    Run r = cli({"solve-m2vpi", fixture("two_var.m2vpi"), "--report", report.string(), "--trace", trace.string()});
    REQUIRE(r.code == kExitSolved);
    auto rep = nlohmann::json::parse(slurp(report));
    CHECK(rep["verdict"] == "feasible");
    CHECK(rep["solver"] == "m2vpi");
    std::string csv = slurp(trace);
    CHECK(contains(csv, "delta"));
    CHECK(contains(csv, "# phase"));
  }

  TEST_CASE("writers and readers round trip") {
    Rng rng(71);
    for (int k = 0; k < 40; ++k) {
      auto m = random_m2vpi<Q>(rng);
      std::stringstream s1;
      write_m2vpi(s1, m);
      auto m2 = read_m2vpi<Q>(s1);
      REQUIRE(m2.arc_count() == m.arc_count());
      for (ArcId e = 0; e < m.arc_count(); ++e) {
        CHECK(m2.arc(e).tail == m.arc(e).tail);
        CHECK(m2.arc(e).gamma == m.arc(e).gamma);
        CHECK(m2.arc(e).cost == m.arc(e).cost);
      }
      auto t = random_2vpi<Q>(rng);
      std::stringstream s2;
      write_2vpi(s2, t);
      auto t2 = read_2vpi<Q>(s2);
      CHECK(t2.rows.size() == t.rows.size());
      auto sf = random_sfm<Q>(rng);
      std::stringstream s3;
      write_sfm(s3, sf);
      auto sf2 = read_sfm<Q>(s3);
      REQUIRE(sf2.h->ground_size() == sf.h->ground_size());
      CHECK(sf2.a == sf.a);
      for (SetMask s = 0; s < (SetMask{1} << sf.h->ground_size()); ++s) CHECK(sf2.h->eval(s) == sf.h->eval(s));
      auto mr = random_min_ratio<Q>(rng);
      std::stringstream s4;
      write_min_ratio(s4, mr);
      auto mr2 = read_min_ratio<Q>(s4);
      CHECK(mr2.domain == mr.domain);
      CHECK(mr2.c == mr.c);
    }
  }

  TEST_CASE("string helpers") {
    CHECK(set_string(0b101, 3) == "{0,2}");
    CHECK(set_string(0, 3) == "{}");
    CHECK(point_string(Point{1, 0, 1}) == "101");
    CHECK(walk_string(Walk{2, {4, 5}}) == "start 2 arcs 4 5");
  }
}

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hgcoop/empirical.hpp"
#include "hgcoop/errors.hpp"
#include "hgcoop/harness.hpp"
#include "hgcoop/io.hpp"
#include "json.hpp"

using namespace hgcoop;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("hgcoop_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

SweepSpec small_spec(Experiment ex = Experiment::Threshold) {
  SweepSpec s;
  s.experiment = ex;
  s.n_min = 12;
  s.n_max = 20;
  s.k_grid = parse_grid("3:12");
  s.replicates = 5;
  s.base_seed = 99;
  return s;
}

}  // namespace

TEST_CASE("grid parsing") {
  CHECK(parse_grid("4:8") == std::vector<double>{4, 5, 6, 7, 8});
  CHECK(parse_grid("0:1:0.25") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(parse_grid("4,8,16") == std::vector<double>{4, 8, 16});
  CHECK(parse_grid("4:160").size() == 157);
  CHECK_THROWS_AS(parse_grid(""), InvalidInput);
  CHECK_THROWS_AS(parse_grid("5:4"), InvalidInput);
  CHECK_THROWS_AS(parse_grid("1:2:0"), InvalidInput);
  CHECK_THROWS_AS(parse_grid("a,b"), InvalidInput);
}

TEST_CASE("sweep row accounting") {
  TempDir dir("count");
  auto spec = small_spec();
  REQUIRE(spec.k_grid.size() == 10);
  const auto s = run_sweep(spec, dir / "a");
  CHECK(s.rows == 50);
  CHECK(s.failed == 0);
  const auto rows = lines(read_text_file(dir / "a/results.csv"));
  CHECK(rows.size() == 51);
  CHECK(rows.front() == sweep_header(spec));

  spec.replicates = 10;
  CHECK(run_sweep(spec, dir / "b").rows == 100);
}

TEST_CASE("sweep output does not depend on worker count") {
  TempDir dir("jobs");
  const auto spec = small_spec(Experiment::Intervene);
  run_sweep(spec, dir / "one", 1);
  run_sweep(spec, dir / "two", 2);
  CHECK(read_text_file(dir / "one/results.csv") == read_text_file(dir / "two/results.csv"));
  CHECK(read_text_file(dir / "one/manifest.json") == read_text_file(dir / "two/manifest.json"));
}

TEST_CASE("every row regenerates from its seed") {
  TempDir dir("regen");
  const auto spec = small_spec();
  run_sweep(spec, dir / "a");
  const auto rows = lines(read_text_file(dir / "a/results.csv"));
  for (std::size_t cell : {0u, 4u, 9u})
    for (std::size_t rep : {0u, 3u}) CHECK(rows[1 + cell * spec.replicates + rep] == sweep_row(spec, sweep_instance(spec, cell, rep)));
}

TEST_CASE("manifest rerun and resume") {
  TempDir dir("resume");
  const auto spec = small_spec();
  run_sweep(spec, dir / "full");
  const auto full = read_text_file(dir / "full/results.csv");

  const auto manifest = nlohmann::json::parse(read_text_file(dir / "full/manifest.json"));
  const auto again = sweep_spec_from_json(manifest.at("spec"));
  CHECK(to_json(again).dump() == to_json(spec).dump());

  // Cut the file in the middle of row 23.
  const auto all = lines(full);
  std::string partial;
  for (std::size_t i = 0; i <= 22; ++i) partial += all[i] + "\n";
  partial += all[23].substr(0, all[23].size() / 2);
  fs::create_directories(dir / "part");
  fs::copy_file(dir / "full/manifest.json", dir / "part/manifest.json");
  write_text_file(dir / "part/results.csv", partial);
  const auto s = run_sweep(again, dir / "part");
  CHECK(s.resumed == 22);
  CHECK(s.rows == 50);
  CHECK(read_text_file(dir / "part/results.csv") == full);

  auto other = spec;
  other.base_seed = 100;
  CHECK_THROWS_AS(run_sweep(other, dir / "part"), InvalidInput);
}

TEST_CASE("sweep spec validation") {
  CHECK_THROWS_AS(small_spec(Experiment::Evolve).validate(), InvalidInput);
  CHECK_THROWS_AS(small_spec(Experiment::Empirical).validate(), InvalidInput);
  auto s = small_spec();
  s.replicates = 0;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = small_spec();
  s.k_grid.clear();
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  CHECK(parse_experiment("optimize-x") == Experiment::OptimizeX);
  CHECK_THROWS_AS(parse_experiment("fig6"), InvalidInput);
}

TEST_CASE("failed instances fill the error column") {
  auto spec = small_spec();
  spec.k_grid = {0.5};  // ER cannot cover every node
  spec.replicates = 2;
  TempDir dir("fail");
  const auto s = run_sweep(spec, dir / "a");
  CHECK(s.rows == 2);
  CHECK(s.failed == 2);
  const auto rows = lines(read_text_file(dir / "a/results.csv"));
  CHECK(rows[1].find("cannot cover") != std::string::npos);
}

TEST_CASE("intervention stats") {
  const std::string csv =
      "cell,replicate,seed,generator,nodes,k_target,edges,k_mean,delta_star_baseline,delta_star_redistributed,"
      "delta_star_nudged,delta_star_combined,class_baseline,class_redistributed,class_nudged,class_combined,error\n"
      "0,0,1,ER,10,4,14,4,0.5,0.4,0.49,0.39,feasible,feasible,feasible,feasible,\n"
      "0,1,2,ER,10,4,14,4,1.5,1.6,1.5,1.4,infeasible,infeasible,infeasible,infeasible,\n";
  const auto st = intervention_stats(csv);
  CHECK(st.instances == 2);
  CHECK(st.baseline_feasible == doctest::Approx(0.5));
  CHECK(st.redistribution_lowers == doctest::Approx(0.5));
  CHECK(st.nudge_lowers == doctest::Approx(0.5));
  CHECK(st.combined_lowers == doctest::Approx(1.0));
}

TEST_CASE("instance validation diagnostics") {
  TempDir dir("validate");
  write_text_file(dir / "h.txt", "1,2,3\n2,3,4\n");
  write_text_file(dir / "e.csv", "node,value\n1,0.25\n2,0.25\n3,0.25\n4,0.23\n");
  write_text_file(dir / "e_ok.csv", "node,value\n1,0.25\n2,0.25\n3,0.25\n4,0.25\n");
  write_text_file(dir / "r.csv", "node,value\n1,3.5\n2,2\n3,2\n4,2\n");
  write_text_file(dir / "x.csv", "node,hyperedge,value\n1,1,0.5\n2,0,1\n");

  auto has = [](const ValidationReport& r, const std::string& s) {
    for (const auto& d : r.diagnostics)
      if (d.find(s) != std::string::npos) return true;
    return false;
  };
  const auto simplex = validate_instance({dir / "h.txt", dir / "e.csv", "", ""});
  CHECK_FALSE(simplex.valid);
  CHECK(has(simplex, "simplex violation at 0.02"));

  const auto support = validate_instance({dir / "h.txt", "", "", dir / "x.csv"});
  CHECK_FALSE(support.valid);
  CHECK(has(support, "support violation at (node 1, hyperedge 1)"));

  const auto range = validate_instance({dir / "h.txt", "", dir / "r.csv", ""});
  CHECK_FALSE(range.valid);
  CHECK(has(range, "dilemma-range violation at node 1"));

  const auto ok = validate_instance({dir / "h.txt", dir / "e_ok.csv", "", ""});
  CHECK(ok.valid);
  CHECK(ok.diagnostics.empty());

  CHECK_FALSE(validate_instance({dir / "missing.txt", "", "", ""}).valid);
  CHECK_THROWS_AS(load_instance({dir / "h.txt", dir / "e.csv", "", ""}), InvalidInput);
  const auto loaded = load_instance({dir / "h.txt", dir / "e_ok.csv", "", ""}, 1.38);
  CHECK(loaded.r == std::vector<double>(4, 1.38));
  CHECK(loaded.x.is_full_cooperation(loaded.graph));
}

TEST_CASE("named structures and favoured endowments") {
  CHECK(named_structure("fully-connected:6").edge_count() == 20);
  CHECK(named_structure("circulant:10").hyperdegree(3) == 3);
  CHECK(named_structure("chain-of-three").edge_count() == 3);
  CHECK_THROWS_AS(named_structure("two-edge:3"), InvalidInput);
  CHECK_THROWS_AS(named_structure("fully-connected:x"), InvalidInput);
  CHECK_THROWS_AS(named_structure("star"), InvalidInput);

  const std::vector<NodeId> mid{1, 2};
  const auto e = favoured_endowments(4, mid, 0.7);
  CHECK(e == std::vector<double>{0.15000000000000002, 0.35, 0.35, 0.15000000000000002});
  const std::vector<NodeId> all{0, 1, 2, 3};
  CHECK_THROWS_AS(favoured_endowments(4, all, 0.5), InvalidInput);
}

TEST_CASE("figure recipes") {
  TempDir dir("figure");
  FigureOptions o;
  o.samples = 5000;
  CHECK(parse_recipe("ed5") == Recipe::Ed5);
  CHECK_THROWS_AS(parse_recipe("fig9"), InvalidInput);

  run_figure(Recipe::Fig2, dir / "f2", o);
  const auto t2 = empirical::parse_csv(read_text_file(dir / "f2/fig2_optimal.csv"));
  for (std::size_t r = 0; r < t2.rows.size(); ++r)
    if (t2.rows[r][t2.column("profile")] == "symmetric")
      CHECK(empirical::parse_number(t2, r, t2.column("delta_star_equal")) == doctest::Approx(0.25).epsilon(1e-12));

  run_figure(Recipe::Fig5, dir / "f5", o);
  const auto t5 = empirical::parse_csv(read_text_file(dir / "f5/fig5_two_edge.csv"));
  CHECK(empirical::parse_number(t5, 0, t5.column("delta_star_equal")) > 0.9);
  CHECK(empirical::parse_number(t5, 0, t5.column("delta_star_opt")) <= 0.9);

  const auto files = run_figure(Recipe::Ed3, dir / "e3", o);
  REQUIRE(files.size() == 2);
  for (const auto& f : files) CHECK(nlohmann::json::parse(read_text_file(f)).at("state_count") == 36);
}

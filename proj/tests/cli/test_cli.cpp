#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "entsplit/entsplit.hpp"
#include "problem_file.hpp"

using namespace entsplit;
using json = nlohmann::ordered_json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(ENTSPLIT_TEST_DATA) + "/" + name; }

std::vector<std::string> keys(const json& j) {
  std::vector<std::string> k;
  for (const auto& [key, _] : j.items()) k.push_back(key);
  return k;
}

using Keys = std::vector<std::string>;

double projector_distance(const Splitting& a, const Splitting& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, max_abs(a[i].projector() - b[i].projector()));
  return worst;
}

}  // namespace

TEST_CASE("documented command lines") {
  const Run certify = run({"certify", "--fixture", "EX2_2x3"});
  CHECK(certify.code == 0);
  CHECK(certify.out.find("Property 2 holds (3 outcomes, profile 2,2,2)") != std::string::npos);

  const Run elim = run({"eliminate", "--fixture", "EX5_3x3", "--basis", "computational"});
  CHECK(elim.code == 0);
  CHECK(elim.out.find("Dead outcomes: |00>, |11>") != std::string::npos);

  const Run ident = run({"identify", "--fixture", "EX1_2x2"});
  CHECK(ident.code == 1);
  CHECK(ident.out.find("rho1: Identifiable\n    witness:") != std::string::npos);
  CHECK(ident.out.find("rho2: Identifiable\n    witness:") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run({"verify", "--fixture", "EX2_2x3"}).code == 0);
  CHECK(run({"verify", "--fixture", "EX1_2x2"}).code == 1);
  CHECK(run({"certify", "--fixture", "EX1_2x2"}).code == 1);
  CHECK(run({"fixtures"}).code == 0);
  CHECK(run({"bogus"}).code == 3);
  CHECK(run({}).code == 3);
  CHECK(run({"verify"}).code == 3);
  CHECK(run({"verify", "--fixture", "EX9"}).code == 3);
  CHECK(run({"verify", "--fixture", "EX2_2x3", "--mode", "ges"}).code == 3);
  CHECK(run({"verify", "--fixture", "EX2_2x3", "--tol-product", "1e-3", "--gap", "1e-6"}).code == 3);
  CHECK(run({"search", "--dims", "2,4", "--profile", "4,4"}).code == 3);
  CHECK(run({"generate", "--dims", "2,3"}).code == 3);
  CHECK(run({"measure", "--fixture", "EX1_2x2", "--input", "01", "--outcome", "2"}).code == 3);
  CHECK(run({"verify", "--fixture", "EX2_2x3", "--restarts", "abc"}).code == 3);
  // A gap above the true overlap deficit leaves the 3 x 3 subspaces unresolved.
  const Run weak = run({"verify", "--fixture", "EX5_3x3", "--gap", "0.9"});
  CHECK(weak.code == 2);
}

TEST_CASE("problem file errors") {
  const Run dim = run({"verify", "--problem", data("bad_dimension.json")});
  CHECK(dim.code == 3);
  CHECK(dim.err.find("subspace 'short': dimension mismatch") != std::string::npos);

  const Run dup = run({"verify", "--problem", data("duplicate.json")});
  CHECK(dup.code == 3);
  CHECK(dup.err.find("subspace 'twice': rank deficiency") != std::string::npos);

  const Run bad = run({"verify", "--problem", data("malformed.json")});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("malformed.json:4: parse error") != std::string::npos);

  CHECK_THROWS_AS(cli::load_problem(data("missing.json")), cli::ProblemError);
}

TEST_CASE("problem file for the 2x3 splitting matches the fixture") {
  const cli::Problem p = cli::load_problem(data("ex2.json"));
  CHECK(projector_distance(p.splitting(), fixture(FixtureId::EX2_2x3)) <= 1e-9);
  CHECK(p.settings.seed == std::uint64_t{7});
  CHECK(p.settings.samples == 200);
  CHECK_FALSE(p.settings.restarts);
}

TEST_CASE("export and reload keep the projectors") {
  for (FixtureId id : all_fixtures()) {
    const Splitting sp = fixture(id);
    const cli::Problem once = cli::parse_problem(cli::export_problem(sp));
    const cli::Problem twice = cli::parse_problem(cli::export_problem(once.splitting()));
    CHECK(projector_distance(sp, once.splitting()) <= 1e-12);
    CHECK(projector_distance(once.splitting(), twice.splitting()) <= 1e-12);
    CHECK(once.labels == sp.labels());
  }
  const auto path = std::filesystem::temp_directory_path() / "entsplit_cli_export.json";
  REQUIRE(run({"generate", "--dims", "2,4", "--export", path.string()}).code == 0);
  const Run back = run({"verify", "--problem", path.string()});
  CHECK(back.code == 0);
  std::filesystem::remove(path);
}

TEST_CASE("settings precedence: defaults, then file, then flags") {
  const json from_file = json::parse(run({"npt", "--problem", data("ex2.json"), "--json"}).out);
  CHECK(from_file["settings"]["seed"] == 7);
  CHECK(from_file["settings"]["samples"] == 200);
  CHECK(from_file["settings"]["restarts"] == SearchConfig{}.restarts);
  const json flagged = json::parse(run({"npt", "--problem", data("ex2.json"), "--json", "--seed", "9"}).out);
  CHECK(flagged["settings"]["seed"] == 9);
  CHECK(flagged["settings"]["samples"] == 200);
}

TEST_CASE("json reports have fixed field sets") {
  const Keys top{"command", "source", "space", "settings", "result", "exit_code"};
  const Keys settings{"product_tol", "entangled_gap", "restarts", "max_iters", "stall_tol", "seed", "samples", "mode"};
  const Keys subspace{"label", "dim", "verdict", "max_overlap", "witness", "cuts"};
  const Keys state{"label", "verdict", "max_overlap", "own_overlap", "other_overlap", "witness"};
  const std::vector<std::pair<std::vector<std::string>, Keys>> cases{
      {{"verify", "--fixture", "EX1_2x2"},
       {"valid", "orthogonal", "complete", "min_rank_ok", "profile", "max_cross", "completeness_error", "all_entangled",
        "inconclusive", "subspaces"}},
      {{"detect", "--fixture", "EX2_2x3"}, {"subspaces"}},
      {{"identify", "--fixture", "EX1_2x2"},
       {"property1_holds", "genuine", "inconclusive", "full_rank_sum", "states"}},
      {{"classify", "--fixture", "RHOPRIME_2x3"}, {"in_S1", "in_S2", "in_S3", "inconclusive", "states"}},
      {{"eliminate", "--fixture", "EX2_2x3"},
       {"basis", "rows", "dead_outcomes", "two_states", "elimination_identifies"}},
      {{"measure", "--fixture", "EX1_2x2", "--input", "00"},
       {"input", "probabilities", "outcome", "probability", "post_state", "schmidt2", "metric", "entangled"}},
      {{"certify", "--fixture", "EX1_2x2", "--samples", "20"},
       {"mode", "holds", "inconclusive", "outcomes", "profile", "structural", "empirical"}},
      {{"generate", "--dims", "2,4"}, {"dims", "profile", "valid", "all_entangled", "problem"}},
      {{"search", "--dims", "2,3", "--profile", "2,2,2"},
       {"dims", "profile", "feasibility", "found", "candidates_tested", "bases_tried", "problem"}},
      {{"fixtures"}, {"fixtures"}},
      {{"regroup", "--fixture", "EX3_2x4_MAX", "--new-dims", "2,2,2"},
       {"from", "to", "profile", "valid", "mode", "all_entangled", "subspaces", "problem"}},
      {{"npt", "--fixture", "EX2_2x3", "--samples", "20"}, {"samples", "subspaces"}},
  };
  for (auto [args, fields] : cases) {
    CAPTURE(args[0]);
    args.push_back("--json");
    const Run r = run(args);
    const json j = json::parse(r.out);
    CHECK(keys(j) == top);
    CHECK(keys(j["settings"]) == settings);
    CHECK(keys(j["result"]) == fields);
    CHECK(j["exit_code"] == r.code);
  }

  const json v = json::parse(run({"verify", "--fixture", "EX1_2x2", "--json"}).out);
  for (const auto& s : v["result"]["subspaces"]) {
    CHECK(keys(s) == subspace);
    REQUIRE(s["witness"].is_object());
    CHECK(keys(s["witness"]) == Keys{"groups", "factors", "ket"});
    for (const auto& amp : s["witness"]["ket"]) CHECK(amp.size() == 2);
  }
  const json i = json::parse(run({"identify", "--fixture", "EX1_2x2", "--json"}).out);
  for (const auto& s : i["result"]["states"]) CHECK(keys(s) == state);
  const json c = json::parse(run({"certify", "--fixture", "EX1_2x2", "--json", "--samples", "20"}).out);
  CHECK(keys(c["result"]["empirical"]) ==
        Keys{"samples", "counts", "min_metric", "weak_posts", "max_born_deviation", "counterexample"});
  CHECK(keys(c["result"]["empirical"]["counterexample"]) == Keys{"sample", "input", "outcome", "post_state", "metric"});
}

TEST_CASE("json output is deterministic for a fixed seed") {
  const std::vector<std::vector<std::string>> commands{
      {"verify", "--fixture", "EX5_3x3", "--json", "--seed", "3"},
      {"certify", "--fixture", "EX2_2x3", "--json", "--seed", "3", "--samples", "100"},
      {"measure", "--fixture", "EX2_2x3", "--json", "--seed", "3"},
      {"npt", "--fixture", "EX4_2x4_MIN", "--json", "--seed", "3", "--samples", "50"},
      {"search", "--dims", "3,3", "--profile", "3,3,3", "--json", "--seed", "3"},
  };
  for (const auto& args : commands) {
    CAPTURE(args[0]);
    const Run a = run(args);
    const Run b = run(args);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
  }
}

#include "cli.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "entsplit/entsplit.hpp"
#include "problem_file.hpp"

namespace entsplit::cli {

using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::optional<std::string> fixture;
  std::optional<std::string> problem;
  std::optional<double> tol_product;
  std::optional<double> gap;
  std::optional<int> restarts;
  std::optional<int> max_iters;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  bool json = false;
  std::optional<int> index;
  std::string basis = "computational";
  std::vector<int> dims;
  std::vector<int> profile;
  std::optional<std::uint64_t> budget;
  std::vector<int> new_dims;
  std::string input = "random";
  std::optional<int> outcome;
  std::optional<std::string> export_path;
};

// Everything a command needs once the source and settings are resolved.
struct Context {
  std::optional<Splitting> splitting;
  Settings file_settings;
  json source = nullptr;
  SearchConfig cfg;
  int samples = 1000;
  std::optional<EntanglementMode> mode;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json cvec(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

json witness_json(const std::optional<ProductWitness>& w) {
  if (!w) return nullptr;
  json groups = json::array();
  for (const auto& g : w->groups) {
    json parties = json::array();
    for (int p : g) parties.push_back(p + 1);
    groups.push_back(std::move(parties));
  }
  json factors = json::array();
  for (const auto& f : w->factors) factors.push_back(cvec(f));
  return {{"groups", std::move(groups)}, {"factors", std::move(factors)}, {"ket", cvec(w->ket.amplitudes())}};
}

std::string format_number(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

std::string format_ket(const Ket& k) {
  std::string out;
  const Vector& a = k.amplitudes();
  for (Index f = 0; f < a.size(); ++f) {
    if (std::abs(a(f)) <= 1e-9) continue;
    std::string amp;
    if (std::abs(a(f).imag()) <= 1e-9) {
      amp = format_number(a(f).real());
    } else {
      amp = "(" + format_number(a(f).real()) + (a(f).imag() < 0 ? "-" : "+") + format_number(std::abs(a(f).imag())) + "i)";
    }
    std::string label;
    for (int l : k.space().labels(f)) label += std::to_string(l);
    if (!out.empty()) {
      if (amp.front() == '-') {
        out += " - ";
        amp.erase(0, 1);
      } else {
        out += " + ";
      }
    }
    out += amp + "|" + label + ">";
  }
  return out.empty() ? "0" : out;
}

std::string join(const std::vector<int>& v, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

EntanglementMode parse_mode(const std::string& m) {
  if (m == "bipartite") return EntanglementMode::Bipartite;
  if (m == "ces") return EntanglementMode::CompletelyEntangled;
  if (m == "ges") return EntanglementMode::GenuinelyEntangled;
  throw UsageError("unknown mode '" + m + "' (expected bipartite, ces or ges)");
}

Property2Mode property2_mode(EntanglementMode m) {
  switch (m) {
    case EntanglementMode::Bipartite: return Property2Mode::Bipartite;
    case EntanglementMode::CompletelyEntangled: return Property2Mode::CompletelyProduct;
    case EntanglementMode::GenuinelyEntangled: return Property2Mode::Genuine;
  }
  return Property2Mode::Bipartite;
}

void check_mode(EntanglementMode m, const TensorSpace& space) {
  const bool two = space.parties() == 2;
  if ((m == EntanglementMode::Bipartite) != two) {
    throw UsageError("mode " + std::string(to_string(m)) + " does not fit a " + std::to_string(space.parties()) +
                     "-party space");
  }
}

Context resolve(const Options& o, bool needs_source) {
  Context c;
  if (o.fixture && o.problem) throw UsageError("--fixture and --problem are mutually exclusive");
  if (o.fixture) {
    FixtureId id;
    try {
      id = parse_fixture_id(*o.fixture);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    c.splitting = fixture(id);
    c.source = {{"fixture", *o.fixture}};
  } else if (o.problem) {
    Problem p = load_problem(*o.problem);
    c.splitting = p.splitting();
    c.file_settings = p.settings;
    c.source = {{"problem", *o.problem}};
  } else if (needs_source) {
    throw UsageError("one of --fixture or --problem is required");
  }

  const Settings& f = c.file_settings;
  c.cfg.product_tol = o.tol_product.value_or(f.product_tol.value_or(c.cfg.product_tol));
  c.cfg.entangled_gap = o.gap.value_or(f.entangled_gap.value_or(c.cfg.entangled_gap));
  c.cfg.restarts = o.restarts.value_or(f.restarts.value_or(c.cfg.restarts));
  c.cfg.max_iters = o.max_iters.value_or(f.max_iters.value_or(c.cfg.max_iters));
  c.cfg.seed = o.seed.value_or(f.seed.value_or(c.cfg.seed));
  c.samples = o.samples.value_or(f.samples.value_or(c.samples));
  try {
    c.cfg.validate();
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
  if (c.samples < 1) throw UsageError("--samples must be at least 1");

  if (o.mode) c.mode = parse_mode(*o.mode);
  if (c.splitting) {
    if (!c.mode) c.mode = default_mode(c.splitting->space());
    check_mode(*c.mode, c.splitting->space());
  }
  return c;
}

json settings_json(const Context& c) {
  return {{"product_tol", c.cfg.product_tol}, {"entangled_gap", c.cfg.entangled_gap},
          {"restarts", c.cfg.restarts},       {"max_iters", c.cfg.max_iters},
          {"stall_tol", c.cfg.stall_tol},     {"seed", c.cfg.seed},
          {"samples", c.samples},             {"mode", c.mode ? json(to_string(*c.mode)) : json(nullptr)}};
}

json verdict_entry(const std::string& label, const Subspace& s, const SubspaceVerdict& v) {
  json cuts = json::array();
  if (v.cuts) {
    for (const auto& [cut, cv] : v.cuts->cuts) {
      cuts.push_back({{"cut", cut.to_string()}, {"verdict", to_string(cv.kind)}, {"max_overlap", cv.max_overlap}});
    }
  }
  return {{"label", label},
          {"dim", s.dim()},
          {"verdict", to_string(v.verdict.kind)},
          {"max_overlap", v.verdict.max_overlap},
          {"witness", witness_json(v.verdict.witness)},
          {"cuts", std::move(cuts)}};
}

void print_verdict(std::ostream& out, const std::string& label, const Subspace& s, const SubspaceVerdict& v) {
  out << "  " << label << " (dim " << s.dim() << "): " << to_string(v.verdict.kind)
      << ", max product overlap " << format_number(v.verdict.max_overlap) << "\n";
  if (v.verdict.witness) out << "    product state: " << format_ket(v.verdict.witness->ket) << "\n";
  if (v.cuts) {
    for (const auto& [cut, cv] : v.cuts->cuts) {
      out << "    cut " << cut.to_string() << ": " << to_string(cv.kind) << ", overlap " << format_number(cv.max_overlap)
          << "\n";
    }
  }
}

int entangled_exit(bool all, bool inconclusive) {
  if (all) return kHolds;
  return inconclusive ? kInconclusive : kFails;
}

// Result object plus exit code of a command.
struct Outcome {
  json result;
  int code = kHolds;
};

std::size_t pick_index(const Options& o, const Splitting& sp) {
  const int i = *o.index;
  if (i < 1 || static_cast<std::size_t>(i) > sp.size()) {
    throw UsageError("--index must be between 1 and " + std::to_string(sp.size()));
  }
  return static_cast<std::size_t>(i - 1);
}

Outcome cmd_verify(const Options&, Context& c, std::ostream& out) {
  const Splitting& sp = *c.splitting;
  const SplittingCheck chk = verify_splitting(sp);
  Outcome r;
  json subs = json::array();
  out << "Splitting of " << sp.space().to_string() << ", profile " << join(chk.profile) << "\n";
  out << "  orthogonal: " << (chk.orthogonal ? "yes" : "no") << " (max cross " << format_number(chk.max_cross) << ")\n";
  out << "  complete: " << (chk.complete ? "yes" : "no") << " (error " << format_number(chk.completeness_error) << ")\n";
  out << "  ranks >= 2: " << (chk.min_rank_ok ? "yes" : "no") << "\n";
  bool all = false, inconclusive = false;
  if (chk.valid()) {
    const EntangledSplittingReport rep = verify_entangled_splitting(sp, c.cfg, *c.mode);
    out << "Entangledness (" << to_string(*c.mode) << "):\n";
    for (std::size_t i = 0; i < sp.size(); ++i) {
      print_verdict(out, sp.labels()[i], sp[i], rep.subspaces[i]);
      subs.push_back(verdict_entry(sp.labels()[i], sp[i], rep.subspaces[i]));
    }
    all = rep.all_entangled;
    inconclusive = rep.inconclusive;
    out << (all ? "Entangled splitting" : inconclusive ? "Inconclusive" : "Not an entangled splitting") << "\n";
  }
  r.code = chk.valid() ? entangled_exit(all, inconclusive) : kFails;
  r.result = {{"valid", chk.valid()},
              {"orthogonal", chk.orthogonal},
              {"complete", chk.complete},
              {"min_rank_ok", chk.min_rank_ok},
              {"profile", chk.profile},
              {"max_cross", chk.max_cross},
              {"completeness_error", chk.completeness_error},
              {"all_entangled", all},
              {"inconclusive", inconclusive},
              {"subspaces", std::move(subs)}};
  return r;
}

Outcome cmd_detect(const Options& o, Context& c, std::ostream& out) {
  const Splitting& sp = *c.splitting;
  std::vector<std::size_t> which;
  if (o.index) {
    which.push_back(pick_index(o, sp));
  } else {
    for (std::size_t i = 0; i < sp.size(); ++i) which.push_back(i);
  }
  json subs = json::array();
  bool all = true, any_product = false;
  out << "Product-state search (" << to_string(*c.mode) << ") in " << sp.space().to_string() << ":\n";
  for (std::size_t i : which) {
    const SubspaceVerdict v = check_subspace(sp[i], *c.mode, c.cfg);
    print_verdict(out, sp.labels()[i], sp[i], v);
    subs.push_back(verdict_entry(sp.labels()[i], sp[i], v));
    all = all && is_entangled(v.verdict.kind);
    any_product = any_product || contains_product(v.verdict.kind);
  }
  Outcome r;
  r.code = all ? kHolds : any_product ? kFails : kInconclusive;
  r.result = {{"subspaces", std::move(subs)}};
  return r;
}

json identifiability_entry(const std::string& label, const StateIdentifiability& s) {
  return {{"label", label},
          {"verdict", to_string(s.verdict)},
          {"max_overlap", s.max_overlap},
          {"own_overlap", s.own_overlap},
          {"other_overlap", s.other_overlap},
          {"witness", witness_json(s.witness)}};
}

void print_identifiability(std::ostream& out, const std::string& label, const StateIdentifiability& s) {
  out << "  " << label << ": " << to_string(s.verdict) << "\n";
  if (s.witness) {
    out << "    witness: " << format_ket(s.witness->ket) << " (overlap " << format_number(s.own_overlap)
        << ", others " << format_number(s.other_overlap) << ")\n";
  }
}

Outcome cmd_identify(const Options&, Context& c, std::ostream& out) {
  const StateSet set = StateSet::from_splitting(*c.splitting);
  const bool genuine = *c.mode == EntanglementMode::GenuinelyEntangled;
  const Property1Report rep = check_property1(set, c.cfg, genuine);
  json states = json::array();
  out << (genuine ? "Genuine local" : "Local") << " unambiguous identifiability of " << set.size() << " states:\n";
  if (genuine) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      print_verdict(out, set.labels()[i], set[i].support, rep.cuts[i]);
      states.push_back(verdict_entry(set.labels()[i], set[i].support, rep.cuts[i]));
    }
  } else {
    for (std::size_t i = 0; i < set.size(); ++i) {
      print_identifiability(out, set.labels()[i], rep.identifiability.states[i]);
      states.push_back(identifiability_entry(set.labels()[i], rep.identifiability.states[i]));
    }
  }
  out << (rep.holds ? "Property 1 holds" : rep.inconclusive ? "Property 1 inconclusive" : "Property 1 fails") << "\n";
  Outcome r;
  r.code = entangled_exit(rep.holds, rep.inconclusive);
  r.result = {{"property1_holds", rep.holds},
              {"genuine", genuine},
              {"inconclusive", rep.inconclusive},
              {"full_rank_sum", set.full_rank_sum()},
              {"states", std::move(states)}};
  return r;
}

Outcome cmd_classify(const Options&, Context& c, std::ostream& out) {
  const StateSet set = StateSet::from_splitting(*c.splitting);
  const SetClass cls = classify_set(set, c.cfg);
  json states = json::array();
  for (std::size_t i = 0; i < set.size(); ++i) {
    print_identifiability(out, set.labels()[i], cls.identifiability.states[i]);
    states.push_back(identifiability_entry(set.labels()[i], cls.identifiability.states[i]));
  }
  out << "S3: " << (cls.in_S3 ? "yes" : "no") << ", S2: " << (cls.in_S2 ? "yes" : "no") << ", S1: not computed"
      << (cls.inconclusive ? " (some verdicts inconclusive)" : "") << "\n";
  Outcome r;
  r.code = cls.inconclusive ? kInconclusive : kHolds;
  r.result = {{"in_S1", "not-computed"},
              {"in_S2", cls.in_S2},
              {"in_S3", cls.in_S3},
              {"inconclusive", cls.inconclusive},
              {"states", std::move(states)}};
  return r;
}

Outcome cmd_eliminate(const Options& o, Context& c, std::ostream& out) {
  if (o.basis != "computational") throw UsageError("unsupported --basis '" + o.basis + "' (only computational)");
  const StateSet set = StateSet::from_splitting(*c.splitting);
  const EliminationTable t = elimination_table(set, computational_basis(set.space()));
  json rows = json::array();
  json dead = json::array();
  out << "Elimination table (" << o.basis << " basis):\n";
  for (const auto& row : t.rows) {
    json elim = json::array();
    std::string names;
    for (std::size_t i : row.eliminated) {
      elim.push_back(set.labels()[i]);
      names += (names.empty() ? "" : ", ") + set.labels()[i];
    }
    out << "  |" << row.outcome << "> -> " << (row.dead() ? "dead" : "eliminates " + names) << "\n";
    rows.push_back({{"outcome", row.outcome}, {"overlaps", row.overlaps}, {"eliminated", std::move(elim)}});
  }
  std::string dead_list;
  for (std::size_t k : t.dead_outcomes) {
    dead.push_back(t.rows[k].outcome);
    dead_list += (dead_list.empty() ? "" : ", ") + ("|" + t.rows[k].outcome + ">");
  }
  out << "Dead outcomes: " << (dead_list.empty() ? "none" : dead_list) << "\n";
  if (t.elimination_identifies) out << "Two states: every elimination identifies the other state\n";
  Outcome r;
  r.result = {{"basis", o.basis},
              {"rows", std::move(rows)},
              {"dead_outcomes", std::move(dead)},
              {"two_states", t.two_states},
              {"elimination_identifies", t.elimination_identifies}};
  return r;
}

Ket parse_input(const std::string& text, const TensorSpace& space, std::uint64_t seed) {
  if (text == "random") return sample_product_states(space, 1, seed).front();
  std::vector<int> labels;
  if (text.find(',') != std::string::npos) {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) labels.push_back(std::stoi(tok));
  } else {
    for (char ch : text) {
      if (ch < '0' || ch > '9') throw UsageError("--input must be digits, comma-separated labels or 'random'");
      labels.push_back(ch - '0');
    }
  }
  if (static_cast<int>(labels.size()) != space.parties()) {
    throw UsageError("--input needs one label per party (" + std::to_string(space.parties()) + ")");
  }
  return ket_from_labels(space, labels);
}

Outcome cmd_measure(const Options& o, Context& c, std::ostream& out) {
  const ProjectiveMeasurement m = ProjectiveMeasurement::from_splitting(*c.splitting);
  const Ket psi = parse_input(o.input, m.space(), c.cfg.seed);
  const std::vector<double> p = m.probabilities(psi);
  std::optional<OutcomeRecord> rec;
  if (o.outcome) {
    if (*o.outcome < 1 || static_cast<std::size_t>(*o.outcome) > m.outcomes()) {
      throw UsageError("--outcome must be between 1 and " + std::to_string(m.outcomes()));
    }
    rec.emplace(measure(m, psi, static_cast<std::size_t>(*o.outcome - 1)));
  } else {
    Rng rng(derive_seed(c.cfg.seed, 1));
    rec.emplace(measure(m, psi, rng));
  }
  const auto& labels = c.splitting->labels();
  out << "Input: " << format_ket(psi) << "\n";
  for (std::size_t i = 0; i < p.size(); ++i) out << "  p(" << labels[i] << ") = " << format_number(p[i]) << "\n";
  const Property2Mode pm = property2_mode(*c.mode);
  const double metric = entanglement_metric(rec->post_state, pm);
  const bool entangled = metric > tol::kEntangledSchmidt;
  out << "Outcome " << labels[rec->outcome] << " (p = " << format_number(rec->probability) << ")\n";
  out << "Post-state: " << format_ket(rec->post_state) << "\n";
  out << "Post-state is " << (entangled ? "entangled" : "not entangled") << " (" << to_string(*c.mode)
      << " metric " << format_number(metric) << ")\n";
  json s2 = json::array();
  for (const auto& [cut, v] : rec->schmidt2) s2.push_back({{"cut", cut.to_string()}, {"value", v}});
  Outcome r;
  r.result = {{"input", cvec(psi.amplitudes())},
              {"probabilities", p},
              {"outcome", labels[rec->outcome]},
              {"probability", rec->probability},
              {"post_state", cvec(rec->post_state.amplitudes())},
              {"schmidt2", std::move(s2)},
              {"metric", metric},
              {"entangled", entangled}};
  return r;
}

Outcome cmd_certify(const Options&, Context& c, std::ostream& out) {
  const ProjectiveMeasurement m = ProjectiveMeasurement::from_splitting(*c.splitting);
  Property2Config pc;
  pc.search = c.cfg;
  pc.samples = c.samples;
  pc.seed = c.cfg.seed;
  const Property2Report rep = certify_property2(m, pc, property2_mode(*c.mode));
  const Profile prof = m.ranks();
  const std::string tail = " (" + std::to_string(m.outcomes()) + " outcomes, profile " + join(prof) + ")";
  json subs = json::array();
  for (std::size_t i = 0; i < m.outcomes(); ++i) {
    subs.push_back(verdict_entry(c.splitting->labels()[i], (*c.splitting)[i], rep.structural.subspaces[i]));
  }
  const SampleReport& e = rep.empirical;
  json cex = nullptr;
  if (e.counterexample) {
    cex = {{"sample", e.counterexample->sample},
           {"input", cvec(e.counterexample->input.amplitudes())},
           {"outcome", c.splitting->labels()[e.counterexample->outcome]},
           {"post_state", cvec(e.counterexample->post_state.amplitudes())},
           {"metric", e.counterexample->metric}};
  }
  if (rep.holds) {
    out << "Property 2 holds" << tail << "\n";
  } else if (rep.inconclusive) {
    out << "Property 2 inconclusive" << tail << "\n";
  } else {
    out << "Property 2 fails" << tail << "\n";
  }
  for (std::size_t i = 0; i < m.outcomes(); ++i) {
    print_verdict(out, c.splitting->labels()[i], (*c.splitting)[i], rep.structural.subspaces[i]);
  }
  out << "Sampled " << e.samples << " product inputs; smallest post-state metric " << format_number(e.min_metric)
      << "; Born deviation " << format_number(e.max_born_deviation) << "\n";
  if (e.counterexample) {
    out << "Counterexample: input " << format_ket(e.counterexample->input) << " -> outcome "
        << c.splitting->labels()[e.counterexample->outcome] << ", post-state "
        << format_ket(e.counterexample->post_state) << "\n";
  }
  Outcome r;
  r.code = entangled_exit(rep.holds, rep.inconclusive);
  r.result = {{"mode", to_string(rep.mode)},
              {"holds", rep.holds},
              {"inconclusive", rep.inconclusive},
              {"outcomes", m.outcomes()},
              {"profile", prof},
              {"structural", std::move(subs)},
              {"empirical",
               {{"samples", e.samples},
                {"counts", e.counts},
                {"min_metric", e.min_metric},
                {"weak_posts", e.weak_posts},
                {"max_born_deviation", e.max_born_deviation},
                {"counterexample", std::move(cex)}}}};
  return r;
}

void maybe_export(const Options& o, const Splitting& sp, std::ostream& out) {
  if (!o.export_path) return;
  std::ofstream f(*o.export_path);
  if (!f) throw UsageError("cannot write " + *o.export_path);
  f << export_problem(sp) << "\n";
  out << "Wrote " << *o.export_path << "\n";
}

void require_dims(const std::vector<int>& dims, const char* flag) {
  if (dims.empty()) throw UsageError(std::string(flag) + " is required");
}

Outcome cmd_generate(const Options& o, Context& c, std::ostream& out) {
  require_dims(o.dims, "--dims");
  if (o.dims.size() != 2) throw UsageError("--dims must name two local dimensions");
  const Splitting sp = generate_bell_pairing(o.dims[0], o.dims[1]);
  const SplittingCheck chk = verify_splitting(sp);
  const EntangledSplittingReport rep = verify_entangled_splitting(sp, c.cfg, EntanglementMode::Bipartite);
  out << "Bell pairing of " << sp.space().to_string() << ": " << sp.size() << " subspaces, profile "
      << join(chk.profile) << ", " << (chk.valid() && rep.all_entangled ? "verified entangled" : "NOT verified") << "\n";
  maybe_export(o, sp, out);
  Outcome r;
  r.code = chk.valid() ? entangled_exit(rep.all_entangled, rep.inconclusive) : kFails;
  r.result = {{"dims", o.dims},
              {"profile", chk.profile},
              {"valid", chk.valid()},
              {"all_entangled", rep.all_entangled},
              {"problem", json::parse(export_problem(sp))}};
  return r;
}

json feasibility_json(const FeasibilityReport& f) {
  json profiles = json::array();
  for (const auto& p : f.profiles) profiles.push_back(p);
  return {{"total_dim", f.total_dim},
          {"bounds_known", f.bounds_known},
          {"max_entangled_dim", f.max_entangled_dim},
          {"violations", f.violations},
          {"cardinality_min", f.cardinality_min},
          {"cardinality_max", f.cardinality_max},
          {"degeneracy_degree", f.degeneracy_degree},
          {"cardinalities", f.cardinalities},
          {"profiles", std::move(profiles)},
          {"profiles_truncated", f.profiles_truncated}};
}

Outcome cmd_search(const Options& o, Context& c, std::ostream& out) {
  require_dims(o.dims, "--dims");
  require_dims(o.profile, "--profile");
  const TensorSpace space(o.dims);
  const FeasibilityReport feas = feasibility(space, o.profile);
  out << "Feasibility of profile " << join(o.profile) << " in " << space.to_string() << ": "
      << (feas.feasible() ? "passes the necessary conditions" : "infeasible") << "\n";
  for (const auto& v : feas.violations) out << "  " << v << "\n";
  if (feas.bounds_known) {
    out << "  cardinality between " << feas.cardinality_min << " and " << feas.cardinality_max << "; "
        << feas.degeneracy_degree << " candidate profiles\n";
  }
  if (!feas.feasible()) throw UsageError("profile is infeasible");
  SplittingSearchConfig sc;
  sc.search = c.cfg;
  if (o.budget) sc.budget = *o.budget;
  const SplittingSearchResult res = search_splitting(space, o.profile, sc);
  Outcome r;
  json problem = nullptr;
  if (res.splitting) {
    out << "Found an entangled splitting after " << res.candidates_tested << " candidate checks (" << res.bases_tried
        << " bases)\n";
    maybe_export(o, *res.splitting, out);
    problem = json::parse(export_problem(*res.splitting));
  } else {
    out << "No splitting found within the budget of " << sc.budget << " candidate checks (not a proof of absence)\n";
    r.code = kInconclusive;
  }
  r.result = {{"dims", o.dims},
              {"profile", o.profile},
              {"feasibility", feasibility_json(feas)},
              {"found", res.splitting.has_value()},
              {"candidates_tested", res.candidates_tested},
              {"bases_tried", res.bases_tried},
              {"problem", std::move(problem)}};
  return r;
}

Outcome cmd_fixtures(const Options&, Context&, std::ostream& out) {
  json list = json::array();
  for (FixtureId id : all_fixtures()) {
    const Splitting sp = fixture(id);
    out << "  " << std::left << std::setw(14) << to_string(id) << " " << std::setw(8) << sp.space().to_string()
        << " profile " << join(sp.profile()) << "\n";
    list.push_back({{"id", to_string(id)}, {"dims", sp.space().dims()}, {"profile", sp.profile()}});
  }
  Outcome r;
  r.result = {{"fixtures", std::move(list)}};
  return r;
}

Outcome cmd_regroup(const Options& o, Context& c, std::ostream& out) {
  require_dims(o.new_dims, "--new-dims");
  const Splitting sp = regroup_parties(*c.splitting, o.new_dims);
  const SplittingCheck chk = verify_splitting(sp);
  // Regrouping carries completely-entangled structure over, not genuine entanglement.
  EntanglementMode mode =
      sp.space().parties() > 2 ? EntanglementMode::CompletelyEntangled : EntanglementMode::Bipartite;
  if (o.mode) {
    mode = parse_mode(*o.mode);
    check_mode(mode, sp.space());
  }
  out << "Regrouped " << c.splitting->space().to_string() << " -> " << sp.space().to_string() << ", profile "
      << join(chk.profile) << ", " << (chk.valid() ? "valid" : "invalid") << "\n";
  json subs = json::array();
  bool all = false;
  if (chk.valid()) {
    const EntangledSplittingReport rep = verify_entangled_splitting(sp, c.cfg, mode);
    out << "Entangledness (" << to_string(mode) << "):\n";
    for (std::size_t i = 0; i < sp.size(); ++i) {
      print_verdict(out, sp.labels()[i], sp[i], rep.subspaces[i]);
      subs.push_back(verdict_entry(sp.labels()[i], sp[i], rep.subspaces[i]));
    }
    all = rep.all_entangled;
  }
  maybe_export(o, sp, out);
  Outcome r;
  r.code = chk.valid() ? kHolds : kFails;
  r.result = {{"from", c.splitting->space().dims()},
              {"to", sp.space().dims()},
              {"profile", chk.profile},
              {"valid", chk.valid()},
              {"mode", to_string(mode)},
              {"all_entangled", all},
              {"subspaces", std::move(subs)},
              {"problem", json::parse(export_problem(sp))}};
  return r;
}

Outcome cmd_npt(const Options& o, Context& c, std::ostream& out) {
  const Splitting& sp = *c.splitting;
  std::vector<std::size_t> which;
  if (o.index) {
    which.push_back(pick_index(o, sp));
  } else {
    for (std::size_t i = 0; i < sp.size(); ++i) which.push_back(i);
  }
  json subs = json::array();
  bool all = true;
  out << "Partial-transpose probe, " << c.samples << " samples per subspace:\n";
  for (std::size_t i : which) {
    const NptReport rep = npt_probe(sp[i], c.samples, c.cfg.seed);
    json cuts = json::array();
    for (const auto& cs : rep.cuts) {
      cuts.push_back({{"cut", cs.cut.to_string()},
                      {"fraction_npt", cs.fraction_npt},
                      {"min_eigenvalue", cs.min_eigenvalue},
                      {"max_eigenvalue", cs.max_eigenvalue},
                      {"mean_eigenvalue", cs.mean_eigenvalue}});
    }
    const auto& worst = rep.cuts[rep.worst_cut];
    out << "  " << sp.labels()[i] << ": NPT fraction " << format_number(rep.fraction_npt) << ", worst cut "
        << worst.cut.to_string() << " (largest min eigenvalue " << format_number(worst.max_eigenvalue) << ")\n";
    all = all && rep.fraction_npt == 1.0;
    subs.push_back({{"label", sp.labels()[i]},
                    {"fraction_npt", rep.fraction_npt},
                    {"worst_cut", worst.cut.to_string()},
                    {"cuts", std::move(cuts)}});
  }
  Outcome r;
  r.code = all ? kHolds : kFails;
  r.result = {{"samples", c.samples}, {"subspaces", std::move(subs)}};
  return r;
}

using Handler = std::function<Outcome(const Options&, Context&, std::ostream&)>;

struct Command {
  const char* name;
  const char* help;
  bool needs_source;
  Handler handler;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Entangled splittings of composite Hilbert spaces", "entsplit"};
  app.require_subcommand(1);
  app.fallthrough();

  const std::vector<Command> commands{
      {"verify", "Check a splitting and the entangledness of its subspaces", true, cmd_verify},
      {"detect", "Search product states in subspaces", true, cmd_detect},
      {"identify", "Local unambiguous identifiability (Property 1)", true, cmd_identify},
      {"classify", "Classify the induced state set", true, cmd_classify},
      {"eliminate", "Elimination table for a product basis", true, cmd_eliminate},
      {"measure", "Simulate the induced projective measurement on one input", true, cmd_measure},
      {"certify", "Entanglement generation by the induced measurement (Property 2)", true, cmd_certify},
      {"generate", "Bell-pairing splitting for even local dimensions", false, cmd_generate},
      {"search", "Randomized search for an entangled splitting with a given profile", false, cmd_search},
      {"fixtures", "List built-in fixtures", false, cmd_fixtures},
      {"regroup", "Relabel a splitting into new local dimensions", true, cmd_regroup},
      {"npt", "Partial-transpose negativity of random states in each subspace", true, cmd_npt},
  };

  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands) {
    CLI::App* s = app.add_subcommand(cmd.name, cmd.help);
    subs[cmd.name] = s;
    s->add_option("--fixture", o.fixture, "Built-in fixture id");
    s->add_option("--problem", o.problem, "Problem file (JSON)");
    s->add_option("--tol-product", o.tol_product, "Overlap deficit declaring a product state");
    s->add_option("--gap", o.gap, "Overlap deficit declaring entanglement");
    s->add_option("--restarts", o.restarts, "Optimizer restarts");
    s->add_option("--max-iters", o.max_iters, "Sweeps per restart");
    s->add_option("--samples", o.samples, "Sampled inputs or states");
    s->add_option("--seed", o.seed, "Master seed");
    s->add_option("--mode", o.mode, "bipartite, ces or ges");
    s->add_flag("--json", o.json, "Machine-readable report");
    s->add_option("--index", o.index, "1-based subspace index");
    s->add_option("--basis", o.basis, "Outcome basis for eliminate");
    s->add_option("--dims", o.dims, "Local dimensions, comma separated")->delimiter(',');
    s->add_option("--profile", o.profile, "Requested subspace dimensions, comma separated")->delimiter(',');
    s->add_option("--budget", o.budget, "Candidate checks for search");
    s->add_option("--new-dims", o.new_dims, "Target local dimensions for regroup")->delimiter(',');
    s->add_option("--input", o.input, "Measurement input: basis labels or 'random'");
    s->add_option("--outcome", o.outcome, "Force a 1-based measurement outcome");
    s->add_option("--export", o.export_path, "Write the resulting splitting as a problem file");
  }

  if (!args.empty() && !args.front().starts_with('-') && !subs.contains(args.front())) {
    err << "error: unknown command '" << args.front() << "'\n";
    return kUsageError;
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kHolds;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  const Command* chosen = nullptr;
  for (const auto& cmd : commands) {
    if (subs[cmd.name]->parsed()) chosen = &cmd;
  }
  try {
    Context ctx = resolve(o, chosen->needs_source);
    std::ostringstream text;
    Outcome res = chosen->handler(o, ctx, text);
    if (o.json) {
      json doc;
      doc["command"] = chosen->name;
      doc["source"] = ctx.source;
      doc["space"] = ctx.splitting ? json(ctx.splitting->space().to_string()) : json(nullptr);
      doc["settings"] = settings_json(ctx);
      doc["result"] = std::move(res.result);
      doc["exit_code"] = res.code;
      out << doc.dump(2) << "\n";
    } else {
      out << text.str();
    }
    return res.code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ProblemError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kUsageError;
}

}  // namespace entsplit::cli

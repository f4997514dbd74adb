// Command-line front end.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "bentcert/criteria.hpp"
#include "bentcert/error.hpp"
#include "bentcert/families.hpp"
#include "bentcert/hyptest.hpp"
#include "bentcert/io.hpp"
#include "bentcert/parallel.hpp"
#include "bentcert/reproduce.hpp"
#include "bentcert/simulate.hpp"

using namespace bentcert;
using io::json;

namespace {

struct Output {
  std::string subcommand;
  json parameters = json::object();
  std::uint64_t seed = 0;
  std::string path;  // empty: stdout
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void emit(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write " + path);
    f << text;
    io::RunManifest m;
    m.subcommand = subcommand;
    m.parameters = parameters;
    m.version = io::version();
    m.seed = seed;
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.output_sha256 = io::sha256_hex(text);
    std::ofstream(path + ".manifest.json") << io::to_json(m).dump(2) << '\n';
  }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_state(const std::string& path, const qmat::BipartiteOperator& rho) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write " + path);
  f << io::to_json(rho).dump() << '\n';
}

std::string radius_text(const criteria::RadiusReport& r) {
  std::ostringstream s;
  s << "lambda_min(rho)     " << io::format_double(r.lambda_min_rho) << "\n"
    << "lambda_min(Gamma)   " << io::format_double(r.lambda_min_pt) << "\n"
    << "||R(rho)||_1        " << io::format_double(r.ccnr) << "\n"
    << "r_a                 " << io::format_double(r.r_a) << "\n"
    << "r_b                 " << io::format_double(r.r_b) << "\n"
    << "r                   " << io::format_double(r.r) << "\n";
  return s.str();
}

// a:b:step, or a single value.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidInput("bad number '" + item + "' in --n");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) throw InvalidInput("--n expects a:b:step");
  std::vector<double> out;
  for (double v = parts[0]; v <= parts[1] * (1 + 1e-12); v += parts[2]) out.push_back(v);
  return out;
}

json qutrit_json(const families::QutritOptimum& o) {
  return {{"a", o.params.a},     {"b", o.params.b},         {"c", o.params.c},       {"r", o.r},
          {"r_a", o.r_a},        {"r_b", o.r_b},            {"starts", o.starts},    {"evaluations", o.evaluations},
          {"refined", o.refined}};
}

json tail_json(const families::BlochCoeffs& x) {
  const auto t = x.tail();
  return std::vector<double>(t.begin(), t.end());
}

json histogram_json(const std::map<int, int>& h) {
  json j = json::object();
  for (auto [k, v] : h) j[std::to_string(k)] = v;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certifying bound entanglement with Hilbert-Schmidt balls"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  int workers = 0;
  std::string out_path;
  app.add_flag("--json", as_json, "Structured output");
  app.add_option("--workers", workers, "Worker threads (also capped by BENTCERT_WORKERS)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_path, "Write the result here and a manifest next to it");

  std::string state_path;
  auto* radius = app.add_subcommand("radius", "Ball radius of a state");
  radius->add_option("--state", state_path, "State JSON")->required()->check(CLI::ExistingFile);

  double probe_r = -1.0;
  std::string direction = "ppt";
  auto* probe = app.add_subcommand("probe", "Move from a state towards the PPT or CCNR boundary");
  probe->add_option("--state", state_path, "State JSON")->required()->check(CLI::ExistingFile);
  probe->add_option("--r", probe_r, "Distance (default: the state's radius)");
  probe->add_option("--direction", direction)->check(CLI::IsMember({"ppt", "ccnr"}));

  auto* optimize = app.add_subcommand("optimize", "Maximize the radius over a state family");
  optimize->require_subcommand(1);
  std::string emit_state;
  bool horodecki = false;
  auto* opt_qutrit = optimize->add_subcommand("qutrit", "Two-qutrit family");
  opt_qutrit->add_flag("--horodecki", horodecki, "Restrict to a = 2/7");
  opt_qutrit->add_option("--emit-state", emit_state, "Write the optimal state as JSON");
  std::string mode = "symmetric";
  auto* opt_ququart = optimize->add_subcommand("ququart", "Bloch-diagonal two-ququart family");
  opt_ququart->add_option("--mode", mode)->check(CLI::IsMember({"symmetric", "lp", "census"}));
  opt_ququart->add_option("--emit-state", emit_state, "Write the optimal state as JSON");

  std::string family, covariance = "target";
  bool diagnostic = false;
  double noise = 0.0, r0 = -1.0;
  auto* plan_cmd = app.add_subcommand("plan", "Test constants for a target and measurement model");
  plan_cmd->add_option("--family", family)->required()->check(CLI::IsMember({"qutrit", "ququart"}));
  plan_cmd->add_option("--noise", noise, "White-noise fraction of the preparation")->required()->check(CLI::Range(0.0, 1.0));
  plan_cmd->add_option("--state", state_path, "Target state (default: the family optimum)")->check(CLI::ExistingFile);
  plan_cmd->add_option("--r0", r0, "Ball radius (default: computed from the target)");
  plan_cmd->add_option("--covariance", covariance)->check(CLI::IsMember({"target", "prepared"}));
  plan_cmd->add_flag("--diagnostic", diagnostic, "Report c1, c2 for both covariance choices");

  std::string plan_path, n_spec, counts_path;
  double sigma = 3.0, target = -1.0;
  auto* pfail = app.add_subcommand("pfail", "Failure probability against n");
  pfail->add_option("--plan", plan_path)->required()->check(CLI::ExistingFile);
  pfail->add_option("--sigma", sigma)->check(CLI::PositiveNumber);
  pfail->add_option("--n", n_spec, "n or a:b:step");
  pfail->add_option("--target", target, "Also report the smallest n with p_fail <= target");

  auto* pvalue = app.add_subcommand("pvalue", "Evaluate measured counts");
  pvalue->add_option("--plan", plan_path)->required()->check(CLI::ExistingFile);
  pvalue->add_option("--counts", counts_path)->required()->check(CLI::ExistingFile);

  std::int64_t sim_n = 0;
  int trials = 2000;
  std::uint64_t seed = 1;
  std::string sampling = "multinomial", emit_counts;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo failure rate");
  sim->add_option("--plan", plan_path)->required()->check(CLI::ExistingFile);
  sim->add_option("--n", sim_n)->required()->check(CLI::PositiveNumber);
  sim->add_option("--sigma", sigma)->check(CLI::PositiveNumber);
  sim->add_option("--trials", trials)->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed);
  sim->add_option("--sampling", sampling)->check(CLI::IsMember({"multinomial", "poisson"}));
  sim->add_option("--emit-counts", emit_counts, "Write the counts of the first trial");

  std::string figure;
  bool all = false, census = false;
  auto* repro = app.add_subcommand("reproduce", "Regenerate reference numbers");
  auto* fig_opt = repro->add_option("--figure", figure)->check(CLI::IsMember({"2a", "2b"}));
  auto* all_opt = repro->add_flag("--all", all, "Every reference number with pass/fail");
  repro->add_flag("--census", census, "Include the vertex census (slow)");
  fig_opt->excludes(all_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Output out;
    out.path = out_path;
    const auto wk = worker_count(workers);
    if (*radius) {
      out.subcommand = "radius";
      out.parameters = {{"state", state_path}};
      const auto rho = io::operator_from_json(io::read_json_file(state_path));
      const auto r = criteria::ball_radius(rho);
      out.emit(as_json ? dump(io::to_json(r)) : radius_text(r));
    } else if (*probe) {
      out.subcommand = "probe";
      const auto rho = io::operator_from_json(io::read_json_file(state_path));
      if (probe_r < 0.0) probe_r = criteria::ball_radius(rho).r;
      out.parameters = {{"state", state_path}, {"r", probe_r}, {"direction", direction}};
      const auto p = criteria::probe_boundary(
          rho, probe_r, direction == "ppt" ? criteria::ProbeDirection::ppt : criteria::ProbeDirection::ccnr);
      json j = {{"r", probe_r},
                {"direction", direction},
                {"lambda_min_pt", p.lambda_min_pt},
                {"ccnr", p.ccnr},
                {"lambda_min_rho", p.lambda_min_rho},
                {"degeneracy", p.degeneracy}};
      if (as_json) {
        out.emit(dump(j));
      } else {
        out.emit("lambda_min(Gamma)   " + io::format_double(p.lambda_min_pt) + "\n||R||_1             " +
                 io::format_double(p.ccnr) + "\nlambda_min          " + io::format_double(p.lambda_min_rho) + "\n");
      }
    } else if (*opt_qutrit) {
      out.subcommand = "optimize qutrit";
      out.parameters = {{"horodecki", horodecki}};
      const auto o = horodecki ? families::optimize_qutrit_horodecki() : families::optimize_qutrit();
      if (!emit_state.empty()) write_state(emit_state, families::qutrit_state(o.params));
      json j = qutrit_json(o);
      j["rank"] = families::state_rank(families::qutrit_state(o.params));
      out.emit(dump(j));
    } else if (*opt_ququart) {
      out.subcommand = "optimize ququart";
      out.parameters = {{"mode", mode}, {"workers", wk}};
      json j;
      families::BlochCoeffs best;
      if (mode == "symmetric") {
        const auto s = families::optimize_ququart_symmetric();
        best = s.example;
        j = {{"s_star", s.s_star}, {"r_star", s.r_star}, {"x", tail_json(s.example)}};
      } else {
        families::LpSweepOptions o;
        o.workers = wk;
        if (!as_json)
          o.progress = [](std::uint32_t done, std::uint32_t total) {
            std::fprintf(stderr, "\r%u/%u orthants", done, total);
            if (done == total) std::fputc('\n', stderr);
          };
        const auto r =
            families::optimize_ququart_lp(mode == "lp" ? families::LpMode::max_only : families::LpMode::census, o);
        best = r.maximizer;
        j = {{"r_star", r.r_star},
             {"maximizer", tail_json(r.maximizer)},
             {"maximizer_orthant", r.maximizer_orthant},
             {"orthants", r.orthants},
             {"infeasible_orthants", r.infeasible_orthants},
             {"positive_orthants", r.positive_orthants},
             {"optimal_orthants", r.optimal_orthants},
             {"pivots", r.pivots}};
        if (mode == "census") {
          j["dedup_tol"] = o.dedup_tol;
          j["optimal_tol"] = o.optimal_tol;
          j["optimal_vertices"] = r.optimal_vertices.size();
          j["optimal_face_vertices"] = r.optimal_face_vertex_count;
          j["optimal_rank_histogram"] = histogram_json(r.optimal_rank_histogram);
          j["min_rank_optimal"] = r.min_rank_optimal;
          j["positive_vertices"] = r.positive_vertex_count;
          j["positive_rank_histogram"] = histogram_json(r.positive_rank_histogram);
          j["min_rank_positive"] = r.min_rank_positive;
          j["min_rank_positive_example"] = {{"x", tail_json(r.min_rank_positive_example.x)},
                                            {"r", r.min_rank_positive_example.r},
                                            {"radius", r.min_rank_positive_example.radius}};
          j["flagged_vertices"] = r.flagged_vertices;
        }
      }
      j["rank"] = families::bloch_rank(best);
      if (!emit_state.empty()) write_state(emit_state, families::bloch_state(best));
      out.emit(dump(j));
    } else if (*plan_cmd) {
      out.subcommand = "plan";
      out.parameters = {{"family", family}, {"noise", noise}, {"covariance", covariance}};
      const bool q3 = family == "qutrit";
      const auto model = q3 ? hyptest::mub_model_qutrit() : hyptest::pauli_pair_model_ququart();
      qmat::BipartiteOperator rho = q3 ? families::qutrit_state(families::optimize_qutrit().params)
                                       : families::bloch_state(families::rank10_example());
      if (!state_path.empty()) {
        rho = io::operator_from_json(io::read_json_file(state_path));
        out.parameters["state"] = state_path;
      }
      if (r0 < 0.0) r0 = criteria::ball_radius(rho).r;
      out.parameters["r0"] = r0;
      hyptest::PlanOptions po;
      po.covariance = covariance == "target" ? hyptest::CovarianceAt::target : hyptest::CovarianceAt::prepared;
      const auto tp = hyptest::plan(model, rho, r0, noise, po);
      if (!tp.useful()) std::cerr << "warning: c1 <= c2, the test cannot gain power with n\n";
      if (diagnostic) {
        json j = {{"m", tp.m}, {"r0", tp.r0}, {"noise", noise}};
        for (auto at : {hyptest::CovarianceAt::target, hyptest::CovarianceAt::prepared}) {
          po.covariance = at;
          const auto v = hyptest::plan(model, rho, r0, noise, po);
          j[at == hyptest::CovarianceAt::target ? "target" : "prepared"] = {{"c1", v.c1}, {"c2", v.c2}};
        }
        out.emit(dump(j));
      } else if (as_json || !out_path.empty()) {
        out.emit(dump(io::to_json(tp)));
      } else {
        out.emit("m    " + std::to_string(tp.m) + "\nc1   " + io::format_double(tp.c1) + "\nc2   " +
                 io::format_double(tp.c2) + "\nr0   " + io::format_double(tp.r0) + "\n");
      }
    } else if (*pfail) {
      out.subcommand = "pfail";
      out.parameters = {{"plan", plan_path}, {"sigma", sigma}, {"n", n_spec}, {"target", target}};
      const auto tp = io::plan_from_json(io::read_json_file(plan_path));
      if (n_spec.empty() && target < 0.0) throw InvalidInput("pfail needs --n and/or --target");
      const auto grid = n_spec.empty() ? std::vector<double>{} : parse_grid(n_spec);
      if (!tp.useful()) std::cerr << "warning: c1 <= c2, the test cannot gain power with n\n";
      if (as_json) {
        json rows = json::array();
        for (double n : grid) {
          const auto f = hyptest::p_fail(tp, sigma, n);
          rows.push_back({{"n", n}, {"p_fail", f.p_fail}, {"t0_sq", f.t0_sq}});
        }
        json j = {{"sigma", sigma}, {"p0", hyptest::significance(sigma)}, {"rows", rows}};
        if (target >= 0.0) j["required_n"] = hyptest::required_samples(tp.m, tp.c1, tp.c2, sigma, target);
        out.emit(dump(j));
      } else {
        io::CsvWriter csv({"n", "p_fail"});
        for (double n : grid) csv.row({n, hyptest::p_fail(tp, sigma, n).p_fail});
        std::string text = grid.empty() ? std::string() : csv.str();
        if (target >= 0.0)
          text += "# required n for p_fail <= " + io::format_double(target) + ": " +
                  io::format_double(hyptest::required_samples(tp.m, tp.c1, tp.c2, sigma, target)) + "\n";
        out.emit(text);
      }
    } else if (*pvalue) {
      out.subcommand = "pvalue";
      out.parameters = {{"plan", plan_path}, {"counts", counts_path}};
      const auto tp = io::plan_from_json(io::read_json_file(plan_path));
      const auto counts = io::counts_from_json(io::read_json_file(counts_path), tp);
      const double t = hyptest::test_statistic(tp, counts);
      const double p = hyptest::p_value(tp, counts);
      if (as_json)
        out.emit(dump({{"t", t}, {"t_sq", t * t}, {"p_value", p}, {"m", tp.m}}));
      else
        out.emit("t        " + io::format_double(t) + "\np_value  " + io::format_double(p) + "\n");
    } else if (*sim) {
      out.subcommand = "simulate";
      out.seed = seed;
      out.parameters = {{"plan", plan_path}, {"n", sim_n},         {"sigma", sigma},
                        {"trials", trials},  {"seed", seed},       {"sampling", sampling}};
      simulate::SimConfig cfg;
      cfg.plan = io::plan_from_json(io::read_json_file(plan_path));
      cfg.n = sim_n;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.sampling = sampling == "poisson" ? simulate::Sampling::poisson : simulate::Sampling::multinomial;
      cfg.workers = wk;
      if (!emit_counts.empty()) {
        std::ofstream f(emit_counts);
        if (!f) throw InvalidInput("cannot write " + emit_counts);
        f << io::counts_to_json(simulate::sample_counts(cfg, cfg.plan.p_prepared, 0), cfg.plan).dump() << '\n';
      }
      out.emit(dump(io::to_json(simulate::empirical_pfail(cfg, sigma))));
    } else if (*repro) {
      out.subcommand = "reproduce";
      if (!figure.empty()) {
        out.parameters = {{"figure", figure}};
        out.emit(reproduce::figure2_csv(figure[1]));
      } else if (all) {
        out.parameters = {{"all", true}, {"census", census}};
        reproduce::Options ro;
        ro.census = census;
        ro.workers = wk;
        if (!as_json)
          ro.on_check = [](const reproduce::Check& c) {
            std::fprintf(stderr, "%s %s\n", c.skipped ? "SKIP" : c.pass() ? "PASS" : "FAIL", c.name.c_str());
          };
        const auto checks = reproduce::all_checks(ro);
        int failed = 0;
        json rows = json::array();
        std::string text;
        for (const auto& c : checks) {
          if (!c.skipped && !c.pass()) ++failed;
          rows.push_back({{"name", c.name}, {"value", c.value}, {"lo", c.lo}, {"hi", c.hi},
                          {"status", c.skipped ? "skip" : c.pass() ? "pass" : "fail"}, {"note", c.note}});
          text += std::string(c.skipped ? "SKIP" : c.pass() ? "PASS" : "FAIL") + "  " + c.name;
          if (!c.skipped)
            text += "  " + io::format_double(c.value) + "  in [" + io::format_double(c.lo) + ", " +
                    io::format_double(c.hi) + "]";
          if (!c.note.empty()) text += "  (" + c.note + ")";
          text += "\n";
        }
        out.emit(as_json ? dump({{"checks", rows}, {"failed", failed}}) : text);
        return failed ? 1 : 0;
      } else {
        std::cerr << "reproduce: give --figure 2a|2b or --all\n";
        return 2;
      }
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

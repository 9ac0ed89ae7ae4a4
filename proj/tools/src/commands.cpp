#include "rankdeg_cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rankdeg/examples.hpp"

namespace rankdeg::cli {

using nlohmann::json;

namespace {

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

Interval pick_interval(const std::optional<Interval>& given, Interval domain) {
  const Interval span = given.value_or(domain);
  if (!(span.hi > span.lo)) throw InvalidInput("--interval: need a < b");
  if (!domain.contains(span.lo, domain_slack(span.lo)) || !domain.contains(span.hi, domain_slack(span.hi))) {
    throw DomainError("--interval lies outside the problem domain");
  }
  return span;
}

Interval domain_of(const Problem& p) {
  return std::visit([](const auto& q) { return q.domain(); }, p);
}

SemiNonlinearDAE as_semi_nonlinear(const LinearDAE& p) {
  SemiNonlinearDAE q;
  q.r = p.r;
  q.t_start = p.t_start;
  q.T = p.T;
  q.A = p.A;
  q.F = [B = p.B](double t, const Vec& y) { return Vec(B(t) * y); };
  q.F_y = [B = p.B](double t, const Vec&) { return B(t); };
  q.f = p.f;
  q.y0 = p.y0;
  q.exact = p.exact;
  return q;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + path.string() + "'");
  f << text;
}

void emit(const json& doc, const std::string& text_form, const std::string& format, const std::string& out_path,
          std::ostream& out) {
  const std::string body = format == "text" ? text_form : doc.dump(2) + "\n";
  if (out_path.empty()) {
    out << body;
  } else {
    write_file(out_path, body);
  }
}

std::string profile_line(const IndexProfile& p) {
  std::ostringstream os;
  os << to_string(p.classification);
  if (p.index) os << ", index " << *p.index;
  if (!p.critical_points.empty()) {
    os << ", critical point" << (p.critical_points.size() > 1 ? "s" : "");
    for (size_t i = 0; i < p.critical_points.size(); ++i) os << (i ? ", " : " ") << p.critical_points[i];
  }
  return os.str();
}

}  // namespace

json to_json(const IndexReport& r) {
  json levels = json::array();
  for (const ChainLevel& l : r.levels) {
    json det = json::array();
    for (const auto& [t, d] : l.det_sample) det.push_back({t, d});
    const double t0 = r.grid.empty() ? 0.0 : r.grid.front();
    levels.push_back({{"level", l.level}, {"rank", l.rank}, {"A_at_start", matrix_json(l.pair.A(t0))}, {"det", det}});
  }
  return {{"nu", optional_int(r.nu)},
          {"status", to_string(r.status)},
          {"failed_level", r.failed_level},
          {"failed_at", std::isnan(r.failed_at) ? json(nullptr) : json(r.failed_at)},
          {"tol", r.tol},
          {"grid_points", r.grid.size()},
          {"diagnosis", r.diagnosis},
          {"levels", levels}};
}

json to_json(const IndexProfile& p) {
  json nu = json::array();
  for (const auto& v : p.nu_at) nu.push_back(optional_int(v));
  json evidence = json::array();
  for (size_t i = 0; i < p.structure_evidence.size() && i < 20; ++i) {
    const StructureEvidence& e = p.structure_evidence[i];
    evidence.push_back({{"t", e.t},
                        {"eta", std::vector<double>(e.eta.data(), e.eta.data() + e.eta.size())},
                        {"nu", optional_int(e.nu)},
                        {"source", e.source}});
  }
  return {{"summary", profile_line(p)},
          {"classification", to_string(p.classification)},
          {"index", optional_int(p.index)},
          {"critical_points", p.critical_points},
          {"times", p.times},
          {"nu_at", nu},
          {"neighborhood_eps", p.neighborhood_eps},
          {"samples_per_point", p.samples_per_point},
          {"seed", p.seed},
          {"structure_evidence_count", p.structure_evidence.size()},
          {"structure_evidence", evidence},
          {"undefined_samples", p.undefined_samples},
          {"total_samples", p.total_samples}};
}

json analyze(const ResolvedProblem& rp, std::optional<Interval> interval, int grid_points) {
  LinearIAE iae;
  if (const auto* p = std::get_if<LinearIAE>(&rp.problem)) {
    iae = *p;
  } else if (const auto* p = std::get_if<LinearDAE>(&rp.problem)) {
    iae = dae_to_iae(*p);
  } else {
    throw InvalidInput("analyze: '" + rp.name + "' is nonlinear; use classify");
  }
  const Interval span = pick_interval(interval, iae.domain());
  const IndexReport rep = rank_degree_index(iae.A, iae.k, uniform_grid(span, grid_points));
  json doc = to_json(rep);
  doc["problem"] = rp.name;
  doc["kind"] = kind_of(rp.problem);
  doc["interval"] = {span.lo, span.hi};
  json consistency = nullptr;
  if (rep.status == ChainStatus::ok && rep.nu && *rep.nu >= 1) {
    try {
      const ConsistencyReport c = consistency_check(rep, rhs_chain(iae.f, rep), 1e-8, span.lo);
      json conds = json::array();
      for (const ConsistencyCondition& cc : c.conditions) {
        conds.push_back({{"level", cc.level}, {"residual", cc.residual}, {"passed", cc.passed}});
      }
      consistency = {{"t0", c.t0},
                     {"passed", c.passed},
                     {"tol", 1e-8},
                     {"condition_number", c.condition_number},
                     {"ill_conditioned", c.ill_conditioned},
                     {"conditions", conds}};
    } catch (const Error& e) {
      consistency = {{"error", e.what()}};
    }
  }
  doc["consistency"] = consistency;
  return doc;
}

json classify_problem(const ResolvedProblem& rp, std::optional<Interval> interval, const ClassifyOptions& opt) {
  NonlinearProblem np;
  std::optional<VectorFn> exact;
  Vec y0;
  if (const auto* p = std::get_if<SemiNonlinearDAE>(&rp.problem)) {
    np = *p;
    exact = p->exact;
    y0 = p->y0;
  } else if (const auto* p = std::get_if<SemiNonlinearIAE>(&rp.problem)) {
    np = *p;
    exact = p->exact;
  } else {
    throw InvalidInput("classify: '" + rp.name + "' is linear; use analyze");
  }
  const Interval dom = domain_of(rp.problem);
  const Interval span = pick_interval(interval, dom);
  TrajectorySample traj;
  std::string source;
  if (exact) {
    traj = TrajectorySample::from_function(*exact, dom, 2001);
    source = "exact";
  } else if (y0.size() > 0) {
    traj = TrajectorySample::constant(y0, dom);
    source = "constant y0";
  } else {
    throw InvalidInput("classify: '" + rp.name + "' has neither an exact solution nor y0");
  }
  json doc;
  try {
    doc = to_json(classify(np, traj, span, opt));
  } catch (const ClassificationError& e) {
    doc = {{"summary", "unclassified"}, {"error", e.what()}};
  }
  doc["problem"] = rp.name;
  doc["kind"] = kind_of(rp.problem);
  doc["interval"] = {span.lo, span.hi};
  doc["trajectory"] = source;
  return doc;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank-degree index analysis and solvers for DAEs and integral-algebraic equations", "rankdeg"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  std::string problem;
  std::vector<double> interval;
  double h = 0.0;
  std::vector<double> c;
  int order = 1;
  double eps = 0.1;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string out_dir = "rankdeg_out";
  std::string format = "json";

  const auto add_problem = [&](CLI::App* s) {
    s->add_option("--problem", problem, "Registered example name or problem JSON file")->required();
  };
  const auto add_interval = [&](CLI::App* s) {
    s->add_option("--interval", interval, "Interval: a b or a,b")->expected(2)->delimiter(',');
  };
  const auto add_format = [&](CLI::App* s) {
    s->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
  };

  CLI::App* list = app.add_subcommand("list", "List registered examples");
  add_format(list);

  CLI::App* an = app.add_subcommand("analyze", "Rank-degree index of a linear problem");
  add_problem(an);
  add_interval(an);
  add_format(an);
  an->add_option("--out", out_path, "Write the report to this file");

  CLI::App* cl = app.add_subcommand("classify", "Structure and form of a nonlinear problem");
  add_problem(cl);
  add_interval(cl);
  add_format(cl);
  cl->add_option("--eps", eps, "Neighbourhood radius")->check(CLI::PositiveNumber);
  cl->add_option("--seed", seed, "Sampling seed");
  cl->add_option("--out", out_path, "Write the profile to this file");

  CLI::App* sd = app.add_subcommand("solve-dae", "BDF solve of a DAE");
  add_problem(sd);
  add_interval(sd);
  sd->add_option("--h", h, "Step size")->check(CLI::PositiveNumber);
  sd->add_option("--order", order, "BDF order")->check(CLI::IsMember({1, 2}));
  sd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  CLI::App* si = app.add_subcommand("solve-iae", "Collocation solve of an IAE");
  add_problem(si);
  add_interval(si);
  si->add_option("--h", h, "Mesh size")->check(CLI::PositiveNumber);
  si->add_option("--c", c, "Collocation parameters c1,...,cm")->delimiter(',');
  si->add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string target;
  CLI::App* rp = app.add_subcommand("reproduce", "Run one of the reference experiments fig1..fig5");
  rp->add_option("target", target, "fig1 | fig2 | fig3 | fig4 | fig5")->required();
  add_interval(rp);
  rp->add_option("--h", h, "Step or mesh size")->check(CLI::PositiveNumber);
  rp->add_option("--c", c, "Collocation parameters")->delimiter(',');
  rp->add_option("--order", order, "BDF order")->check(CLI::IsMember({1, 2}));
  rp->add_option("--seed", seed, "Seed (the experiments are deterministic)");
  rp->add_option("--out", out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "rankdeg: " << e.what() << "\n";
    return kExitInvalid;
  }

  const auto given_interval = [&]() -> std::optional<Interval> {
    if (interval.empty()) return std::nullopt;
    return Interval{interval[0], interval[1]};
  };

  try {
    if (*list) {
      json doc = json::array();
      std::ostringstream text;
      for (const ExampleInfo& e : list_examples()) {
        doc.push_back({{"name", e.name}, {"kind", e.kind}, {"description", e.description}});
        text << e.name << "  [" << e.kind << "]  " << e.description << "\n";
      }
      emit(doc, text.str(), format, "", out);
      return kExitOk;
    }
    if (*an) {
      const json doc = analyze(resolve_problem(problem), given_interval());
      std::ostringstream text;
      text << doc["problem"].get<std::string>() << ": nu = " << (doc["nu"].is_null() ? "undefined" : doc["nu"].dump())
           << " (" << doc["status"].get<std::string>() << ")";
      if (doc["consistency"].is_object() && doc["consistency"].contains("passed")) {
        text << ", consistency " << (doc["consistency"]["passed"].get<bool>() ? "passed" : "failed");
      }
      text << "\n";
      emit(doc, text.str(), format, out_path, out);
      return kExitOk;
    }
    if (*cl) {
      ClassifyOptions opt;
      opt.eps = eps;
      opt.seed = seed;
      const json doc = classify_problem(resolve_problem(problem), given_interval(), opt);
      emit(doc, doc["summary"].get<std::string>() + "\n", format, out_path, out);
      return kExitOk;
    }
    if (*sd || *si) {
      const ResolvedProblem res = resolve_problem(problem);
      const std::filesystem::path dir(out_dir);
      json diag;
      std::string csv;
      if (*sd) {
        SemiNonlinearDAE p;
        if (const auto* q = std::get_if<SemiNonlinearDAE>(&res.problem)) {
          p = *q;
        } else if (const auto* q = std::get_if<LinearDAE>(&res.problem)) {
          p = as_semi_nonlinear(*q);
        } else {
          throw InvalidInput("solve-dae: '" + res.name + "' is not a DAE");
        }
        const Interval span = pick_interval(given_interval(), p.domain());
        DaeSolveConfig cfg;
        if (h > 0) cfg.h = h;
        cfg.order = order;
        cfg.monitor = p.critical_conditions;
        DaeSolveResult r;
        try {
          r = solve_dae(p, cfg, span);
        } catch (const InvalidInput&) {
          throw;
        } catch (const Error& e) {
          r.failure = DaeFailure{span.lo, e.what(), 1};
        }
        csv = solution_csv(r.times, r.values, p.exact);
        diag = to_json(r);
        diag["config"] = {{"method", "BDF" + std::to_string(cfg.order)}, {"h", cfg.h}};
        if (p.exact && !r.times.empty()) diag["max_error"] = max_error(r.times, r.values, *p.exact, span.lo, span.hi);
        diag["interval"] = {span.lo, span.hi};
      } else {
        CollocationConfig cfg;
        if (h > 0) cfg.h = h;
        if (!c.empty()) cfg.c = c;
        validate(cfg);
        IaeSolveResult r;
        std::optional<VectorFn> exact;
        Interval span;
        try {
          if (const auto* q = std::get_if<SemiNonlinearIAE>(&res.problem)) {
            span = pick_interval(given_interval(), q->domain());
            exact = q->exact;
            r = solve_iae(*q, cfg, span);
          } else if (const auto* q = std::get_if<LinearIAE>(&res.problem)) {
            span = pick_interval(given_interval(), q->domain());
            exact = q->exact;
            r = solve_iae(*q, cfg, span);
          } else {
            throw InvalidInput("solve-iae: '" + res.name + "' is not an IAE");
          }
        } catch (const InvalidInput&) {
          throw;
        } catch (const DomainError&) {
          throw;
        } catch (const Error& e) {
          r.failure = CollocationFailure{0, span.lo, e.what()};
        }
        const std::vector<double> ts = sample_times(r.solution, std::max(1, 10 * r.solution.intervals()));
        std::vector<Vec> vs;
        for (double t : ts) vs.push_back(r.solution(t));
        csv = solution_csv(ts, vs, exact);
        diag = to_json(r);
        diag["config"] = {{"method", "collocation"}, {"c", cfg.c}, {"h", cfg.h}};
        if (exact && !ts.empty()) diag["max_error"] = max_error(ts, vs, *exact, span.lo, span.hi);
        diag["interval"] = {span.lo, span.hi};
      }
      diag["problem"] = res.name;
      write_file(dir / "solution.csv", csv);
      write_file(dir / "diagnostics.json", diag.dump(2) + "\n");
      out << diag.dump(2) << "\n";
      return kExitOk;
    }
    if (*rp) {
      RunOverrides ov;
      ov.interval = given_interval();
      if (h > 0) ov.h = h;
      if (!c.empty()) ov.c = c;
      if (rp->count("--order")) ov.order = order;
      const ReproduceResult r = reproduce(target, ov);
      json summary = r.summary;
      summary["seed"] = seed;
      const std::filesystem::path dir(out_dir);
      write_file(dir / (target + ".csv"), r.csv);
      write_file(dir / (target + "_summary.json"), summary.dump(2) + "\n");
      out << summary.dump(2) << "\n";
      return kExitOk;
    }
  } catch (const NotFound& e) {
    err << "rankdeg: " << e.what() << "\n";
    return kExitUnknownProblem;
  } catch (const Error& e) {
    err << "rankdeg: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "rankdeg: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace rankdeg::cli

// odereduce: command-line front end.
//
// Exit status: 0 success / reduction found, 1 search finished without a
// reduction (or verification failed), 2 bad input, 3 time budget exceeded.

#include <odereduce/odereduce.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace odereduce;

namespace {

constexpr int kFound = 0;
constexpr int kNothing = 1;
constexpr int kInput = 2;
constexpr int kBudget = 3;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

void print_reduction(std::ostream& os, const Reduction& r) {
  os << "n = " << r.n << "\n";
  os << "A = " << render_poly(r.A) << "\n";
  os << "B = " << render_poly(r.B) << "\n";
  os << "c = " << render_poly(r.c) << "\n";
  os << "t = " << render_poly(r.t) << "\n";
  os << "ode: " << render_ode(r.t, r.f) << "\n";
}

void print_family(std::ostream& os, const SolutionFamily& fam) {
  os << "family: n = " << fam.n << ", cany = " << fam.cany << ", dim = " << fam.dim() << "\n";
  os << "  B = " << render_poly(fam.B) << "\n";
  for (std::size_t k = 0; k < fam.basis.size(); ++k) {
    os << "  generator " << k + 1 << ":\n";
    os << "    A = " << render_poly(fam.basis[k].A) << "\n";
    os << "    c = " << render_poly(fam.basis[k].c) << "\n";
  }
}

nlohmann::json family_to_json(const SolutionFamily& fam) {
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& m : fam.basis) basis.push_back({{"A", poly_to_json(m.A)}, {"c", poly_to_json(m.c)}});
  return {{"n", fam.n}, {"cany", fam.cany}, {"B", poly_to_json(fam.B)}, {"t", poly_to_json(fam.t)}, {"basis", basis}};
}

struct ReduceArgs {
  std::string file;
  int degree_a = 0;
  bool print_candidates = false;
  double max_seconds = 0;
  bool json = false;
  unsigned threads = 1;
};

int cmd_reduce(const ReduceArgs& a) {
  auto in = open_input(a.file);
  OdeProblem p = read_problem(in, Format::detect, false);
  if (a.degree_a > 0) p.degreeA = a.degree_a;
  if (p.degreeA < 1) throw InputError("degreeA must be >= 1 (use --degree-a)");
  ReducerOptions opt;
  opt.print_candidates = a.print_candidates || p.options.print_candidates;
  opt.max_seconds = a.max_seconds > 0 ? a.max_seconds : p.options.max_seconds.value_or(0);
  opt.threads = a.threads;
  DegreeTestResult res = degree_test(p.M, p.N, p.degreeA, opt);

  std::vector<Reduction> reds = res.reductions;
  std::stable_sort(reds.begin(), reds.end(), [](const Reduction& l, const Reduction& r) {
    if (l.n != r.n) return l.n < r.n;
    return render_poly(l.B) < render_poly(r.B);
  });
  const bool show_families = opt.print_candidates;

  if (a.json) {
    nlohmann::json out{{"reductions", nlohmann::json::array()}};
    for (const auto& r : reds) out["reductions"].push_back(reduction_to_json(r));
    if (show_families) {
      out["families"] = nlohmann::json::array();
      for (const auto& f : res.families) out["families"].push_back(family_to_json(f));
    }
    std::cout << out.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < reds.size(); ++i) {
      if (i) std::cout << "\n";
      print_reduction(std::cout, reds[i]);
    }
    if (reds.empty()) std::cout << "no reduction found for degreeA = " << p.degreeA << "\n";
    if (show_families)
      for (const auto& f : res.families) print_family(std::cout, f);
  }
  return reds.empty() ? kNothing : kFound;
}

int cmd_expand(const std::string& file, const std::string& out_path) {
  auto in = open_input(file);
  GenSpec s = read_spec(in);
  Expansion e;
  try {
    e = expand_transform(s);
  } catch (const std::invalid_argument& ex) {
    throw InputError(ex.what());
  }
  OdeProblem p{e.M, e.N, s.A.is_zero() ? 0 : s.A.max_degree(Var::total), {}};
  std::string text = write_problem_text(p) + "# c = " + render_poly(e.c) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write " + out_path);
    out << text;
  }
  return kFound;
}

int cmd_factor(const std::string& expr) {
  const BiPoly p = parse_poly(expr);
  if (p.is_zero()) throw InputError("cannot factor the zero polynomial");
  const Factorization f = factor_bivar(p);
  std::string s;
  if (f.unit != 1 || f.factors.empty()) s = to_string(f.unit);
  for (const auto& q : f.factors) {
    if (!s.empty()) s += "*";
    s += "(" + render_poly(q.poly) + ")";
    if (q.mult > 1) s += "^" + std::to_string(q.mult);
  }
  std::cout << s << "\n";
  return kFound;
}

int cmd_verify(const std::string& problem_file, const std::string& cert_file) {
  auto pin = open_input(problem_file);
  OdeProblem p = read_problem(pin, Format::detect, false);
  auto cin = open_input(cert_file);
  Reduction r = read_reduction(cin);
  const bool ok = verify_reduction(p.M, p.N, r);
  std::cout << (ok ? "verified" : "not verified") << "\n";
  return ok ? kFound : kNothing;
}

struct GenArgs {
  int count = 10;
  std::uint64_t seed = 1;
  int n = 3;
  int max_degree = 4;
  std::string out = "corpus";
  bool json = false;
};

int cmd_gen_corpus(const GenArgs& a) {
  fs::create_directories(a.out);
  nlohmann::json manifest{{"seed", a.seed}, {"n", a.n}, {"max_degree", a.max_degree}, {"instances", nlohmann::json::array()}};
  for (int k = 0; k < a.count; ++k) {
    const std::uint64_t seed = a.seed * 1000003ULL + static_cast<std::uint64_t>(k);
    Instance inst;
    try {
      inst = random_instance(a.n, a.max_degree, seed);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    std::ostringstream name;
    name << "instance_" << std::setw(4) << std::setfill('0') << k << (a.json ? ".json" : ".txt");
    std::ofstream out(fs::path(a.out) / name.str());
    if (!out) throw InputError("cannot write into " + a.out);
    if (a.json) {
      out << problem_to_json(inst.problem).dump() << "\n";
    } else {
      out << write_problem_text(inst.problem);
    }
    manifest["instances"].push_back(manifest_entry(name.str(), inst));
  }
  std::ofstream mf(fs::path(a.out) / "manifest.json");
  mf << manifest.dump(2) << "\n";
  std::cout << "wrote " << a.count << " instances to " << a.out << "\n";
  return kFound;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduce rational ODEs y' = M/N to polynomial-in-y form by a rational substitution"};
  app.require_subcommand(1);

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "search for a reduction of a problem file");
  reduce->add_option("file", ra.file, "problem file (text or JSON)")->required();
  reduce->add_option("--degree-a", ra.degree_a, "exact total degree of A (overrides the file)")->check(CLI::PositiveNumber);
  reduce->add_flag("--print-candidates", ra.print_candidates, "also print the parametric (A, c) families");
  reduce->add_option("--max-seconds", ra.max_seconds, "wall-clock budget")->check(CLI::PositiveNumber);
  reduce->add_flag("--json", ra.json, "structured output");
  reduce->add_option("--threads", ra.threads, "worker threads")->check(CLI::PositiveNumber);

  std::string spec_file, expand_out;
  auto* expand = app.add_subcommand("expand", "apply y -> A/B to a polynomial ODE and print the problem");
  expand->add_option("spec", spec_file, "spec file with n, A, B, t, f0..fn")->required();
  expand->add_option("-o,--out", expand_out, "output file (default stdout)");

  std::string expr;
  auto* factor = app.add_subcommand("factor", "factor a bivariate polynomial over Q");
  factor->add_option("expr", expr, "polynomial expression")->required();

  std::string vproblem, vcert;
  auto* verify = app.add_subcommand("verify", "check a certificate against a problem");
  verify->add_option("problem", vproblem)->required();
  verify->add_option("certificate", vcert)->required();

  GenArgs ga;
  auto* gen = app.add_subcommand("gen-corpus", "write random instances with known certificates");
  gen->add_option("--count", ga.count)->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", ga.seed);
  gen->add_option("--n", ga.n)->check(CLI::Range(3, 4));
  gen->add_option("--max-degree", ga.max_degree)->check(CLI::Range(2, 16));
  gen->add_option("--out", ga.out, "output directory");
  gen->add_flag("--json", ga.json, "write instances in JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInput;
  }

  try {
    if (*reduce) return cmd_reduce(ra);
    if (*expand) return cmd_expand(spec_file, expand_out);
    if (*factor) return cmd_factor(expr);
    if (*verify) return cmd_verify(vproblem, vcert);
    if (*gen) return cmd_gen_corpus(ga);
  } catch (const BudgetExceeded& e) {
    std::cerr << "odereduce: " << e.what() << "\n";
    return kBudget;
  } catch (const ParseError& e) {
    std::cerr << "odereduce: parse error: " << e.what() << "\n";
    return kInput;
  } catch (const InputError& e) {
    std::cerr << "odereduce: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}

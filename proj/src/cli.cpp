#include "microlimit/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>

#include "microlimit/charpoly.hpp"
#include "microlimit/common.hpp"
#include "microlimit/counts.hpp"
#include "microlimit/ensembles.hpp"
#include "microlimit/kernels.hpp"
#include "microlimit/limit_reference.hpp"
#include "microlimit/parallel.hpp"
#include "microlimit/resample.hpp"
#include "microlimit/rng.hpp"
#include "microlimit/stats.hpp"

namespace microlimit {

using ojson = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw InputError(what + ": cannot parse '" + text + "' as a number");
  }
  if (pos != text.size()) throw InputError(what + ": trailing characters in '" + text + "'");
  return v;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(trim(item), what));
  if (out.empty()) throw InputError(what + ": empty list");
  return out;
}

ojson complex_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

ojson summary_json(const CountSummary& s) {
  ojson j;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["stderrmean"] = s.stderrmean;
  j["stderrvar"] = s.stderrvar;
  j["replicas"] = s.replicas;
  j["oraclemean"] = s.oraclemean ? ojson(*s.oraclemean) : ojson(nullptr);
  j["oraclevar"] = s.oraclevar ? ojson(*s.oraclevar) : ojson(nullptr);
  return j;
}

ojson slope_json(const SlopeFit& f) {
  return ojson{{"slope", f.slope},
               {"stderr", f.stderr_slope},
               {"ci95", ojson::array({f.lo95, f.hi95})},
               {"intercept", f.intercept}};
}

// Output sink: a file when a path is given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InputError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_csv_header(std::ostream& os, const ojson& provenance, const std::string& units,
                      const std::string& columns) {
  os << "# provenance: " << provenance.dump() << "\n";
  os << "# units: " << units << "\n";
  os << columns << "\n";
}

struct Global {
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;
};

ojson provenance(const std::string& command, const Global& g, const ojson& config) {
  ojson p;
  p["tool"] = "microlimit";
  p["version"] = kVersion;
  p["command"] = command;
  p["masterseed"] = g.seed;
  p["config"] = config;
  return p;
}

// ---------------------------------------------------------------- selftest

struct Check {
  std::string name;
  std::function<bool()> run;
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::vector<Check> quick_checks() {
  std::vector<Check> c;
  c.push_back({"dirichlet removable singularity", [] { return dirichlet_s(5, 0.0) == 5.0; }});
  c.push_back({"dirichlet s_1 is 1", [] { return near(dirichlet_s(1, 0.37), 1.0, 1e-15); }});
  c.push_back({"dirichlet s_3(1/6) = 2", [] { return near(dirichlet_s(3, 1.0 / 6.0), 2.0, 1e-14); }});
  c.push_back({"psi_1(0) = 0", [] { return hermite_psi(1, 0.0)[1].value == 0.0; }});
  c.push_back({"psi_0(0)", [] {
                 return near(hermite_psi(0, 0.0)[0].value, std::pow(kTwoPi, -0.25), 1e-15);
               }});
  c.push_back({"SO(2n) diagonal at 0", [] {
                 return near(kernel_eval(KernelSpec(KernelFamily::SOEven, 4), 0.0, 0.0), 14.0, 1e-12);
               }});
  c.push_back({"SO(2n+1) K(0,0) = 0", [] {
                 return near(kernel_eval(KernelSpec(KernelFamily::SOOdd, 6), 0.0, 0.0), 0.0, 1e-12);
               }});
  c.push_back({"kernel symmetry", [] {
                 for (auto f : {KernelFamily::SOEven, KernelFamily::SOOdd, KernelFamily::Sp,
                                KernelFamily::GUE, KernelFamily::Sine}) {
                   KernelSpec k(f, 7);
                   if (kernel_eval(k, 0.11, 0.37) != kernel_eval(k, 0.37, 0.11)) return false;
                 }
                 return true;
               }});
  c.push_back({"semicircle", [] {
                 return semicircle_density(2.0) == 0.0 && near(semicircle_density(0.0), 1.0 / kPi, 1e-15);
               }});
  c.push_back({"principal value identity", [] {
                 return near(stieltjes_pv(1.0), -0.5, 1e-6) && near(stieltjes_pv(-0.6), 0.3, 1e-6) &&
                        near(stieltjes_pv(0.0), 0.0, 1e-12);
               }});
  c.push_back({"structure of sampled spectra", [] {
                 for (int s = 0; s < 5; ++s) {
                   if (!check_structure(sample_spectrum(Ensemble::SO, 5, s)).ok()) return false;
                   if (!check_structure(sample_spectrum(Ensemble::SO, 6, s)).ok()) return false;
                   if (!check_structure(sample_spectrum(Ensemble::Sp, 6, s)).ok()) return false;
                 }
                 return true;
               }});
  c.push_back({"xi at s = 0 is 1", [] {
                 const auto sp = sample_spectrum(Ensemble::SO, 10, 3);
                 return xi_eval(sp, CharPolyParams::make(Ensemble::SO, 0.2), 0.0) == cplx(1.0);
               }});
  c.push_back({"two-point truncated product", [] {
                 PointConfig cfg;
                 cfg.points = {-1.0, 1.0};
                 cfg.windowradius = 2.0;
                 const cplx s(0.3, 0.2);
                 const cplx want = std::exp(cplx(0.0, kPi) * s) * (1.0 - s * s);
                 return std::abs(truncated_product(cfg, s, 2.0) - want) < 1e-14;
               }});
  c.push_back({"KS identical samples", [] {
                 std::vector<double> a(100);
                 for (int i = 0; i < 100; ++i) a[i] = std::sin(i);
                 return ks_two_sample(a, a).statistic == 0.0;
               }});
  c.push_back({"sine quadrature mean", [] {
                 return expected_count_quadrature(KernelSpec(KernelFamily::Sine, 0), Interval(0.0, 3.0)) == 3.0;
               }});
  return c;
}

std::vector<Check> full_checks() {
  std::vector<Check> c;
  c.push_back({"Christoffel-Darboux equals direct sum", [] {
                 const int n = 20;
                 const auto hx = hermite_psi(n - 1, 0.3), hy = hermite_psi(n - 1, -0.7);
                 double direct = 0.0;
                 for (int k = 0; k < n; ++k) direct += hx[k].value * hy[k].value;
                 const double cd = kernel_eval(KernelSpec(KernelFamily::GUE, n), 0.3, -0.7);
                 return std::abs(cd - direct) <= 1e-10 * std::abs(cd);
               }});
  c.push_back({"product equals determinant", [] {
                 const auto g = haar_matrix(MatrixGroup::SO, 20, 5);
                 const auto sp = sample_spectrum(Ensemble::SO, 20, 5);
                 const auto p = CharPolyParams::make(Ensemble::SO, 0.2);
                 const cplx s(1.3, 0.4);
                 const cplx a = xi_eval(sp, p, s), b = det_oracle(g, p, s);
                 return std::abs(a - b) <= 1e-8 * std::abs(b);
               }});
  c.push_back({"SO(2n) mean count", [] {
                 return near(expected_count_quadrature(KernelSpec(KernelFamily::SOEven, 5), Interval(0.0, 0.5)),
                             5.0, 1e-8);
               }});
  c.push_back({"reproducing property", [] {
                 const KernelSpec k(KernelFamily::Sp, 6);
                 const auto rule = quad::composite_gauss_legendre(0.0, 0.5, 0.02, 10);
                 const double v = rule.apply([&](double y) { return kernel_eval(k, 0.1, y) * kernel_eval(k, y, 0.3); });
                 return near(v, kernel_eval(k, 0.1, 0.3), 1e-6);
               }});
  c.push_back({"sine sampler projection spectrum", [] {
                 const auto s = SineWindowSampler::cached(8.0);
                 const auto& ev = s->projectionspectrum();
                 return ev.minCoeff() >= -1e-9 && ev.maxCoeff() <= 1.0 + 1e-9 && near(s->expected_count(), 16.0, 1e-6);
               }});
  return c;
}

int run_selftest(bool quick, std::ostream& os) {
  auto checks = quick_checks();
  if (!quick) {
    auto more = full_checks();
    checks.insert(checks.end(), more.begin(), more.end());
  }
  int failures = 0;
  for (const auto& check : checks) {
    bool ok = false;
    try {
      ok = check.run();
    } catch (const std::exception&) {
      ok = false;
    }
    os << (ok ? "PASS " : "FAIL ") << check.name << "\n";
    if (!ok) ++failures;
  }
  os << (failures == 0 ? "selftest PASS" : "selftest FAIL") << " (" << checks.size() - failures << "/"
     << checks.size() << ")\n";
  return failures == 0 ? kExitOk : kExitFail;
}

std::vector<cplx> lattice(const std::vector<double>& spec) {
  if (spec.size() != 5) throw InputError("--grid expects re0,re1,im0,im1,steps");
  const double steps_d = spec[4];
  if (!(steps_d >= 1.0) || steps_d != std::floor(steps_d)) throw InputError("--grid: steps must be a positive integer");
  const int steps = static_cast<int>(steps_d);
  auto axis = [steps](double lo, double hi) {
    std::vector<double> v;
    if (lo == hi || steps == 1) {
      v.push_back(lo);
      return v;
    }
    for (int i = 0; i < steps; ++i) v.push_back(lo + (hi - lo) * i / (steps - 1));
    return v;
  };
  std::vector<cplx> out;
  for (double im : axis(spec[2], spec[3]))
    for (double re : axis(spec[0], spec[1])) out.emplace_back(re, im);
  return out;
}

}  // namespace

cplx parse_complex(const std::string& text_in) {
  const std::string text = trim(text_in);
  if (text.empty()) throw InputError("empty complex literal");
  if (text.back() != 'i') return {parse_real(text, "complex literal"), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto imag_part = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_real(s, "complex literal");
  };
  if (split == std::string::npos) return {0.0, imag_part(body)};
  return {parse_real(body.substr(0, split), "complex literal"), imag_part(body.substr(split))};
}

std::vector<cplx> parse_complex_list(const std::string& text) {
  std::vector<cplx> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
  if (out.empty()) throw InputError("empty list of complex values");
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"microlimit: random matrix spectra, kernels, counts and characteristic-polynomial limits"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML file supplying option values");
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Global g;
  app.add_option("--seed", g.seed, "Master seed (MICROLIMIT_SEED overrides)");
  app.add_option("--workers", g.workers, "Worker threads (never changes output)")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file (stdout when omitted)");

  // sample
  auto* sample = app.add_subcommand("sample", "Sample spectra and write them as CSV");
  std::string s_ens, s_emit;
  int s_n = 0, s_m = 1;
  bool s_tri = false;
  sample->add_option("--ensemble", s_ens, "cue|so|sp|gue")->required();
  sample->add_option("--n", s_n, "Matrix dimension")->required();
  sample->add_option("--m", s_m, "Replicas");
  sample->add_option("--emit", s_emit, "angles|levels");
  sample->add_flag("--tridiagonal", s_tri, "GUE: tridiagonal sampler");

  // kernel-eval
  auto* keval = app.add_subcommand("kernel-eval", "Evaluate one kernel value");
  std::string k_family;
  int k_size = 1;
  double k_x = 0.0, k_y = 0.0;
  bool k_json = false;
  keval->add_option("--family", k_family, "so-even|so-odd|sp|gue|sine")->required();
  keval->add_option("--size", k_size, "n of SO(2n), SO(2n+1), Sp(2n), GUE(n)");
  keval->add_option("--x", k_x)->required();
  keval->add_option("--y", k_y)->required();
  keval->add_flag("--json", k_json);

  // counts
  auto* counts = app.add_subcommand("counts", "Interval count statistics");
  std::string c_ens, c_interval;
  int c_n = 0, c_m = 1000;
  double c_energy = 0.0;
  bool c_oracle = false, c_tri = false;
  counts->add_option("--ensemble", c_ens)->required();
  counts->add_option("--n", c_n)->required();
  auto* c_energy_opt = counts->add_option("--energy", c_energy, "Microscopic centre E");
  counts->add_option("--interval", c_interval, "a,b")->required();
  counts->add_option("--m", c_m);
  counts->add_flag("--oracle", c_oracle, "Include quadrature oracle values");
  counts->add_flag("--tridiagonal", c_tri, "GUE: tridiagonal sampler");

  // audit
  auto* audit = app.add_subcommand("audit", "Count regularity audit over a length grid");
  std::string a_ens, a_lengths = "1,2,4,8,16";
  int a_n = 0, a_m = 2000;
  double a_energy = 0.0;
  audit->add_option("--ensemble", a_ens)->required();
  audit->add_option("--n", a_n)->required();
  audit->add_option("--energy", a_energy)->required();
  audit->add_option("--lengths", a_lengths);
  audit->add_option("--m", a_m);

  // charpoly
  auto* charpoly = app.add_subcommand("charpoly", "Characteristic-polynomial ratios on a grid");
  std::string p_ens, p_grid;
  int p_n = 0, p_m = 1;
  double p_energy = 0.0;
  bool p_tri = false;
  charpoly->add_option("--ensemble", p_ens)->required();
  charpoly->add_option("--n", p_n)->required();
  charpoly->add_option("--energy", p_energy);
  charpoly->add_option("--grid", p_grid, "re0,re1,im0,im1,steps")->required();
  charpoly->add_option("--m", p_m);
  charpoly->add_flag("--tridiagonal", p_tri, "GUE: tridiagonal sampler");

  // xi-infinity
  auto* xinf = app.add_subcommand("xi-infinity", "Reference draws of the limiting function");
  std::string x_method = "dpp";
  double x_B = 32.0;
  int x_N = 512, x_m = 1;
  std::vector<std::string> x_s;
  xinf->add_option("--method", x_method, "dpp|cue");
  xinf->add_option("--B", x_B, "Sine window half-width");
  xinf->add_option("--N", x_N, "CUE dimension");
  xinf->add_option("--s", x_s, "RE,IM (repeatable)")->required();
  xinf->add_option("--m", x_m);

  // converge
  auto* conv = app.add_subcommand("converge", "KS convergence table against a reference");
  std::string v_ens, v_s, v_n, v_ref = "cue";
  double v_energy = 0.0, v_B = 32.0;
  int v_m = 2000, v_N = 512;
  conv->add_option("--ensemble", v_ens)->required();
  conv->add_option("--energy", v_energy)->required();
  conv->add_option("--s", v_s, "Comma-separated complex values, e.g. 0.3,0.7+0.4i")->required();
  conv->add_option("--n", v_n, "Comma-separated dimensions")->required();
  conv->add_option("--m", v_m);
  conv->add_option("--reference", v_ref, "dpp|cue");
  conv->add_option("--B", v_B);
  conv->add_option("--N", v_N);

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Built-in checks");
  bool t_quick = false;
  selftest->add_flag("--quick", t_quick, "Fast tier only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (const char* env = std::getenv("MICROLIMIT_SEED")) {
      try {
        std::size_t pos = 0;
        g.seed = std::stoull(env, &pos);
        if (pos != std::string(env).size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw InputError("MICROLIMIT_SEED must be an unsigned 64-bit integer");
      }
    }

    if (*sample) {
      const Ensemble e = parse_ensemble(s_ens);
      check_dimension(e, s_n);
      if (s_m < 1) throw InputError("--m must be >= 1");
      std::string emit = s_emit.empty() ? (e == Ensemble::GUE ? "levels" : "angles") : s_emit;
      if (emit != "angles" && emit != "levels") throw InputError("--emit must be angles or levels");
      if ((emit == "levels") != (e == Ensemble::GUE))
        throw InputError("--emit levels applies to gue only, angles to compact groups only");
      const auto spectra = sample_replicas(e, s_n, s_m, g.seed, g.workers, s_tri);
      Sink sink(g.out);
      ojson cfg{{"ensemble", s_ens}, {"n", s_n}, {"m", s_m}, {"emit", emit}, {"tridiagonal", s_tri}};
      write_csv_header(sink.os(), provenance("sample", g, cfg),
                       emit == "angles" ? "eigenangle theta in turns, eigenvalue exp(2 pi i theta), macroscopic"
                                        : "unscaled eigenvalues lambda (Lambda = lambda / sqrt(n)), macroscopic",
                       "replica,index,value");
      for (std::size_t r = 0; r < spectra.size(); ++r) {
        const auto& v = emit == "angles" ? spectra[r].angles : spectra[r].levels;
        for (std::size_t i = 0; i < v.size(); ++i) sink.os() << r << "," << i << "," << fmt(v[i]) << "\n";
      }
      return kExitOk;
    }

    if (*keval) {
      const KernelSpec spec(parse_kernel_family(k_family), k_size);
      const double v = kernel_eval(spec, k_x, k_y);
      Sink sink(g.out);
      if (k_json) {
        ojson j{{"family", k_family}, {"size", k_size}, {"x", k_x}, {"y", k_y}, {"value", v}};
        sink.os() << j.dump(2) << "\n";
      } else {
        sink.os() << "family,size,x,y,value\n"
                  << k_family << "," << k_size << "," << fmt(k_x) << "," << fmt(k_y) << "," << fmt(v) << "\n";
      }
      return kExitOk;
    }

    if (*counts) {
      const Ensemble e = parse_ensemble(c_ens);
      const auto ab = parse_real_list(c_interval, "--interval");
      if (ab.size() != 2) throw InputError("--interval expects a,b");
      const Interval I(ab[0], ab[1]);
      std::optional<double> E;
      if (c_energy_opt->count() > 0) E = c_energy;
      const auto s = empirical_count_stats(e, c_n, E, I, c_m, g.seed, g.workers, c_tri, c_oracle);
      ojson cfg{{"ensemble", c_ens}, {"n", c_n}, {"energy", E ? ojson(*E) : ojson(nullptr)},
                {"interval", ojson::array({I.a, I.b})}, {"m", c_m}, {"oracle", c_oracle},
                {"tridiagonal", c_tri}};
      ojson j;
      j["provenance"] = provenance("counts", g, cfg);
      j["scaling"] = E ? "microscopic: points n(theta - E + nu) or n rho_sc(E)(Lambda - E)"
                       : "raw: reduced angles in [0, 1/2] (so/sp), angles (cue), unscaled levels (gue)";
      j["empirical"] = summary_json(s);
      if (c_oracle) {
        j["quadrature"] = {{"mean", s.oraclemean ? ojson(*s.oraclemean) : ojson(nullptr)},
                           {"variance", s.oraclevar ? ojson(*s.oraclevar) : ojson(nullptr)}};
      }
      Sink sink(g.out);
      sink.os() << j.dump(2) << "\n";
      return kExitOk;
    }

    if (*audit) {
      const Ensemble e = parse_ensemble(a_ens);
      const auto lengths = parse_real_list(a_lengths, "--lengths");
      const auto rep = amenability_audit(e, a_n, a_energy, lengths, a_m, g.seed, g.workers);
      ojson cfg{{"ensemble", a_ens}, {"n", a_n}, {"energy", a_energy}, {"lengths", lengths}, {"m", a_m}};
      ojson j;
      j["provenance"] = provenance("audit", g, cfg);
      j["scaling"] = "microscopic; intervals [L, 2L] and [-2L, -L]";
      ojson rows = ojson::array();
      for (const auto& r : rep.rows) {
        rows.push_back({{"length", r.length},
                        {"interval", ojson::array({r.length, 2.0 * r.length})},
                        {"plus", summary_json(r.plus)},
                        {"minus", summary_json(r.minus)},
                        {"symmetrydefect", r.symmetrydefect},
                        {"symmetrystderr", r.symmetrystderr},
                        {"covariance", r.covariance}});
      }
      j["rows"] = rows;
      j["meanslope"] = slope_json(rep.meanslope);
      j["varslope"] = slope_json(rep.varslope);
      j["symmetryslope"] = slope_json(rep.symmetryslope);
      j["thresholds"] = {{"meanslope_max", 1.0 + rep.tol},
                         {"varslope_below", 2.0 - rep.margin},
                         {"symmetryslope_below", 1.0 - rep.margin}};
      j["verdict"] = rep.pass() ? "PASS" : "FAIL";
      Sink sink(g.out);
      sink.os() << j.dump(2) << "\n";
      return rep.pass() ? kExitOk : kExitFail;
    }

    if (*charpoly) {
      const Ensemble e = parse_ensemble(p_ens);
      check_dimension(e, p_n);
      if (p_m < 1) throw InputError("--m must be >= 1");
      const auto params = CharPolyParams::make(e, p_energy);
      const auto grid = lattice(parse_real_list(p_grid, "--grid"));
      std::vector<CharPolyEval> evals(static_cast<std::size_t>(p_m));
      std::vector<std::vector<LogValue>> logs(static_cast<std::size_t>(p_m));
      parallel_for(evals.size(), g.workers, [&](std::size_t r) {
        with_resample(derive_seed(g.seed, r), [&](std::uint64_t seed) {
          const auto spec = sample_spectrum(e, p_n, seed, p_tri);
          std::vector<LogValue> lv;
          lv.reserve(grid.size());
          for (const auto& s : grid) lv.push_back(xi_log(spec, params, s));
          logs[r] = std::move(lv);
          return 0;
        });
      });
      Sink sink(g.out);
      ojson cfg{{"ensemble", p_ens}, {"n", p_n}, {"energy", params.energy}, {"grid", p_grid},
                {"m", p_m}, {"tridiagonal", p_tri}, {"variant", to_string(params.variant)}};
      write_csv_header(sink.os(), provenance("charpoly", g, cfg),
                       "s in microscopic units (spacing 1); arg unwound along the segment 0 -> s",
                       "replica,s_re,s_im,val_re,val_im,logabs,arg");
      for (std::size_t r = 0; r < logs.size(); ++r)
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const cplx v = grid[i] == cplx(0.0) ? cplx(1.0) : logs[r][i].value();
          sink.os() << r << "," << fmt(grid[i].real()) << "," << fmt(grid[i].imag()) << "," << fmt(v.real())
                    << "," << fmt(v.imag()) << "," << fmt(logs[r][i].logabs) << "," << fmt(logs[r][i].arg)
                    << "\n";
        }
      return kExitOk;
    }

    if (*xinf) {
      const Reference method = parse_reference(x_method);
      std::vector<cplx> svals;
      for (const auto& item : x_s) {
        const auto parts = parse_real_list(item, "--s");
        if (parts.size() == 1) {
          svals.emplace_back(parts[0], 0.0);
        } else if (parts.size() == 2) {
          svals.emplace_back(parts[0], parts[1]);
        } else {
          throw InputError("--s expects RE,IM");
        }
      }
      if (x_m < 1) throw InputError("--m must be >= 1");
      ReferenceSettings rs;
      rs.B = x_B;
      rs.N = x_N;
      const auto draws = reference_draws(method, svals, x_m, g.seed, g.workers, rs);
      Sink sink(g.out);
      ojson cfg{{"method", x_method}, {"m", x_m}};
      if (method == Reference::DPP) {
        cfg["B"] = x_B;
      } else {
        cfg["N"] = x_N;
      }
      ojson sj = ojson::array();
      for (const auto& s : svals) sj.push_back(complex_json(s));
      cfg["s"] = sj;
      write_csv_header(sink.os(), provenance("xi-infinity", g, cfg), "s in microscopic units (spacing 1)",
                       "replica,s_re,s_im,val_re,val_im,logabs");
      for (int r = 0; r < x_m; ++r)
        for (std::size_t i = 0; i < svals.size(); ++i) {
          const cplx v = draws[i][r];
          sink.os() << r << "," << fmt(svals[i].real()) << "," << fmt(svals[i].imag()) << "," << fmt(v.real())
                    << "," << fmt(v.imag()) << "," << fmt(std::log(std::abs(v))) << "\n";
        }
      return kExitOk;
    }

    if (*conv) {
      const Ensemble e = parse_ensemble(v_ens);
      const auto svals = parse_complex_list(v_s);
      std::vector<int> nlist;
      for (double v : parse_real_list(v_n, "--n")) {
        if (v != std::floor(v)) throw InputError("--n: dimensions must be integers");
        nlist.push_back(static_cast<int>(v));
      }
      ReferenceSettings rs;
      rs.B = v_B;
      rs.N = v_N;
      const auto table =
          convergence_sweep(e, v_energy, svals, nlist, v_m, g.seed, parse_reference(v_ref), g.workers, rs);
      ojson sj = ojson::array();
      for (const auto& s : svals) sj.push_back(complex_json(s));
      ojson cfg{{"ensemble", v_ens}, {"energy", v_energy}, {"s", sj}, {"n", nlist}, {"m", v_m},
                {"reference", v_ref}};
      if (parse_reference(v_ref) == Reference::DPP) {
        cfg["B"] = v_B;
      } else {
        cfg["N"] = v_N;
      }
      ojson j;
      j["provenance"] = provenance("converge", g, cfg);
      j["statistic"] = e == Ensemble::GUE ? "Xi_n(s) exp(-s(E/(2 rho_sc(E)) - i pi))" : "xi_n(s)";
      ojson rows = ojson::array();
      for (const auto& r : table.rows)
        rows.push_back({{"n", r.n},
                        {"s", complex_json(r.svalue)},
                        {"functional", to_string(r.functional)},
                        {"ks", {{"statistic", r.ks.statistic}, {"pvalue", r.ks.pvalue}, {"m1", r.ks.m1}, {"m2", r.ks.m2}}}});
      j["rows"] = rows;
      Sink sink(g.out);
      sink.os() << j.dump(2) << "\n";
      return kExitOk;
    }

    if (*selftest) {
      Sink sink(g.out);
      return run_selftest(t_quick, sink.os());
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DegenerateSample& e) {
    std::cerr << "degenerate sample: " << e.what() << "\n";
    return kExitDegenerate;
  }
  return kExitInput;
}

}  // namespace microlimit

#pragma once

// Command-line front end. Kept in a header so tests can drive run() with
// in-memory streams.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xp/xp.hpp"

namespace xpgn {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode { kOk = 0, kViolation = 1, kUsage = 2 };

struct RunConfig {
  int points = 0;  // 0: per-dimension default
  int levels = 3;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  int samples = 100;
  double tolerance = 0.01;  // sweep: allowed max/min - 1
  std::string output;
};

/// key=value lines; '#' starts a comment.
inline void load_config(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw xp::Error(xp::ErrorCode::BadParams, "cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw xp::Error(xp::ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    try {
      if (key == "points") cfg.points = std::stoi(value);
      else if (key == "levels") cfg.levels = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "threads") cfg.threads = static_cast<unsigned>(std::stoul(value));
      else if (key == "samples") cfg.samples = std::stoi(value);
      else if (key == "tolerance") cfg.tolerance = std::stod(value);
      else if (key == "output") cfg.output = value;
      else throw xp::Error(xp::ErrorCode::ParseError, path + ": unknown key '" + key + "'");
    } catch (const std::logic_error&) {
      throw xp::Error(xp::ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  if (!(cfg.tolerance > 0)) throw xp::Error(xp::ErrorCode::BadParams, "tolerance must be positive");
}

/// "n=3,k=2,l=1,p=2,q=12,r=-3,theta=1/2"; p/q/r in p-form, or sp/sq/sr on
/// the 1/p scale. A missing q is solved from the balance condition.
inline xp::InequalityInstance parse_instance(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw xp::Error(xp::ErrorCode::ParseError, "instance item '" + item + "' lacks '='");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto take_int = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw xp::Error(xp::ErrorCode::ParseError, std::string("instance needs ") + key);
    xp::Rational v = xp::Rational::parse(it->second);
    if (!v.is_integer()) throw xp::Error(xp::ErrorCode::ParseError, std::string(key) + " must be an integer");
    kv.erase(it);
    return static_cast<int>(v.num());
  };
  auto take_index = [&](const char* pkey, const char* skey) -> std::optional<xp::Rational> {
    std::optional<xp::Rational> out;
    if (auto it = kv.find(pkey); it != kv.end()) {
      out = xp::parse_p(it->second);
      kv.erase(it);
    }
    if (auto it = kv.find(skey); it != kv.end()) {
      if (out) throw xp::Error(xp::ErrorCode::ParseError, std::string("give either ") + pkey + " or " + skey);
      out = xp::Rational::parse(it->second);
      kv.erase(it);
    }
    return out;
  };
  xp::InequalityInstance inst;
  inst.n = take_int("n");
  inst.k = take_int("k");
  inst.l = take_int("l");
  auto sp = take_index("p", "sp");
  auto sq = take_index("q", "sq");
  inst.sr = take_index("r", "sr");
  auto th = kv.find("theta");
  if (th == kv.end()) throw xp::Error(xp::ErrorCode::ParseError, "instance needs theta");
  inst.theta = xp::Rational::parse(th->second);
  kv.erase(th);
  if (!kv.empty()) throw xp::Error(xp::ErrorCode::ParseError, "unknown instance key '" + kv.begin()->first + "'");
  if (!sp) throw xp::Error(xp::ErrorCode::ParseError, "instance needs p");
  inst.sp = *sp;
  if (sq) {
    inst.sq = *sq;
  } else {
    if (inst.theta != xp::Rational(1) && !inst.sr) throw xp::Error(xp::ErrorCode::ParseError, "instance needs q or r");
    inst.sq = xp::solve_q(inst.n, inst.k, inst.l, inst.sp, inst.r_or(xp::Rational(0)), inst.theta);
  }
  return inst;
}

inline std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw xp::Error(xp::ErrorCode::ParseError, "bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args) {
    CLI::App app{"Interpolation inequalities on the X^p scale (Lebesgue, sup and Hölder norms)", "xpgn"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);
    std::string config_path;
    app.add_option("--config", config_path, "key=value config file (default: $XP_CONFIG)");
    add_common(app);

    auto* params = app.add_subcommand("params", "Solve and validate a parameter tuple");
    params->add_option("--n", n_, "dimension")->required();
    params->add_option("--k", k_)->required();
    params->add_option("--l", l_)->required();
    params->add_option("--p", p_, "p-form: integer, num/den, or inf");
    params->add_option("--q", q_);
    params->add_option("--r", r_);
    params->add_option("--theta", theta_);

    auto* norm = app.add_subcommand("norm", "Evaluate an X^p norm of D^l u");
    add_function(norm);
    norm->add_option("--s", s_, "index s = 1/p");
    norm->add_option("--p", p_, "p-form alternative to --s");
    norm->add_option("--l", l_, "derivative order")->default_val(0);
    norm->add_flag("--seminorm", seminorm_, "top-order functional only");

    auto* check = app.add_subcommand("check", "Check interpolation inequalities");
    add_function(check);
    check->add_option("--lambda", lambda_);
    check->add_option("--mu", mu_);
    check->add_option("--nu", nu_);
    check->add_option("--ck", ck_, "k1,k2,k3 for the C^k interpolation");
    check->add_flag("--seminorm", seminorm_);
    check->add_flag("--decompose", decompose_, "check every reiteration link");
    check->add_flag("--empirical", empirical_, "estimate missing constants from a family sweep");

    auto* sweep = app.add_subcommand("sweep", "End-to-end ratios under dilation");
    add_function(sweep);
    sweep->add_option("--instance", instance_)->required();
    sweep->add_option("--lambdas", lambdas_, "comma-separated dilation factors")->default_val("0.5,1,2");
    sweep->add_option("--perturb-q", perturb_, "shift sq by this rational (breaks the balance)");
    sweep->add_flag("--seminorm", seminorm_, "accepted for clarity; sweeps always use seminorms");

    auto* derive = app.add_subcommand("derive", "Build, verify and evaluate a proof certificate");
    derive->add_option("--instance", instance_);
    derive->add_option("--verify", verify_path_, "verify an existing certificate file");
    derive->add_option("--out", cert_path_, "write the certificate here");
    derive->add_option("--fn", fn_, "evaluate every step on this function");
    derive->add_flag("--full", full_, "evaluate full norms instead of seminorms");
    derive->add_flag("--empirical", empirical_, "estimate empirical constants by a family sweep");

    auto* oracle = app.add_subcommand("oracle", "Compare fast estimators with brute-force references");
    add_function(oracle);
    auto* mode = oracle->add_option_group("mode");
    mode->add_flag("--holder", holder_);
    mode->add_flag("--lp", lp_);
    mode->add_flag("--sup", sup_);
    mode->require_option(1);
    oracle->add_option("--p2", p2_, "Hölder exponent")->default_val("1/2");
    oracle->add_option("--p", p_, "Lebesgue exponent (p-form, default 1)");
    oracle->add_option("--order", l_, "derivative order")->default_val(0);
    oracle->add_option("--cells", cells_, "oracle resolution per axis")->default_val(0);

    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kOk;
    } catch (const CLI::CallForVersion&) {
      out_ << kVersion << '\n';
      return kOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << '\n';
      return kUsage;
    }

    try {
      if (config_path.empty())
        if (const char* env = std::getenv("XP_CONFIG")) config_path = env;
      if (!config_path.empty()) load_config(config_path, cfg_);
      apply_overrides();
      xp::set_max_threads(cfg_.threads);

      std::ostringstream body;
      int code = kOk;
      if (*params) code = run_params(body);
      else if (*norm) code = run_norm(body);
      else if (*check) code = run_check(body);
      else if (*sweep) code = run_sweep(body);
      else if (*derive) code = run_derive(body);
      else if (*oracle) code = run_oracle(body);
      emit(body.str());
      return code;
    } catch (const xp::Error& e) {
      err_ << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
      return kUsage;
    }
  }

 private:
  void add_common(CLI::App& app) {
    app.add_option("--points", points_, "grid points per axis");
    app.add_option("--levels", levels_, "refinement rounds");
    app.add_option("--seed", seed_, "seed for family sweeps");
    app.add_option("--samples", samples_, "family sweep size");
    app.add_option("--threads", threads_, "cap on worker threads");
    app.add_option("--tolerance", tolerance_, "sweep tolerance on max/min - 1");
    app.add_option("-o,--output", output_, "write output here instead of stdout");
  }

  void add_function(CLI::App* sub) {
    sub->add_option("--fn", fn_, "test function, e.g. \"bump(R=1)\"");
    sub->add_option("--n", n_, "dimension")->default_val(1);
  }

  void apply_overrides() {
    if (points_) cfg_.points = *points_;
    if (levels_) cfg_.levels = *levels_;
    if (seed_) cfg_.seed = *seed_;
    if (samples_) cfg_.samples = *samples_;
    if (threads_) cfg_.threads = *threads_;
    if (tolerance_) cfg_.tolerance = *tolerance_;
    if (output_) cfg_.output = *output_;
    if (cfg_.points < 0 || cfg_.levels < 0 || cfg_.samples <= 0 || !(cfg_.tolerance > 0))
      throw xp::Error(xp::ErrorCode::BadParams, "points, levels, samples and tolerance must be positive");
  }

  void emit(const std::string& text) {
    if (cfg_.output.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(cfg_.output);
    if (!f) throw xp::Error(xp::ErrorCode::BadParams, "cannot write " + cfg_.output);
    f << text;
  }

  std::string header() const {
    std::ostringstream os;
    os << "# xpgn " << kVersion << " seed=" << cfg_.seed << " points=" << cfg_.points << " levels=" << cfg_.levels
       << " samples=" << cfg_.samples << " tolerance=" << fmt(cfg_.tolerance) << '\n';
    return os.str();
  }

  xp::TestFunction function() const {
    if (fn_.empty()) throw xp::Error(xp::ErrorCode::ParseError, "--fn is required");
    return xp::parse_function(fn_, n_);
  }

  xp::GridSpec grid(const xp::TestFunction& u) const { return xp::default_grid(u, cfg_.points, cfg_.levels); }

  int run_params(std::ostream& os) {
    using xp::Rational;
    std::optional<Rational> sp, sq, sr, theta;
    if (!p_.empty()) sp = xp::parse_p(p_);
    if (!q_.empty()) sq = xp::parse_p(q_);
    if (!r_.empty()) sr = xp::parse_p(r_);
    if (!theta_.empty()) theta = Rational::parse(theta_);
    const Rational one(1), n(n_);
    const int given = !!sp + !!sq + !!sr + !!theta;
    if (given < 2) throw xp::Error(xp::ErrorCode::BadParams, "give at least two of --p --q --r --theta");
    if (!theta) {
      if (!sp || !sq) throw xp::Error(xp::ErrorCode::DegenerateCondition, "theta needs p and q");
      theta = sr ? xp::solve_theta(n_, k_, l_, *sp, *sq, *sr) : one;
    }
    if (!sq) {
      if (!sp) throw xp::Error(xp::ErrorCode::DegenerateCondition, "q needs p");
      if (*theta != one && !sr) throw xp::Error(xp::ErrorCode::DegenerateCondition, "q needs r when theta < 1");
      sq = xp::solve_q(n_, k_, l_, *sp, sr.value_or(Rational(0)), *theta);
    }
    if (!sp) {
      if (theta->is_zero()) throw xp::Error(xp::ErrorCode::DegenerateCondition, "p is free when theta = 0");
      if (*theta != one && !sr) throw xp::Error(xp::ErrorCode::DegenerateCondition, "p needs r when theta < 1");
      sp = (*sq - Rational(l_, n_) - (one - *theta) * sr.value_or(Rational(0))) / *theta + Rational(k_, n_);
    }
    if (!sr && *theta != one) sr = (*sq - Rational(l_, n_) - *theta * (*sp - Rational(k_, n_))) / (one - *theta);

    xp::InequalityInstance inst{n_, k_, l_, *sp, *sq, sr, *theta};
    os << "n=" << n_ << " k=" << k_ << " l=" << l_ << " theta=" << *theta << '\n';
    auto line = [&](const char* name, const std::optional<Rational>& s) {
      os << name << ": ";
      if (!s) {
        os << "unused (theta=1)\n";
        return;
      }
      try {
        os << xp::describe_index(*s, n_) << '\n';
      } catch (const xp::Error&) {
        os << "s=" << *s << " (out of range)\n";
      }
    };
    line("p", sp);
    line("q", sq);
    line("r", sr);
    auto rep = xp::validate_instance(inst);
    if (rep.ok()) {
      os << "valid\n";
      return kOk;
    }
    for (const auto& v : rep.violations) os << "invalid: " << v.reason << '\n';
    err_ << "invalid instance: " << rep.violations.front().reason << '\n';
    return kUsage;
  }

  xp::Rational index_from_flags() const {
    if (!s_.empty() && !p_.empty()) throw xp::Error(xp::ErrorCode::ParseError, "give --s or --p, not both");
    if (!s_.empty()) return xp::Rational::parse(s_);
    if (!p_.empty()) return xp::parse_p(p_);
    throw xp::Error(xp::ErrorCode::ParseError, "--s or --p is required");
  }

  int run_norm(std::ostream& os) {
    auto u = function();
    auto s = index_from_flags();
    auto v = xp::xnorm({u, s, l_, grid(u), seminorm_});
    os << header() << xp::csv_header_norm() << '\n' << xp::csv_row(u.family(), u.dsl(), s, l_, v) << '\n';
    return kOk;
  }

  void check_row(std::ostream& os, const std::string& tag, const std::string& a, const std::string& b,
                 const std::string& c, const std::string& eta, double ratio, std::optional<double> bound,
                 bool empirical, double rel, bool& violation) {
    os << tag << ',' << a << ',' << b << ',' << c << ',' << eta << ',' << fmt(ratio) << ',';
    if (bound) {
      os << (empirical ? "empirical:" : "") << fmt(*bound) << ',' << fmt(*bound - ratio) << '\n';
      if (!empirical && ratio > *bound * (1.0 + 3.0 * rel + xp::kViolationFloor)) {
        os << "# VIOLATION " << tag << " ratio " << fmt(ratio) << " exceeds " << fmt(*bound) << '\n';
        violation = true;
      }
    } else {
      os << "unknown,\n";
    }
  }

  int run_check(std::ostream& os) {
    auto u = function();
    auto g = grid(u);
    bool violation = false;
    os << header() << "case,lambda,mu,nu,eta,ratio,bound,margin\n";
    if (!ck_.empty()) {
      auto ks = parse_doubles(ck_);
      if (ks.size() != 3) throw xp::Error(xp::ErrorCode::ParseError, "--ck needs k1,k2,k3");
      int k1 = static_cast<int>(ks[0]), k2 = static_cast<int>(ks[1]), k3 = static_cast<int>(ks[2]);
      auto r = xp::ck_interpolation_check(u, k1, k2, k3, g);
      check_row(os, "CkStep", std::to_string(k1), std::to_string(k2), std::to_string(k3), r.eta.str(), r.lhs / r.rhs,
                std::nullopt, false, 0.0, violation);
      check_row(os, "CkOneStep", std::to_string(k1), std::to_string(k1 + 1), std::to_string(k1 + 2), "1/2",
                r.one_step_lhs / r.one_step_rhs, 1.0, false, 1e-6, violation);
      return violation ? kViolation : kOk;
    }
    if (lambda_.empty() || mu_.empty() || nu_.empty())
      throw xp::Error(xp::ErrorCode::ParseError, "--lambda, --mu and --nu (or --ck) are required");
    auto t = xp::make_triple(xp::Rational::parse(lambda_), xp::Rational::parse(mu_), xp::Rational::parse(nu_), n_);
    if (t.mu != t.eta * t.lambda + (xp::Rational(1) - t.eta) * t.nu)
      throw xp::Error(xp::ErrorCode::BadParams, "mu is not a convex combination");
    std::vector<xp::InterpolationTriple> links{t};
    if (decompose_) links = xp::decompose(t);
    for (const auto& link : links) {
      auto r = xp::check_interpolation(link, u, g, seminorm_);
      auto bound = r.bound;
      bool emp = false;
      if (!bound && empirical_) {
        bound = xp::empirical_constant(link, seminorm_, cfg_.samples, cfg_.seed, cfg_.points);
        emp = true;
      }
      check_row(os, xp::to_string(r.tag), link.lambda.str(), link.mu.str(), link.nu.str(), link.eta.str(), r.ratio,
                bound, emp, r.relative_error, violation);
    }
    return violation ? kViolation : kOk;
  }

  int run_sweep(std::ostream& os) {
    auto inst = parse_instance(instance_);
    // The sweep is about the instance; phi is a fine default witness.
    auto u = xp::parse_function(fn_.empty() ? "bump(R=1)" : fn_, inst.n);
    const bool perturbed = !perturb_.empty();
    if (perturbed) inst.sq += xp::Rational::parse(perturb_);
    auto lambdas = parse_doubles(lambdas_);
    auto ratios = xp::dilation_sweep(inst, u, lambdas, cfg_.points);
    os << header() << "lambda,ratio\n";
    double lo = ratios.front(), hi = ratios.front();
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      os << fmt(lambdas[i]) << ',' << fmt(ratios[i]) << '\n';
      lo = std::min(lo, ratios[i]);
      hi = std::max(hi, ratios[i]);
    }
    os << "# max/min=" << fmt(hi / lo) << " balance_defect=" << xp::balance_defect(inst) << '\n';
    if (lambdas.size() >= 2) {
      double slope = std::log(ratios.back() / ratios.front()) / std::log(lambdas.back() / lambdas.front());
      os << "# slope=" << fmt(slope) << '\n';
    }
    if (!perturbed && hi / lo > 1.0 + cfg_.tolerance) {
      os << "# VIOLATION ratios vary beyond tolerance\n";
      return kViolation;
    }
    return kOk;
  }

  int run_derive(std::ostream& os) {
    if (!verify_path_.empty()) {
      std::ifstream in(verify_path_);
      if (!in) throw xp::Error(xp::ErrorCode::BadParams, "cannot read " + verify_path_);
      std::stringstream buf;
      buf << in.rdbuf();
      auto pc = xp::parse_chain(buf.str());
      xp::verify_chain(pc);
      os << "certificate ok: " << pc.steps.size() << " steps\n";
      return kOk;
    }
    if (instance_.empty()) throw xp::Error(xp::ErrorCode::ParseError, "--instance or --verify is required");
    auto pc = xp::derive_chain(parse_instance(instance_));
    xp::verify_chain(pc);
    const std::string cert = xp::serialize_chain(pc);
    if (!cert_path_.empty()) {
      std::ofstream f(cert_path_);
      if (!f) throw xp::Error(xp::ErrorCode::BadParams, "cannot write " + cert_path_);
      f << cert;
    }
    os << xp::render_chain(pc);
    if (fn_.empty()) return kOk;

    auto u = xp::parse_function(fn_, pc.instance.n);
    auto rep = xp::evaluate_chain(pc, u, grid(u), !full_);
    std::vector<double> emp;
    if (empirical_) emp = xp::empirical_step_constants(pc, !full_, cfg_.samples, cfg_.seed, cfg_.points);
    os << header() << "step,rule,ratio,bound,margin,flag\n";
    for (std::size_t i = 0; i < rep.steps.size(); ++i) {
      const auto& s = rep.steps[i];
      os << i << ',' << xp::to_string(pc.steps[i].rule) << ',' << fmt(s.ratio) << ',';
      if (s.bound) os << fmt(*s.bound) << ',' << fmt(*s.bound - s.ratio);
      else if (!emp.empty()) os << "empirical:" << fmt(emp[i]) << ',';
      else os << "empirical,";
      os << ',' << (s.violation ? "VIOLATION" : "ok") << '\n';
    }
    os << "end_to_end," << fmt(rep.end_to_end) << ",error," << fmt(rep.end_to_end_error) << '\n';
    return rep.violations > 0 ? kViolation : kOk;
  }

  int run_oracle(std::ostream& os) {
    auto u = function();
    os << header() << "check,fast,oracle,difference,tolerance,status\n";
    bool ok = true;
    auto row = [&](const char* name, double fast, double ref, double tol) {
      const double diff = std::abs(fast - ref);
      const bool pass = diff <= tol;
      ok = ok && pass;
      os << name << ',' << fmt(fast) << ',' << fmt(ref) << ',' << fmt(diff) << ',' << fmt(tol) << ','
         << (pass ? "ok" : "MISMATCH") << '\n';
    };
    if (holder_) {
      auto g = xp::default_grid(u, cfg_.points > 0 ? cfg_.points : 64, 0);
      auto p2 = xp::Rational::parse(p2_);
      xp::HolderSignature sig{0, p2};
      auto fast = xp::holder_seminorm(u, l_, sig, g);
      auto ref = xp::brute_force_holder(u, l_, p2, g);
      row("holder", fast.value, ref.value, 0.0);
    } else if (lp_) {
      auto s = xp::parse_p(p_.empty() ? "1" : p_);
      if (s.sign() <= 0) throw xp::Error(xp::ErrorCode::BadParams, "--lp needs finite p >= 1");
      const double p = s.reciprocal().to_double();
      auto g = grid(u);
      auto fast = xp::lp_norm(u, p, l_, g);
      const int cells = cells_ > 0 ? cells_ : (n_ == 1 ? 1000000 : n_ == 2 ? 2000 : 160);
      auto ref = xp::lp_norm_oracle(u, p, l_, g.box, cells);
      row("lp", fast.value, ref.value, 3.0 * (fast.error + ref.error) + 1e-12 * ref.value);
    } else {
      auto g = grid(u);
      auto fast = xp::sup_norm(u, l_, g);
      auto dense = g;
      dense.points_per_axis = cells_ > 0 ? cells_ : (n_ == 1 ? 1000001 : n_ == 2 ? 1001 : 101);
      auto ref = xp::sup_norm_oracle(u, l_, dense);
      row("sup", fast.value, ref.value, 1e-6 * ref.value + 3.0 * (fast.error + ref.error));
    }
    return ok ? kOk : kViolation;
  }

  std::ostream& out_;
  std::ostream& err_;
  RunConfig cfg_;

  std::optional<int> points_, levels_, samples_;
  std::optional<std::uint64_t> seed_;
  std::optional<unsigned> threads_;
  std::optional<double> tolerance_;
  std::optional<std::string> output_;

  int n_ = 1, k_ = 0, l_ = 0, cells_ = 0;
  std::string p_, q_, r_, theta_, s_, fn_;
  std::string lambda_, mu_, nu_, ck_;
  std::string instance_, lambdas_, perturb_, verify_path_, cert_path_, p2_;
  bool seminorm_ = false, decompose_ = false, empirical_ = false, full_ = false;
  bool holder_ = false, lp_ = false, sup_ = false;
};

/// Runs one invocation; args exclude the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Cli(out, err).run(args);
}

}  // namespace xpgn

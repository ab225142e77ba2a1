// kaczeta: transfer-operator spectra and dynamical zeta data for Kac-Baker
// spin chains.  Subcommands: partition, trace, spectrum, zeta, zeros,
// asymptotics, verify.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kaczeta/kaczeta.hpp"
#include "kaczeta/verify.hpp"
#include "run_config.hpp"

using namespace kaczeta;
using kaczeta_cli::BetaRange;
using kaczeta_cli::RunConfig;
using nlohmann::json;

namespace {

// Fixed-format numeric output: 17 significant digits in JSON, 12 in CSV.
std::string jnum(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string cnum(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%.12g", v);
  return b;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string alpha_label(const std::vector<int>& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(a[i]);
  }
  return s;
}

// Shared per-subcommand flags, mirroring RunConfig.
struct CommonFlags {
  CLI::Option* m_opt;
  CLI::Option* lambda_opt;
  CLI::Option* J_opt;
  CLI::Option* beta_opt;
  CLI::Option* beta_range_opt;
  CLI::Option* n_opt;
  CLI::Option* degree_opt;
  CLI::Option* z_opt;
  CLI::Option* output_opt;
  CLI::Option* config_opt;
  CLI::Option* det_opt;
  CLI::Option* threads_opt;

  int m = 1;
  std::vector<double> lambda;
  std::vector<double> J;
  double beta = 1.0;
  std::string beta_range_str;
  int n = 4;
  int degree = 60;
  std::string z_str;
  std::string output = "csv";
  std::string config_file;
  bool deterministic = false;
  int threads = 1;
};

CommonFlags* add_common(CLI::App* cmd) {
  auto* f = new CommonFlags();
  f->m_opt = cmd->add_option("--m", f->m, "number of interaction channels");
  f->lambda_opt =
      cmd->add_option("--lambda", f->lambda, "decay rates, comma separated")->delimiter(',');
  f->J_opt = cmd->add_option("--J", f->J, "coupling strengths, comma separated")->delimiter(',');
  f->beta_opt = cmd->add_option("--beta", f->beta, "inverse temperature");
  f->beta_range_opt =
      cmd->add_option("--beta-range", f->beta_range_str, "beta sweep as lo:hi:step");
  f->n_opt = cmd->add_option("--n", f->n, "maximum period length");
  f->degree_opt = cmd->add_option("--degree", f->degree, "basis truncation degree N");
  f->z_opt = cmd->add_option("--z", f->z_str, "zeta argument as re[,im]");
  f->output_opt = cmd->add_option("--output", f->output, "output format: json or csv")
                      ->check(CLI::IsMember({"json", "csv"}));
  f->config_opt = cmd->add_option("--config", f->config_file, "JSON config file");
  f->det_opt = cmd->add_flag("--deterministic", f->deterministic,
                             "byte-stable output (forces one thread)");
  f->threads_opt = cmd->add_option("--threads", f->threads, "worker thread cap");
  return f;
}

RunConfig resolve_config(const CommonFlags& f) {
  RunConfig c;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw DomainError("cannot open config file: " + f.config_file);
    json j;
    in >> j;
    c = kaczeta_cli::config_from_json(j);
  }
  if (f.lambda_opt->count()) c.lambda = f.lambda;
  if (f.J_opt->count()) c.J = f.J;
  if (f.m_opt->count()) {
    // --m alone expands the defaults; explicit vectors must agree with it
    if (!f.lambda_opt->count() && static_cast<int>(c.lambda.size()) != f.m)
      c.lambda.assign(f.m, 0.5);
    if (!f.J_opt->count() && static_cast<int>(c.J.size()) != f.m) c.J.assign(f.m, 1.0);
    if (static_cast<int>(c.lambda.size()) != f.m)
      throw DomainError("--m disagrees with --lambda length");
  }
  if (f.J_opt->count() == 0 && c.J.size() != c.lambda.size() && !c.lambda.empty())
    c.J.assign(c.lambda.size(), 1.0);
  if (f.beta_opt->count()) c.beta = {f.beta};
  if (f.beta_range_opt->count()) {
    BetaRange r;
    if (std::sscanf(f.beta_range_str.c_str(), "%lf:%lf:%lf", &r.lo, &r.hi, &r.step) != 3)
      throw DomainError("--beta-range must be lo:hi:step");
    c.beta_range = r;
  }
  if (f.n_opt->count()) c.n = f.n;
  if (f.degree_opt->count()) c.degree = f.degree;
  if (f.z_opt->count()) {
    double re = 0.0, im = 0.0;
    const int k = std::sscanf(f.z_str.c_str(), "%lf,%lf", &re, &im);
    if (k < 1) throw DomainError("--z must be re[,im]");
    c.z = Complex(re, im);
  }
  if (f.output_opt->count()) c.output = f.output;
  if (f.det_opt->count()) c.deterministic = f.deterministic;
  if (f.threads_opt->count()) c.threads = f.threads;
  if (c.deterministic) c.threads = 1;
  if (c.threads < 1) c.threads = 1;
  return c;
}


double single_beta(const RunConfig& c) {
  if (c.beta.size() != 1)
    throw DomainError("this subcommand takes a single beta (use --beta-range or a "
                      "beta list only with spectrum/asymptotics sweeps)");
  return c.beta.front();
}

int cmd_partition(const RunConfig& c) {
  const double beta = single_beta(c);
  auto p = validate_params(c.lambda, c.J);
  std::vector<double> Z(c.n + 1), resid(c.n + 1);
  for (int n = 1; n <= c.n; ++n) {
    Z[n] = partition_function_bruteforce(p, beta, n, -1, c.threads);
    double det = 1.0;
    for (int l = 0; l < p.m; ++l) det *= 1.0 - std::pow(p.lambda[l], n);
    const double tr = ruelle_trace_power(p, beta, n, -1, c.threads).real();
    resid[n] = std::abs(det * tr - Z[n]) / std::abs(Z[n]);
  }
  if (c.output == "json") {
    std::string rows;
    for (int n = 1; n <= c.n; ++n) {
      if (n > 1) rows += ',';
      rows += "{\"n\":" + std::to_string(n) + ",\"Z\":" + jnum(Z[n]) +
              ",\"trace_residual\":" + jnum(resid[n]) + "}";
    }
    std::cout << "{\"command\":\"partition\",\"beta\":" << jnum(beta)
              << ",\"rows\":[" << rows << "]}\n";
  } else {
    std::cout << "n,Z,trace_residual\n";
    for (int n = 1; n <= c.n; ++n)
      std::cout << n << ',' << cnum(Z[n]) << ',' << cnum(resid[n]) << "\n";
  }
  return 0;
}

int cmd_trace(const RunConfig& c) {
  const double beta = single_beta(c);
  auto p = validate_params(c.lambda, c.J);
  const double closed = gtrace_closed(p, beta);
  std::vector<double> tr(c.n + 1);
  for (int n = 1; n <= c.n; ++n)
    tr[n] = ruelle_trace_power(p, beta, n, -1, c.threads).real();
  if (c.output == "json") {
    std::string rows;
    for (int n = 1; n <= c.n; ++n) {
      if (n > 1) rows += ',';
      rows += "{\"n\":" + std::to_string(n) + ",\"trace\":" + jnum(tr[n]) + "}";
    }
    std::cout << "{\"command\":\"trace\",\"beta\":" << jnum(beta)
              << ",\"closed_trace\":" << jnum(closed) << ",\"rows\":[" << rows << "]}\n";
  } else {
    std::cout << "n,trace,closed_trace\n";
    for (int n = 1; n <= c.n; ++n)
      std::cout << n << ',' << cnum(tr[n]) << ',' << (n == 1 ? cnum(closed) : "") << "\n";
  }
  return 0;
}

std::vector<double> beta_sweep(const RunConfig& c) {
  std::vector<double> bs;
  if (c.beta_range)
    for (double b = c.beta_range->lo; b <= c.beta_range->hi + 1e-12;
         b += c.beta_range->step)
      bs.push_back(b);
  else
    bs = c.beta;
  return bs;
}

int cmd_spectrum(const RunConfig& c, bool plotdata) {
  auto p = validate_params(c.lambda, c.J);
  if (c.beta_range || plotdata || c.beta.size() > 1) {
    const int K = 10;
    std::cout << "beta";
    for (int k = 0; k < K; ++k) std::cout << ",eig" << k;
    std::cout << "\n";
    for (double b : beta_sweep(c)) {
      auto s = eigenvalues(p, b, c.degree);
      std::cout << cnum(b);
      for (int k = 0; k < K; ++k)
        std::cout << ',' << (k < static_cast<int>(s.eigenvalues.size())
                                 ? cnum(s.eigenvalues[k])
                                 : "");
      std::cout << "\n";
    }
    return 0;
  }
  const double beta = single_beta(c);
  auto s = eigenvalues(p, beta, c.degree);
  if (c.output == "json") {
    std::string rows;
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
      if (i) rows += ',';
      rows += "{\"index\":" + std::to_string(i) + ",\"eigenvalue\":" +
              jnum(s.eigenvalues[i]) + ",\"parity\":\"" + to_string(s.parities[i]) + "\"}";
    }
    std::cout << "{\"command\":\"spectrum\",\"beta\":" << jnum(beta)
              << ",\"N\":" << s.N << ",\"tail_gap\":" << jnum(s.tail_gap)
              << ",\"rows\":[" << rows << "]}\n";
  } else {
    std::cout << "index,eigenvalue,parity\n";
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
      std::cout << i << ',' << cnum(s.eigenvalues[i]) << ',' << to_string(s.parities[i])
                << "\n";
  }
  return 0;
}

int cmd_zeta(const RunConfig& c, bool cross_check, int series_terms) {
  const double beta = single_beta(c);
  auto p = validate_params(c.lambda, c.J);
  auto zv = zeta(p, beta, c.z, c.degree);
  Complex series = 0.0;
  if (cross_check)
    series = zeta_series_partial(p, beta, c.z, series_terms, -1, c.threads);
  if (c.output == "json") {
    std::string factors;
    for (std::size_t i = 0; i < zv.factors.size(); ++i) {
      const auto& f = zv.factors[i];
      if (i) factors += ',';
      factors += "{\"alpha\":[";
      for (std::size_t k = 0; k < f.alpha.size(); ++k)
        factors += (k ? "," : "") + std::to_string(f.alpha[k]);
      factors += "],\"det_re\":" + jnum(f.det.real()) + ",\"det_im\":" +
                 jnum(f.det.imag()) + ",\"converged\":" + (f.converged ? "true" : "false") +
                 "}";
    }
    std::cout << "{\"command\":\"zeta\",\"beta\":" << jnum(beta) << ",\"z\":["
              << jnum(c.z.real()) << ',' << jnum(c.z.imag()) << "],\"N\":" << zv.N
              << ",\"value_re\":" << jnum(zv.value.real())
              << ",\"value_im\":" << jnum(zv.value.imag());
    if (cross_check)
      std::cout << ",\"series_re\":" << jnum(series.real())
                << ",\"series_im\":" << jnum(series.imag())
                << ",\"series_gap\":" << jnum(std::abs(series - zv.value));
    std::cout << ",\"factors\":[" << factors << "]}\n";
  } else {
    std::cout << "item,re,im,converged\n";
    std::cout << "zeta," << cnum(zv.value.real()) << ',' << cnum(zv.value.imag()) << ",\n";
    if (cross_check)
      std::cout << "series," << cnum(series.real()) << ',' << cnum(series.imag()) << ",\n";
    for (const auto& f : zv.factors)
      std::cout << csv_quote("det[" + alpha_label(f.alpha) + "]") << ','
                << cnum(f.det.real()) << ',' << cnum(f.det.imag()) << ','
                << (f.converged ? "true" : "false") << "\n";
  }
  return 0;
}

int cmd_zeros(const RunConfig& c) {
  auto p = validate_params(c.lambda, c.J);
  if (!c.beta_range) throw DomainError("zeros requires --beta-range lo:hi:step");
  if (c.z.imag() != 0.0) throw DomainError("zeros brackets on the real z axis");
  auto roots = find_real_zeros_poles(p, c.z.real(), c.beta_range->lo, c.beta_range->hi,
                                     c.degree, c.beta_range->step);
  if (c.output == "json") {
    std::string rows;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const auto& r = roots[i];
      if (i) rows += ',';
      rows += "{\"beta\":" + jnum(r.beta_star) + ",\"alpha\":[";
      for (std::size_t k = 0; k < r.alpha.size(); ++k)
        rows += (k ? "," : "") + std::to_string(r.alpha[k]);
      rows += std::string("],\"kind\":\"") + (r.kind == RootKind::pole ? "pole" : "zero") +
              "\",\"det\":" + jnum(r.det_value) + "}";
    }
    std::cout << "{\"command\":\"zeros\",\"z\":[" << jnum(c.z.real()) << ','
              << jnum(c.z.imag()) << "],\"rows\":[" << rows << "]}\n";
  } else {
    std::cout << "beta,alpha,kind,det\n";
    for (const auto& r : roots)
      std::cout << cnum(r.beta_star) << ',' << csv_quote(alpha_label(r.alpha)) << ','
                << (r.kind == RootKind::pole ? "pole" : "zero") << ','
                << cnum(r.det_value) << "\n";
  }
  return 0;
}

int cmd_asymptotics(const RunConfig& c) {
  auto p = validate_params(c.lambda, c.J);
  const std::vector<double> bs = beta_sweep(c);
  const MultiIndex alpha0{std::vector<int>(p.m, 0)};

  struct Row {
    double beta, eig, pred, dev;
    Parity par;
  };
  std::vector<Row> rows;
  for (double b : bs) {
    const Direction dir = b >= 0.0 ? Direction::plus_inf : Direction::minus_inf;
    for (Parity par : {Parity::even, Parity::odd}) {
      auto sys = eigen_system(p, b, enumerate_basis(p.m, c.degree, par));
      const double pred = asymptotic_prediction(p, alpha0, b, dir, par);
      const double eig = pred < 0.0 ? sys.values.back() : sys.values.front();
      rows.push_back({b, eig, pred, std::abs(eig / pred - 1.0), par});
    }
  }
  if (c.output == "json") {
    std::string body;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i) body += ',';
      body += "{\"beta\":" + jnum(rows[i].beta) + ",\"parity\":\"" +
              to_string(rows[i].par) + "\",\"eigenvalue\":" + jnum(rows[i].eig) +
              ",\"prediction\":" + jnum(rows[i].pred) + ",\"rel_dev\":" +
              jnum(rows[i].dev) + "}";
    }
    std::cout << "{\"command\":\"asymptotics\",\"rows\":[" << body << "]}\n";
  } else {
    std::cout << "beta,parity,eigenvalue,prediction,rel_dev\n";
    for (const auto& r : rows)
      std::cout << cnum(r.beta) << ',' << to_string(r.par) << ',' << cnum(r.eig) << ','
                << cnum(r.pred) << ',' << cnum(r.dev) << "\n";
  }
  return 0;
}

int cmd_verify(const RunConfig& c, bool break_me) {
  VerifyOptions opt;
  opt.break_me = break_me;
  opt.threads = c.threads;
  const auto results = run_acceptance_checks(opt);
  int failures = 0;
  if (c.output == "json") {
    std::string body;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      if (i) body += ',';
      body += "{\"id\":\"" + r.id + "\",\"name\":" + json(r.name).dump() +
              ",\"passed\":" + (r.passed ? "true" : "false") + ",\"worst\":" +
              jnum(r.worst) + ",\"tol\":" + jnum(r.tol) + ",\"detail\":" +
              json(r.detail).dump() + "}";
      if (!r.passed) ++failures;
    }
    std::cout << "{\"command\":\"verify\",\"passed\":" << (failures == 0 ? "true" : "false")
              << ",\"checks\":[" << body << "]}\n";
  } else {
    for (const auto& r : results) {
      std::printf("%-5s %-4s %s (worst %.3e, tol %.1e)\n", r.id.c_str(),
                  r.passed ? "PASS" : "FAIL", r.name.c_str(), r.worst, r.tol);
      if (!r.passed) ++failures;
    }
    std::printf("%d/%zu checks passed\n", static_cast<int>(results.size()) - failures,
                results.size());
  }
  return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kac-Baker transfer operator spectra and dynamical zeta functions"};
  app.require_subcommand(1);

  auto* partition = app.add_subcommand("partition", "partition functions Z_n with trace checks");
  auto* pf = add_common(partition);
  auto* trace = app.add_subcommand("trace", "traces of transfer-operator powers");
  auto* tf = add_common(trace);
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the truncated operator");
  auto* sf = add_common(spectrum);
  std::string emit;
  spectrum->add_option("--emit", emit, "emit 'plotdata' (x,y) series for --beta-range");
  auto* zetac = app.add_subcommand("zeta", "Ruelle zeta value with per-factor determinants");
  auto* zf = add_common(zetac);
  std::string cross;
  int series_terms = 16;
  zetac->add_option("--cross-check", cross, "cross-check method: series");
  zetac->add_option("--series-terms", series_terms, "terms for the series cross-check");
  auto* zeros = app.add_subcommand("zeros", "real zeros/poles of the determinant factors");
  auto* rf = add_common(zeros);
  auto* asym = app.add_subcommand("asymptotics", "leading eigenvalues vs asymptotic predictions");
  auto* af = add_common(asym);
  auto* verify = app.add_subcommand("verify", "replay the identity suite");
  auto* vf = add_common(verify);
  bool break_me = false;
  verify->add_flag("--break-me", break_me, "inject a lambda perturbation (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (partition->parsed()) return cmd_partition(resolve_config(*pf));
    if (trace->parsed()) return cmd_trace(resolve_config(*tf));
    if (spectrum->parsed()) return cmd_spectrum(resolve_config(*sf), emit == "plotdata");
    if (zetac->parsed()) return cmd_zeta(resolve_config(*zf), cross == "series", series_terms);
    if (zeros->parsed()) return cmd_zeros(resolve_config(*rf));
    if (asym->parsed()) return cmd_asymptotics(resolve_config(*af));
    if (verify->parsed()) return cmd_verify(resolve_config(*vf), break_me);
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceDomain& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) { // quadrature, eigensolve, pole
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

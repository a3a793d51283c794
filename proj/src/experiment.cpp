#include "arfima/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "arfima/errors.hpp"
#include "arfima/rng.hpp"
#include "arfima/simulate.hpp"

namespace arfima {

namespace {

// Neumaier summation
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      c += (sum - t) + x;
    else
      c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

const char* variant_name(WConstVariant v) {
  return v == WConstVariant::General ? "general" : "arma_variance";
}

WConstVariant variant_from_name(const std::string& s) {
  if (s == "general") return WConstVariant::General;
  if (s == "arma_variance") return WConstVariant::ArmaVariance;
  throw Error(ErrorCode::InvalidArgument, "unknown w_const_variant '" + s + "'");
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

nlohmann::json spec_json(const ArfimaSpec& s) {
  return {{"phi", s.phi}, {"d", s.d}, {"theta", s.theta}, {"sigma2", s.sigma2}};
}

ArfimaSpec spec_from(const nlohmann::json& j) {
  ArfimaSpec s;
  s.phi = j.value("phi", std::vector<double>{});
  s.d = j.at("d").get<double>();
  s.theta = j.value("theta", std::vector<double>{});
  s.sigma2 = j.value("sigma2", 1.0);
  return s;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + p.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + p.string());
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "NaN";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.replications < 2) throw Error(ErrorCode::InvalidArgument, "replications must be >= 2");
  if (cfg.n_list.empty()) throw Error(ErrorCode::InvalidArgument, "n_list is empty");
  for (int n : cfg.n_list)
    if (n < 8) throw Error(ErrorCode::InvalidArgument, "sample sizes must be >= 8");
  if (cfg.methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods");
  std::set<EstimatorKind> seen(cfg.methods.begin(), cfg.methods.end());
  if (seen.size() != cfg.methods.size()) throw Error(ErrorCode::InvalidArgument, "repeated method");
  if (cfg.limit_draws < 0) throw Error(ErrorCode::InvalidArgument, "limit_draws must be >= 0");
}

const CellReport& MonteCarloReport::cell(EstimatorKind kind, int n) const {
  for (const auto& c : cells)
    if (c.kind == kind && c.n == n) return c;
  throw Error(ErrorCode::InvalidArgument, "no cell for (" + std::string(to_string(kind)) + ", " +
                                              std::to_string(n) + ")");
}

const SizeReport& MonteCarloReport::size(int n) const {
  for (const auto& s : sizes)
    if (s.n == n) return s;
  throw Error(ErrorCode::InvalidArgument, "no size report for n = " + std::to_string(n));
}

SampleMoments sample_moments(const std::vector<double>& x) {
  if (x.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  const double R = static_cast<double>(x.size());
  CompensatedSum s;
  for (double v : x) s.add(v);
  const double mean = s.value() / R;
  CompensatedSum q;
  for (double v : x) q.add((v - mean) * (v - mean));
  return {mean, q.value() / R};
}

std::uint64_t series_hash(const std::vector<double>& y) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : y) {
    unsigned char b[sizeof(double)];
    std::memcpy(b, &v, sizeof(double));
    for (unsigned char c : b) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

MonteCarloReport run_monte_carlo(const ExperimentConfig& cfg, ExecPolicy policy) {
  validate_config(cfg);
  MonteCarloReport rep;
  rep.config = cfg;
  rep.pseudo_true = solve_pseudo_true(cfg.pair);
  const EtaVector& eta1 = rep.pseudo_true.eta1;
  const double d1 = eta1.d;
  const std::size_t M = cfg.methods.size();
  const int R = cfg.replications;

  for (int n : cfg.n_list) {
    const std::uint64_t seed_n = mix_seed(cfg.seed, static_cast<std::uint64_t>(n));
    const auto sim = cached_simulator(cfg.pair.tdgp, n);
    // est[m][r], NaN on failure; seen[m][r] is the hash of the series method m received
    std::vector<std::vector<double>> est(M, std::vector<double>(static_cast<std::size_t>(R)));
    std::vector<std::vector<std::uint64_t>> seen(M, std::vector<std::uint64_t>(static_cast<std::size_t>(R)));
    std::vector<std::uint64_t> drawn(static_cast<std::size_t>(R));

    auto one = [&](long r) {
      const auto y = sim->draw(seed_n, static_cast<std::uint64_t>(r));
      drawn[static_cast<std::size_t>(r)] = series_hash(y);
      for (std::size_t m = 0; m < M; ++m) {
        seen[m][static_cast<std::size_t>(r)] = series_hash(y);
        double v = std::numeric_limits<double>::quiet_NaN();
        try {
          const auto fit = estimate(cfg.methods[m], cfg.pair.family, y);
          if (fit.converged && std::isfinite(fit.eta_hat.d)) v = fit.eta_hat.d;
        } catch (const Error&) {
        }
        est[m][static_cast<std::size_t>(r)] = v;
      }
    };
    if (policy == ExecPolicy::Serial) {
      for (long r = 0; r < R; ++r) one(r);
    } else {
#pragma omp parallel for schedule(dynamic)
      for (long r = 0; r < R; ++r) one(r);
    }
    for (std::size_t m = 0; m < M; ++m)
      if (seen[m] != drawn)
        throw Error(ErrorCode::InvalidArgument, "paired design violated: methods saw different series");

    std::vector<CellReport> cells(M);
    for (std::size_t m = 0; m < M; ++m) {
      CellReport& c = cells[m];
      c.kind = cfg.methods[m];
      c.n = n;
      for (double v : est[m]) {
        if (std::isfinite(v))
          c.d_hat_samples.push_back(v);
        else
          ++c.failures;
      }
      if (c.failures > cfg.max_failure_rate * R)
        throw Error(ErrorCode::FailureThreshold,
                    std::string(to_string(c.kind)) + " failed on " + std::to_string(c.failures) + " of " +
                        std::to_string(R) + " replications at n = " + std::to_string(n));
      const auto mom = sample_moments(c.d_hat_samples);
      c.bias = mom.mean - d1;
      c.variance = mom.variance;
      c.mse = c.bias * c.bias + c.variance;
    }
    const auto fml = std::find(cfg.methods.begin(), cfg.methods.end(), EstimatorKind::FML);
    const double fml_mse =
        fml == cfg.methods.end() ? std::numeric_limits<double>::quiet_NaN()
                                 : cells[static_cast<std::size_t>(fml - cfg.methods.begin())].mse;
    for (auto& c : cells) c.rel_eff_vs_fml = c.mse / fml_mse;

    SizeReport sz;
    sz.n = n;
    const double dstar = rep.pseudo_true.d_star;
    sz.which = classify_dstar(dstar);
    if (cfg.case_flags.report_standardized) {
      LimitLawOptions opts;
      opts.variant = cfg.case_flags.w_const_variant;
      if (sz.which == LimitCase::Case1) {
        const double rate = std::pow(static_cast<double>(n), 1.0 - 2.0 * dstar) / std::log(static_cast<double>(n));
        if (fml != cfg.methods.end()) {
          // mu_n is a constant, so the variance of the standardized FML draws is rate^2 Var
          sz.S_n = rate * rate * cells[static_cast<std::size_t>(fml - cfg.methods.begin())].variance;
          opts.S_n = sz.S_n;
        }
      }
      bool first = true;
      for (std::size_t m = 0; m < M; ++m) {
        const LimitLaw law = build_limit_law(cfg.pair, eta1, n, cfg.methods[m], opts);
        if (first) {
          sz.rate = law.rate;
          if (const auto* c1 = std::get_if<Case1Law>(&law.detail)) {
            sz.s = c1->s;
            opts.S_n = -1.0;
            opts.s_override = c1->s;
          }
          if (cfg.limit_draws > 0)
            sz.limit_samples = sample_limit(law, cfg.limit_draws, mix_seed(seed_n, 0x4c494d4954ULL), policy);
          first = false;
        }
        if (const auto* c1 = std::get_if<Case1Law>(&law.detail)) cells[m].mu_n = c1->mu_n[0];
        rep.cells.push_back(cells[m]);
        rep.cells.back().standardized_samples = standardized_samples(rep, cfg.methods[m], law, n);
      }
    } else {
      for (auto& c : cells) rep.cells.push_back(std::move(c));
    }
    rep.sizes.push_back(std::move(sz));
  }
  return rep;
}

std::vector<double> standardized_samples(const MonteCarloReport& report, EstimatorKind kind,
                                         const LimitLaw& law, int n) {
  if (law.n != n) throw Error(ErrorCode::CaseMismatch, "limit law built for another n");
  if (law.kind != kind) throw Error(ErrorCode::CaseMismatch, "limit law built for another method");
  if (std::abs(law.d0 - report.config.pair.tdgp.d) > 1e-12 ||
      std::abs(law.dstar - report.pseudo_true.d_star) > 1e-9)
    throw Error(ErrorCode::CaseMismatch, "limit law built for another pair");
  if (law.which != classify_dstar(report.pseudo_true.d_star))
    throw Error(ErrorCode::CaseMismatch, "limit case does not match d*");
  const CellReport& c = report.cell(kind, n);
  double shift = report.pseudo_true.eta1.d;
  if (const auto* c1 = std::get_if<Case1Law>(&law.detail)) shift += c1->mu_n[0];
  std::vector<double> out;
  out.reserve(c.d_hat_samples.size());
  for (double d : c.d_hat_samples) out.push_back(law.rate * (d - shift));
  return out;
}

std::vector<TrueValueCell> bias_mse_to_true(const MonteCarloReport& report) {
  const double ds = report.pseudo_true.d_star;
  std::vector<TrueValueCell> out;
  for (const auto& c : report.cells)
    out.push_back({c.kind, c.n, c.bias - ds, c.mse + ds * ds - 2.0 * ds * c.bias});
  return out;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json methods = nlohmann::json::array();
  for (auto m : cfg.methods) methods.push_back(std::string(to_string(m)));
  return {{"tdgp", spec_json(cfg.pair.tdgp)},
          {"family", {{"p", cfg.pair.family.p}, {"q", cfg.pair.family.q}}},
          {"methods", methods},
          {"n_list", cfg.n_list},
          {"replications", cfg.replications},
          {"seed", cfg.seed},
          {"outputs", cfg.outputs},
          {"w_const_variant", variant_name(cfg.case_flags.w_const_variant)},
          {"report_standardized", cfg.case_flags.report_standardized},
          {"limit_draws", cfg.limit_draws},
          {"max_failure_rate", cfg.max_failure_rate}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig cfg;
    cfg.pair.tdgp = spec_from(j.at("tdgp"));
    cfg.pair.family.p = j.at("family").value("p", 0);
    cfg.pair.family.q = j.at("family").value("q", 0);
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : j.at("methods")) cfg.methods.push_back(estimator_from_string(m.get<std::string>()));
    }
    cfg.n_list = j.at("n_list").get<std::vector<int>>();
    cfg.replications = j.value("replications", cfg.replications);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.outputs = j.value("outputs", cfg.outputs);
    cfg.case_flags.w_const_variant = variant_from_name(j.value("w_const_variant", std::string("arma_variance")));
    cfg.case_flags.report_standardized = j.value("report_standardized", true);
    cfg.limit_draws = j.value("limit_draws", cfg.limit_draws);
    cfg.max_failure_rate = j.value("max_failure_rate", cfg.max_failure_rate);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad config: ") + e.what());
  }
}

nlohmann::json to_json(const MonteCarloReport& report) {
  const auto& pt = report.pseudo_true;
  nlohmann::json j;
  j["config"] = to_json(report.config);
  j["pseudo_true"] = {{"d", pt.eta1.d},
                      {"beta", pt.eta1.beta},
                      {"d_star", pt.d_star},
                      {"K", pt.K},
                      {"grad_norm", pt.grad_norm},
                      {"truncation_N", pt.truncation_N},
                      {"newton_iters", pt.newton_iters},
                      {"starts_converged", pt.starts_converged}};
  j["sizes"] = nlohmann::json::array();
  for (const auto& s : report.sizes)
    j["sizes"].push_back({{"n", s.n},
                          {"case", static_cast<int>(s.which)},
                          {"rate", s.rate},
                          {"S_n", s.S_n},
                          {"s", s.s},
                          {"limit_samples", s.limit_samples}});
  j["cells"] = nlohmann::json::array();
  for (const auto& c : report.cells)
    j["cells"].push_back({{"method", std::string(to_string(c.kind))},
                          {"n", c.n},
                          {"bias", c.bias},
                          {"variance", c.variance},
                          {"mse", c.mse},
                          {"rel_eff_vs_fml", number_or_null(c.rel_eff_vs_fml)},
                          {"failures", c.failures},
                          {"mu_n", c.mu_n},
                          {"d_hat_samples", c.d_hat_samples},
                          {"standardized_samples", c.standardized_samples}});
  return j;
}

MonteCarloReport report_from_json(const nlohmann::json& j) {
  try {
    MonteCarloReport r;
    r.config = config_from_json(j.at("config"));
    const auto& p = j.at("pseudo_true");
    r.pseudo_true.eta1.d = p.at("d").get<double>();
    r.pseudo_true.eta1.beta = p.at("beta").get<std::vector<double>>();
    r.pseudo_true.d_star = p.at("d_star").get<double>();
    r.pseudo_true.K = p.at("K").get<double>();
    r.pseudo_true.grad_norm = p.at("grad_norm").get<double>();
    r.pseudo_true.truncation_N = p.at("truncation_N").get<int>();
    r.pseudo_true.newton_iters = p.at("newton_iters").get<int>();
    r.pseudo_true.starts_converged = p.at("starts_converged").get<int>();
    for (const auto& s : j.at("sizes")) {
      SizeReport z;
      z.n = s.at("n").get<int>();
      z.which = static_cast<LimitCase>(s.at("case").get<int>());
      z.rate = s.at("rate").get<double>();
      z.S_n = s.at("S_n").get<double>();
      z.s = s.at("s").get<int>();
      z.limit_samples = s.at("limit_samples").get<std::vector<double>>();
      r.sizes.push_back(std::move(z));
    }
    for (const auto& c : j.at("cells")) {
      CellReport x;
      x.kind = estimator_from_string(c.at("method").get<std::string>());
      x.n = c.at("n").get<int>();
      x.bias = c.at("bias").get<double>();
      x.variance = c.at("variance").get<double>();
      x.mse = c.at("mse").get<double>();
      x.rel_eff_vs_fml = number_from(c.at("rel_eff_vs_fml"));
      x.failures = c.at("failures").get<int>();
      x.mu_n = c.at("mu_n").get<double>();
      x.d_hat_samples = c.at("d_hat_samples").get<std::vector<double>>();
      x.standardized_samples = c.at("standardized_samples").get<std::vector<double>>();
      r.cells.push_back(std::move(x));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad report: ") + e.what());
  }
}

std::vector<std::string> emit_report(const MonteCarloReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  const auto& cfg = report.config;
  const double theta0 = cfg.pair.tdgp.theta.empty() ? 0.0 : cfg.pair.tdgp.theta[0];
  std::vector<std::string> written;

  auto header = [&](const std::string& first) {
    std::string h = first;
    for (auto m : cfg.methods) {
      const std::string name(to_string(m));
      h += "," + name + "_bias," + name + "_mse";
    }
    return h + "\n";
  };
  const auto truth = bias_mse_to_true(report);
  auto true_cell = [&](EstimatorKind k, int n) {
    for (const auto& t : truth)
      if (t.kind == k && t.n == n) return t;
    throw Error(ErrorCode::InvalidArgument, "missing cell");
  };
  std::string table = header("d_star,theta0,n"), table_true = table, releff = "d_star,theta0,n";
  for (auto m : cfg.methods) releff += "," + std::string(to_string(m));
  releff += "\n";
  for (int n : cfg.n_list) {
    const std::string lead = fmt(report.pseudo_true.d_star) + "," + fmt(theta0) + "," + std::to_string(n);
    table += lead;
    table_true += lead;
    releff += lead;
    for (auto m : cfg.methods) {
      const auto& c = report.cell(m, n);
      const auto t = true_cell(m, n);
      table += "," + fmt(c.bias) + "," + fmt(c.mse);
      table_true += "," + fmt(t.bias) + "," + fmt(t.mse);
      releff += "," + fmt(c.rel_eff_vs_fml);
    }
    table += "\n";
    table_true += "\n";
    releff += "\n";
  }
  const fs::path base(dir);
  write_file(base / "table.csv", table);
  write_file(base / "table_true.csv", table_true);
  write_file(base / "rel_eff.csv", releff);
  write_file(base / "report.json", to_json(report).dump(1));
  for (const char* f : {"table.csv", "table_true.csv", "rel_eff.csv", "report.json"})
    written.push_back((base / f).string());

  for (const auto& sz : report.sizes) {
    std::vector<const std::vector<double>*> cols;
    for (auto m : cfg.methods) cols.push_back(&report.cell(m, sz.n).standardized_samples);
    cols.push_back(&sz.limit_samples);
    bool usable = true;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, hmax = 0.0;
    for (const auto* c : cols) {
      if (c->size() < 30) {
        usable = false;
        break;
      }
      try {
        hmax = std::max(hmax, silverman_bandwidth(*c));
      } catch (const Error&) {
        usable = false;
        break;
      }
      const auto [a, b] = std::minmax_element(c->begin(), c->end());
      lo = std::min(lo, *a);
      hi = std::max(hi, *b);
    }
    if (!usable) continue;
    lo -= 5 * hmax;
    hi += 5 * hmax;
    const int G = 512;
    std::vector<double> grid(G);
    for (int i = 0; i < G; ++i) grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (G - 1);
    std::vector<std::vector<double>> dens;
    for (const auto* c : cols) dens.push_back(kernel_density(*c, grid));
    std::string csv = "x";
    for (auto m : cfg.methods) csv += "," + std::string(to_string(m));
    csv += ",Limit\n";
    for (int i = 0; i < G; ++i) {
      csv += fmt(grid[static_cast<std::size_t>(i)]);
      for (const auto& d : dens) csv += "," + fmt(d[static_cast<std::size_t>(i)]);
      csv += "\n";
    }
    const fs::path p = base / ("density_n" + std::to_string(sz.n) + ".csv");
    write_file(p, csv);
    written.push_back(p.string());
  }
  return written;
}

}  // namespace arfima

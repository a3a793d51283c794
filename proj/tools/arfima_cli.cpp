// Command-line front end: simulate, estimate, pseudo-true, contour, asymptotic-dist, monte-carlo.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "arfima/asymptotics.hpp"
#include "arfima/errors.hpp"
#include "arfima/estimators.hpp"
#include "arfima/experiment.hpp"
#include "arfima/pseudo_true.hpp"
#include "arfima/simulate.hpp"

using namespace arfima;
using nlohmann::json;

namespace {

// Inline JSON if the argument starts with '{', else a file path.
json load_json(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + arg);
  return json::parse(in);
}

ArfimaSpec spec_from_json(const json& j) {
  ArfimaSpec s;
  s.phi = j.value("phi", std::vector<double>{});
  s.d = j.value("d", 0.0);
  s.theta = j.value("theta", std::vector<double>{});
  s.sigma2 = j.value("sigma2", 1.0);
  return s;
}

MisSpecPair pair_from_json(const json& j) {
  MisSpecPair p;
  p.tdgp = spec_from_json(j.at("tdgp"));
  p.family.p = j.at("family").value("p", 0);
  p.family.q = j.at("family").value("q", 0);
  return p;
}

json eta_json(const EtaVector& e) { return {{"d", e.d}, {"beta", e.beta}}; }

std::vector<double> parse_grid(const std::string& g) {
  // lo:hi:count
  double lo = 0, hi = 0;
  int count = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(g);
  if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1)
    throw Error(ErrorCode::InvalidArgument, "grid must be lo:hi:count, got '" + g + "'");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  return out;
}

std::vector<double> read_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<double> y;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    try {
      y.push_back(std::stod(line));
    } catch (const std::exception&) {
      // header line
    }
  }
  return y;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw Error(ErrorCode::IoError, "cannot write " + path);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ARFIMA estimation under mis-specification"};
  app.require_subcommand(1);

  // simulate
  std::string sim_spec, sim_out;
  int sim_n = 0, sim_reps = 1;
  std::uint64_t sim_seed = 0;
  auto* sim = app.add_subcommand("simulate", "Exact Gaussian ARFIMA draws, one column per replication");
  sim->add_option("--spec", sim_spec, "ARFIMA spec JSON (inline or file)")->required();
  sim->add_option("--n", sim_n, "Series length")->required()->check(CLI::PositiveNumber);
  sim->add_option("--reps", sim_reps, "Replications")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "Seed");
  sim->add_option("--out", sim_out, "Output CSV (default stdout)");

  // estimate
  std::string est_input, est_method = "css";
  int est_p = 0, est_q = 0;
  auto* est = app.add_subcommand("estimate", "Fit an ARFIMA(p,d,q) to one series");
  est->add_option("--input", est_input, "One value per line")->required();
  est->add_option("--method", est_method, "fml | whittle | tml | css");
  est->add_option("--p", est_p, "AR order");
  est->add_option("--q", est_q, "MA order");

  // pseudo-true
  std::string pt_pair;
  auto* pt = app.add_subcommand("pseudo-true", "Solve for the pseudo-true parameters");
  pt->add_option("--pair", pt_pair, "{tdgp, family} JSON")->required();

  // contour
  std::string ct_pair, ct_d = "-0.4:0.4:81", ct_beta = "-0.9:0.9:73", ct_out;
  auto* ct = app.add_subcommand("contour", "Limiting criterion over a (d, beta_1) grid");
  ct->add_option("--pair", ct_pair, "{tdgp, family} JSON")->required();
  ct->add_option("--d-grid", ct_d, "lo:hi:count on the fitted d axis");
  ct->add_option("--beta-grid", ct_beta, "lo:hi:count for beta_1");
  ct->add_option("--out", ct_out, "Output CSV (default stdout)");

  // asymptotic-dist
  std::string ad_pair, ad_method = "fml", ad_out, ad_meta;
  int ad_n = 0, ad_samples = 10000, ad_s = 0;
  double ad_sn = -1.0;
  std::uint64_t ad_seed = 0;
  bool ad_general = false;
  auto* ad = app.add_subcommand("asymptotic-dist", "Draws from the limit law and its metadata");
  ad->add_option("--pair", ad_pair, "{tdgp, family} JSON")->required();
  ad->add_option("--method", ad_method, "fml | whittle | tml | css");
  ad->add_option("--n", ad_n, "Sample size")->required()->check(CLI::PositiveNumber);
  ad->add_option("--samples", ad_samples, "Number of draws")->check(CLI::PositiveNumber);
  ad->add_option("--seed", ad_seed, "Seed");
  ad->add_option("--s", ad_s, "Case 1 truncation point (default floor(n/2)-1)");
  ad->add_option("--S-n", ad_sn, "Case 1: choose s by matching this FML variance");
  ad->add_flag("--general-const", ad_general, "Use g0(0)/g1(beta,0) in W_j");
  ad->add_option("--out", ad_out, "Draws CSV (default stdout)");
  ad->add_option("--meta", ad_meta, "Metadata JSON (default stderr)");

  // monte-carlo
  std::string mc_config, mc_out;
  auto* mc = app.add_subcommand("monte-carlo", "Paired Monte Carlo over methods and sample sizes");
  mc->add_option("--config", mc_config, "ExperimentConfig JSON")->required();
  mc->add_option("--out", mc_out, "Output directory (overrides config.outputs)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const auto spec = spec_from_json(load_json(sim_spec));
      GaussianSimulator g(spec, sim_n);
      const auto cols = g.draw_batch(sim_seed, sim_reps);
      std::ofstream f;
      auto& out = open_out(sim_out, f);
      out.precision(17);
      for (int r = 0; r < sim_reps; ++r) out << (r ? "," : "") << "r" << r;
      out << "\n";
      for (int t = 0; t < sim_n; ++t) {
        for (int r = 0; r < sim_reps; ++r) out << (r ? "," : "") << cols[r][t];
        out << "\n";
      }
    } else if (*est) {
      const auto y = read_series(est_input);
      const auto kind = estimator_from_string(est_method);
      const auto r = estimate(kind, {est_p, est_q}, y);
      json j = {{"method", std::string(to_string(kind))},
                {"n", y.size()},
                {"eta", eta_json(r.eta_hat)},
                {"sigma2", r.sigma2_hat},
                {"objective", r.objective},
                {"iterations", r.iterations},
                {"converged", r.converged}};
      std::cout << j.dump(2) << "\n";
    } else if (*pt) {
      const auto pair = pair_from_json(load_json(pt_pair));
      const auto s = solve_pseudo_true(pair);
      json j = {{"eta1", eta_json(s.eta1)},
                {"d_star", s.d_star},
                {"K", s.K},
                {"grad_norm", s.grad_norm},
                {"truncation_N", s.truncation_N},
                {"case", static_cast<int>(classify_dstar(s.d_star))}};
      std::cout << j.dump(2) << "\n";
    } else if (*ct) {
      const auto pair = pair_from_json(load_json(ct_pair));
      const auto dg = parse_grid(ct_d);
      const auto bg = pair.family.l() == 0 ? std::vector<double>{} : parse_grid(ct_beta);
      const auto g = q_contour_grid(pair, dg, bg);
      std::ofstream f;
      auto& out = open_out(ct_out, f);
      out.precision(17);
      out << "d,beta1,Q\n";
      for (std::size_t i = 0; i < g.d_grid.size(); ++i)
        for (std::size_t k = 0; k < g.Q[i].size(); ++k)
          out << g.d_grid[i] << "," << (g.beta_grid.empty() ? 0.0 : g.beta_grid[k]) << "," << g.Q[i][k] << "\n";
    } else if (*ad) {
      const auto pair = pair_from_json(load_json(ad_pair));
      const auto kind = estimator_from_string(ad_method);
      const auto sol = solve_pseudo_true(pair);
      LimitLawOptions o;
      o.S_n = ad_sn;
      o.s_override = ad_s;
      o.variant = ad_general ? WConstVariant::General : WConstVariant::ArmaVariance;
      const auto law = build_limit_law(pair, sol.eta1, ad_n, kind, o);
      const auto draws = sample_limit(law, ad_samples, ad_seed);
      json meta = {{"case", static_cast<int>(law.which)},
                   {"method", std::string(to_string(kind))},
                   {"n", ad_n},
                   {"eta1", eta_json(sol.eta1)},
                   {"d_star", law.dstar},
                   {"rate", law.rate},
                   {"rate_label", law.rate_label}};
      json B = json::array();
      for (Eigen::Index i = 0; i < law.B.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < law.B.cols(); ++k) row.push_back(law.B(i, k));
        B.push_back(row);
      }
      meta["B"] = B;
      if (const auto* c1 = std::get_if<Case1Law>(&law.detail)) {
        meta["mu_n"] = c1->mu_n;
        meta["s"] = c1->s;
        meta["w_const"] = c1->g_ratio_const;
        meta["jitter"] = c1->sampler.jitter;
      } else if (const auto* c2 = std::get_if<Case2Law>(&law.detail)) {
        meta["lambda_bar_dd"] = c2->lambda_bar_dd;
      } else if (const auto* c3 = std::get_if<Case3Law>(&law.detail)) {
        meta["Xi_dd"] = c3->Xi(0, 0);
      }
      std::ofstream f;
      auto& out = open_out(ad_out, f);
      out.precision(17);
      out << "draw\n";
      for (double v : draws) out << v << "\n";
      if (ad_meta.empty()) {
        std::cerr << meta.dump(2) << "\n";
      } else {
        std::ofstream m(ad_meta);
        if (!m) throw Error(ErrorCode::IoError, "cannot write " + ad_meta);
        m << meta.dump(2) << "\n";
      }
    } else if (*mc) {
      auto cfg = config_from_json(load_json(mc_config));
      if (!mc_out.empty()) cfg.outputs = mc_out;
      const auto rep = run_monte_carlo(cfg);
      for (const auto& p : emit_report(rep, cfg.outputs)) std::cout << p << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::FailureThreshold ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

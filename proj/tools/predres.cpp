// predres: predictive-distribution engine and predictive-resampling CLI.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <iostream>

#include "predres/diagnostics.hpp"
#include "predres/io.hpp"
#include "predres/resampler.hpp"

using namespace predres;

namespace {

WeightSchedule parse_weights(const std::string& text) {
  if (text == "a") return WeightSchedule::schedule_a();
  if (text == "b") return WeightSchedule::schedule_b();
  if (text.rfind("const:", 0) == 0) {
    return WeightSchedule::constant(std::stod(text.substr(6)));
  }
  if (text.rfind("file:", 0) == 0) {
    Matrix m = load_dataset(text.substr(5));
    std::vector<double> values(m.data(), m.data() + m.size());
    return WeightSchedule::custom(std::move(values), false, false, false);
  }
  throw CLI::ValidationError("--weights", "expected a|b|const:<r>|file:<path>");
}

std::vector<double> parse_rho_grid(const std::string& text) {
  // lo:hi:step
  auto p1 = text.find(':');
  auto p2 = text.find(':', p1 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos) {
    throw CLI::ValidationError("--rho-grid", "expected lo:hi:step");
  }
  double lo = std::stod(text.substr(0, p1));
  double hi = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
  double step = std::stod(text.substr(p2 + 1));
  std::vector<double> grid;
  for (double r = lo; r <= hi + 1e-12; r += step) grid.push_back(r);
  return grid;
}

std::vector<long> parse_long_list(const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stol(cell));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictive-resampling engine"};
  app.require_subcommand(1);

  // shared options
  std::string data_path, out_dir = ".", kernel_text = "gaussian";
  std::string mode_text = "empirical", weights_text = "a";
  std::string estimand_text = "mean", family_text = "meanvar";
  std::string rho_grid_text;
  double rho = -1.0;
  double grid_min = -10.0, grid_max = 10.0;
  int grid_size = 2001;
  long N = 0, B = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
  bool allow_degenerate = false;

  auto add_grid_opts = [&](CLI::App* cmd) {
    cmd->add_option("--grid-min", grid_min);
    cmd->add_option("--grid-max", grid_max);
    cmd->add_option("--grid-size", grid_size);
  };

  // ---- pr ----
  auto* pr = app.add_subcommand("pr", "posterior estimation by PR");
  pr->add_option("--data", data_path)->required();
  pr->add_option("--estimand", estimand_text)
      ->check(CLI::IsMember({"mean", "variance"}));
  pr->add_option("--family", family_text)
      ->check(CLI::IsMember({"meanvar", "copula"}));
  pr->add_option("--N", N);
  pr->add_option("--B", B);
  pr->add_option("--seed", seed);
  pr->add_option("--kernel", kernel_text);
  pr->add_option("--mode", mode_text)
      ->check(CLI::IsMember({"empirical", "regularized"}));
  pr->add_option("--rho", rho);
  pr->add_option("--rho-grid", rho_grid_text);
  pr->add_option("--weights", weights_text);
  add_grid_opts(pr);
  pr->add_option("--out", out_dir);
  pr->add_option("--threads", threads);
  pr->add_flag("--allow-degenerate", allow_degenerate);
  bool write_kde = false;
  double bandwidth = 0.0;
  pr->add_flag("--kde", write_kde, "also write posterior_density.csv");
  pr->add_option("--bandwidth", bandwidth, "KDE bandwidth (0 = automatic)");

  // ---- converge ----
  auto* conv = app.add_subcommand("converge", "L1 convergence-path series");
  long n_max = 2000, every = 10;
  conv->add_option("--family", family_text)
      ->check(CLI::IsMember({"meanvar", "copula"}));
  conv->add_option("--kernel", kernel_text);
  conv->add_option("--rho", rho);
  conv->add_option("--weights", weights_text);
  conv->add_option("--n-max", n_max);
  conv->add_option("--every", every, "checkpoint spacing");
  conv->add_option("--seed", seed);
  add_grid_opts(conv);
  conv->add_option("--out", out_dir);

  // ---- rate ----
  auto* rate = app.add_subcommand("rate", "convergence-rate table");
  double gamma = 0.4;
  int reps = 200;
  long limit_factor = 100;
  std::string n_list_text = "100,1000,10000";
  rate->add_option("--gamma", gamma);
  rate->add_option("--n-list", n_list_text);
  rate->add_option("--reps", reps);
  rate->add_option("--limit-factor", limit_factor);
  rate->add_option("--seed", seed);
  rate->add_option("--kernel", kernel_text);
  rate->add_option("--out", out_dir);

  // ---- select-rho ----
  auto* sel = app.add_subcommand("select-rho", "prequential rho fit");
  sel->add_option("--data", data_path)->required();
  sel->add_option("--rho-grid", rho_grid_text);
  sel->add_option("--weights", weights_text);
  add_grid_opts(sel);
  sel->add_option("--out", out_dir);

  // ---- check ----
  auto* check = app.add_subcommand("check", "convergence verdicts + reports");
  double copula_bound = -1.0;
  long mart_draws = 0;
  check->add_option("--weights", weights_text);
  check->add_option("--rho", rho);
  check->add_option("--copula-bound", copula_bound);
  check->add_option("--martingale-draws", mart_draws,
                    "run a martingale report on a simulated history");
  check->add_option("--kernel", kernel_text);
  check->add_option("--seed", seed);

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "timing sweep over (s, N)");
  std::string s_list_text = "50,100,500";
  std::string bench_n_list = "50,500";
  bench->add_option("--s-list", s_list_text);
  bench->add_option("--n-list", bench_n_list);
  bench->add_option("--B", B);
  bench->add_option("--seed", seed);
  add_grid_opts(bench);
  bench->add_option("--out", out_dir);

  // flat key=value config file per subcommand; explicit flags win
  for (auto* sub : {pr, conv, rate, sel, check, bench}) {
    sub->set_config("--config");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    ensure_directory(out_dir);
    std::filesystem::path out(out_dir);

    if (pr->parsed()) {
      Matrix data = load_dataset(data_path);
      ResamplingPlan plan;
      plan.N = N;
      plan.B = B;
      plan.seed = seed;
      plan.threads = threads;
      plan.allow_degenerate = allow_degenerate;
      plan.estimand =
          estimand_text == "mean" ? Estimand::Mean : Estimand::Variance;
      if (family_text == "meanvar") {
        MeanVarFamily f{parse_kernel(kernel_text,
                                     static_cast<int>(data.cols())),
                        mode_text == "empirical" ? StatsMode::Empirical
                                                 : StatsMode::Regularized};
        plan.family = std::move(f);
      } else {
        CopulaFamily f;
        if (rho >= 0.0) f.rho = rho;
        if (!rho_grid_text.empty()) f.rho_grid = parse_rho_grid(rho_grid_text);
        f.schedule = parse_weights(weights_text);
        f.grid_min = grid_min;
        f.grid_max = grid_max;
        f.grid_size = grid_size;
        plan.family = std::move(f);
      }
      PosteriorSample ps = run_pr(plan, data);
      write_thetas_csv(out / "thetas.csv", ps.thetas);

      nlohmann::json cfg;
      cfg["data"] = data_path;
      cfg["s"] = data.rows();
      cfg["p"] = data.cols();
      cfg["estimand"] = estimand_text;
      cfg["family"] = family_text;
      cfg["N"] = N;
      cfg["B"] = B;
      cfg["seed"] = seed;
      cfg["kernel"] = kernel_text;
      cfg["mode"] = mode_text;
      cfg["weights"] = weights_text;
      if (rho >= 0.0) cfg["rho"] = rho;
      if (!rho_grid_text.empty()) cfg["rho_grid"] = rho_grid_text;
      cfg["grid_min"] = grid_min;
      cfg["grid_max"] = grid_max;
      cfg["grid_size"] = grid_size;
      write_summary_json(out / "summary.json", cfg, ps);

      if (write_kde) {
        std::optional<double> h;
        if (bandwidth > 0.0) h = bandwidth;
        Summary s = ps.summary;
        double hh = bandwidth > 0.0
                        ? bandwidth
                        : 0.9 * std::sqrt(s.variance) *
                              std::pow(static_cast<double>(B), -0.2);
        auto grid = kde_default_grid(ps.thetas, hh);
        write_density_csv(out / "posterior_density.csv",
                          kde(ps.thetas, h, grid));
      }
      std::cout << "mean=" << ps.summary.mean
                << " variance=" << ps.summary.variance;
      if (ps.selected_rho) std::cout << " rho=" << *ps.selected_rho;
      std::cout << " seconds=" << ps.seconds << "\n";
    } else if (conv->parsed()) {
      PathConfig cfg;
      cfg.use_copula = family_text == "copula";
      cfg.kernel = parse_kernel(kernel_text, 1);
      cfg.rho = rho >= 0.0 ? rho : 0.9;
      cfg.schedule = parse_weights(weights_text);
      cfg.grid_min = grid_min;
      cfg.grid_max = grid_max;
      cfg.grid_size = grid_size;
      std::vector<long> cps;
      for (long n = 0; n <= n_max; n += every) cps.push_back(n);
      auto path = convergence_path(cfg, n_max, cps, seed);
      std::vector<std::pair<double, double>> rows;
      for (const auto& p : path) {
        rows.emplace_back(static_cast<double>(p.n), p.l1_to_f0);
      }
      write_series_csv(out / "convergence.csv", "n,l1", rows);
      std::cout << "stabilization_index=" << stabilization_index(path)
                << "\n";
    } else if (rate->parsed()) {
      auto rows = rate_experiment(parse_kernel(kernel_text, 1),
                                  parse_long_list(n_list_text), gamma, reps,
                                  seed, limit_factor);
      std::vector<std::pair<double, double>> series;
      for (const auto& r : rows) {
        series.emplace_back(static_cast<double>(r.n), r.median_scaled_tv);
        std::cout << "n=" << r.n << " median=" << r.median_scaled_tv << "\n";
      }
      write_series_csv(out / "rate.csv", "n,median_scaled_tv", series);
    } else if (sel->parsed()) {
      Matrix data = load_dataset(data_path);
      if (data.cols() != 1) throw std::runtime_error("select-rho needs p=1");
      std::vector<double> xs(data.data(), data.data() + data.rows());
      auto grid = rho_grid_text.empty() ? default_rho_grid()
                                        : parse_rho_grid(rho_grid_text);
      auto f0 = GriddedDensity::standard_normal(grid_min, grid_max, grid_size);
      auto res = select_rho(xs, grid, parse_weights(weights_text), f0);
      std::vector<std::pair<double, double>> rows;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        rows.emplace_back(grid[i], res.scores[i]);
      }
      write_series_csv(out / "rho_scores.csv", "rho,prequential_loglik", rows);
      std::cout << "selected_rho=" << res.rho << "\n";
    } else if (check->parsed()) {
      std::optional<double> bound;
      if (copula_bound > 0.0) {
        bound = copula_bound;
      } else if (rho == 0.0) {
        bound = 1.0;  // independence copula
      }
      auto verdict = check_tv_conditions(parse_weights(weights_text), bound);
      std::cout << "verdict=" << to_string(verdict) << "\n";
      if (mart_draws > 0) {
        auto kernel = parse_kernel(kernel_text, 1);
        SufficientStats hist(1, StatsMode::Regularized);
        Rng rng = substream(seed, 12345);
        for (int i = 0; i < 20; ++i) {
          Vector x(1);
          x(0) = rng.normal();
          hist.absorb(x);
        }
        auto rep = martingale_report(kernel, hist, mart_draws, seed);
        std::cout << "martingale_pass=" << (rep.pass ? "yes" : "no")
                  << " max|z_Q|=" << rep.q_zscores.cwiseAbs().maxCoeff()
                  << " max|z_M|=" << rep.m_zscores.cwiseAbs().maxCoeff()
                  << "\n";
      }
    } else if (bench->parsed()) {
      auto s_list = parse_long_list(s_list_text);
      auto n_list = parse_long_list(bench_n_list);
      std::ofstream outf(out / "bench.csv");
      outf << "family,s,N,seconds\n";
      for (long s : s_list) {
        Rng rng = substream(seed, static_cast<std::uint64_t>(s));
        Matrix data(s, 1);
        for (long i = 0; i < s; ++i) data(i, 0) = rng.normal();
        for (long n : n_list) {
          ResamplingPlan plan;
          plan.N = n;
          plan.B = B;
          plan.seed = seed;
          plan.estimand = Estimand::Mean;
          plan.family = MeanVarFamily{KernelSpec::gaussian(1),
                                      StatsMode::Empirical};
          auto mv = run_pr(plan, data);
          plan.family = CopulaFamily{};
          auto cp = run_pr(plan, data);
          outf << "meanvar," << s << ',' << n << ',' << mv.seconds << "\n";
          outf << "copula," << s << ',' << n << ',' << cp.seconds << "\n";
          std::cout << "s=" << s << " N=" << n << " meanvar=" << mv.seconds
                    << "s copula=" << cp.seconds << "s\n";
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

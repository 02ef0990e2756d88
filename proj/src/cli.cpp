#include "trendfilter/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "trendfilter/csv.hpp"
#include "trendfilter/error.hpp"
#include "trendfilter/inference.hpp"
#include "trendfilter/kalman.hpp"
#include "trendfilter/likelihood.hpp"
#include "trendfilter/misspec.hpp"
#include "trendfilter/model.hpp"

namespace trendfilter::cli {

namespace {

// File I/O problems are usage errors, not numerical ones.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  double lambda = 1.0;
  double sigma_mu = 0.9;
  double sigma_s = 0.3;
  double delta = 1.0 / 252.0;

  MarketParams params() const { return {{lambda, sigma_mu}, sigma_s, delta}; }
};

struct StarFlags {
  double lambda_star = 1.0;
  double sigma_mu_star = 0.9;
  double sigma_s = 0.3;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_trend = true) {
  if (with_trend) {
    cmd->add_option("--lambda", f.lambda, "Trend mean-reversion rate lambda_mu (1/year)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--sigma-mu", f.sigma_mu, "Trend volatility sigma_mu (1/year)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  cmd->add_option("--sigma-s", f.sigma_s, "Spot volatility sigma_S (1/sqrt(year))")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--delta", f.delta, "Observation step in years (default 1/252)")
      ->check(CLI::PositiveNumber);
}

void add_star_flags(CLI::App* cmd, StarFlags& f) {
  cmd->add_option("--lambda-star", f.lambda_star, "True trend mean-reversion rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--sigma-mu-star", f.sigma_mu_star, "True trend volatility")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--sigma-s", f.sigma_s, "Spot volatility sigma_S")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::vector<double> read_y(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file '" + path + "'");
  return csv::read_series(in).y;
}

csv::Series read_series_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file '" + path + "'");
  return csv::read_series(in);
}

// Writes to `path`, or to `out` when the path is empty.
void emit(const std::string& path, std::ostream& out,
          const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw UsageError("cannot open output file '" + path + "'");
  body(file);
  if (!file) throw UsageError("failed writing '" + path + "'");
}

// The two axes of a (lambda, sigma_mu) sweep.
std::pair<std::vector<double>, std::vector<double>> trend_grid(const std::string& text) {
  std::vector<double> lambdas;
  std::vector<double> sigmas;
  for (const GridSpec& axis : parse_grid(text)) {
    if (axis.name == "lambda") {
      lambdas = axis.values();
    } else if (axis.name == "sigma_mu") {
      sigmas = axis.values();
    } else {
      throw InvalidParameter("unknown grid axis '" + axis.name + "' (expected lambda, sigma_mu)");
    }
    if (axis.min <= 0.0) throw InvalidParameter("grid axis '" + axis.name + "' must be positive");
  }
  if (lambdas.empty() || sigmas.empty()) {
    throw InvalidParameter("grid needs both lambda and sigma_mu axes");
  }
  return {lambdas, sigmas};
}

// Evaluates `cell` over the grid; rows are ordered lambda-major regardless of threading.
void sweep(std::ostream& out, const std::string& header, const std::string& grid_text,
           const std::function<std::vector<double>(double, double)>& cell) {
  const auto [lambdas, sigmas] = trend_grid(grid_text);
  const std::size_t cols = sigmas.size();
  const auto total = static_cast<long long>(lambdas.size() * cols);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(total));
  std::string failure;
  bool numerical = false;
#pragma omp parallel for schedule(dynamic)
  for (long long idx = 0; idx < total; ++idx) {
    const auto i = static_cast<std::size_t>(idx) / cols;
    const auto j = static_cast<std::size_t>(idx) % cols;
    try {
      std::vector<double> row{lambdas[i], sigmas[j]};
      const auto values = cell(lambdas[i], sigmas[j]);
      row.insert(row.end(), values.begin(), values.end());
      rows[static_cast<std::size_t>(idx)] = std::move(row);
    } catch (const NumericalError& e) {
#pragma omp critical
      {
        if (failure.empty()) failure = e.what();
        numerical = true;
      }
    } catch (const std::exception& e) {
#pragma omp critical
      {
        if (failure.empty()) failure = e.what();
      }
    }
  }
  if (!failure.empty()) {
    if (numerical) throw NumericalError(failure);
    throw InvalidParameter(failure);
  }
  out << header << '\n';
  for (const auto& row : rows) csv::write_row(out, row);
}

}  // namespace

std::vector<double> GridSpec::values() const {
  std::vector<double> v(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(steps - 1);
    v[i] = log_spacing ? std::exp(std::log(min) + frac * (std::log(max) - std::log(min)))
                       : min + frac * (max - min);
  }
  v.back() = max;
  return v;
}

GridSpec parse_grid_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidParameter("grid axis '" + text + "' must look like name=min:max:steps[:log]");
  }
  GridSpec spec;
  spec.name = text.substr(0, eq);
  std::vector<std::string> parts;
  std::stringstream ss(text.substr(eq + 1));
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() < 3 || parts.size() > 4) {
    throw InvalidParameter("grid axis '" + text + "' must look like name=min:max:steps[:log]");
  }
  try {
    std::size_t used = 0;
    spec.min = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("min");
    spec.max = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("max");
    const long steps = std::stol(parts[2], &used);
    if (used != parts[2].size() || steps < 2) throw std::invalid_argument("steps");
    spec.steps = static_cast<std::size_t>(steps);
  } catch (const std::exception&) {
    throw InvalidParameter("grid axis '" + text + "': bad number or steps < 2");
  }
  if (parts.size() == 4) {
    if (parts[3] == "log") {
      spec.log_spacing = true;
    } else if (parts[3] != "lin") {
      throw InvalidParameter("grid axis '" + text + "': spacing must be 'lin' or 'log'");
    }
  }
  if (!(spec.min < spec.max)) throw InvalidParameter("grid axis '" + text + "': min must be < max");
  if (spec.log_spacing && spec.min <= 0.0) {
    throw InvalidParameter("grid axis '" + text + "': log spacing needs min > 0");
  }
  return spec;
}

std::vector<GridSpec> parse_grid(const std::string& text) {
  std::vector<GridSpec> axes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) axes.push_back(parse_grid_axis(item));
  if (axes.empty()) throw InvalidParameter("empty grid");
  return axes;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trend filtering, likelihood and mis-specification toolkit for an asset with a "
               "hidden Ornstein-Uhlenbeck trend",
               "trendfilter"};
  app.require_subcommand(1);

  // simulate
  ModelFlags sim_model;
  std::size_t sim_n = 2520;
  std::uint64_t sim_seed = 1;
  bool sim_stationary = false;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "Simulate a path; writes CSV t,mu,y");
  add_model_flags(sim, sim_model);
  sim->add_option("--n", sim_n, "Number of steps")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
  sim->add_flag("--stationary-start", sim_stationary, "Draw mu_0 from the stationary law");
  sim->add_option("--out", sim_out, "Output file (stdout when omitted)");

  // filter
  ModelFlags filt_model;
  std::string filt_in;
  std::string filt_out;
  std::string filt_method = "kalman";
  bool filt_stationary = false;
  auto* filt = app.add_subcommand("filter", "Filter a return series; writes CSV t,y,mu_hat,gamma");
  add_model_flags(filt, filt_model);
  filt->add_option("--in", filt_in, "Input CSV with a y column")->required();
  filt->add_option("--out", filt_out, "Output file (stdout when omitted)");
  filt->add_option("--method", filt_method, "kalman or ewma (stationary gain)")
      ->check(CLI::IsMember({"kalman", "ewma"}))
      ->capture_default_str();
  filt->add_flag("--stationary-start", filt_stationary,
                 "Initialize Gamma_{0/0} at the stationary trend variance");

  // loglik
  ModelFlags ll_model;
  std::string ll_in;
  std::string ll_method = "kalman";
  auto* ll = app.add_subcommand("loglik", "Exact Gaussian log-likelihood of a return series");
  add_model_flags(ll, ll_model);
  ll->add_option("--in", ll_in, "Input CSV with a y column")->required();
  ll->add_option("--method", ll_method, "direct, recursive or kalman")
      ->check(CLI::IsMember({"direct", "recursive", "kalman"}))
      ->capture_default_str();

  // fit
  ModelFlags fit_model;
  std::string fit_in;
  double fit_init_lambda = 1.0;
  double fit_init_sigma = 0.5;
  std::size_t fit_max_iter = 500;
  auto* fit = app.add_subcommand("fit", "Maximum-likelihood fit of (lambda_mu, sigma_mu)");
  add_model_flags(fit, fit_model, false);
  fit->add_option("--in", fit_in, "Input CSV with a y column")->required();
  fit->add_option("--init-lambda", fit_init_lambda, "Starting lambda_mu")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_option("--init-sigma-mu", fit_init_sigma, "Starting sigma_mu")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_option("--max-iter", fit_max_iter, "Simplex iteration cap")->capture_default_str();

  // crb
  ModelFlags crb_model;
  std::string crb_grid = "lambda=0.5:5:10,sigma_mu=0.1:0.9:9";
  double crb_target_lambda = 0.5;
  double crb_target_sigma = 0.05;
  std::string crb_out;
  auto* crb = app.add_subcommand(
      "crb", "Cramer-Rao observation horizons; writes CSV lambda,sigma_mu,T_lambda_x,T_sigma_x");
  add_model_flags(crb, crb_model, false);
  crb->add_option("--grid", crb_grid, "Grid lambda=min:max:steps[:log],sigma_mu=...")
      ->capture_default_str();
  crb->add_option("--target-lambda", crb_target_lambda, "Target std on lambda_mu")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  crb->add_option("--target-sigma-mu", crb_target_sigma, "Target std on sigma_mu")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  crb->add_option("--out", crb_out, "Output file (stdout when omitted)");

  // misspec
  StarFlags mis_star;
  std::string mis_grid = "lambda=0.5:5:10,sigma_mu=0.1:0.9:9";
  std::string mis_out;
  auto* mis = app.add_subcommand(
      "misspec", "Asymptotic residual std over agent parameters; writes CSV lambda,sigma_mu,residual_std");
  add_star_flags(mis, mis_star);
  mis->add_option("--grid", mis_grid, "Agent grid lambda=...,sigma_mu=...")->capture_default_str();
  mis->add_option("--out", mis_out, "Output file (stdout when omitted)");

  // detect
  StarFlags det_star;
  std::string det_grid = "lambda=0.5:5:10,sigma_mu=0.1:0.9:9";
  std::string det_out;
  double det_x = 0.0;
  auto* det = app.add_subcommand(
      "detect", "P(trend > 0 | estimate = x) over agent parameters; writes CSV lambda,sigma_mu,prob");
  add_star_flags(det, det_star);
  det->add_option("--grid", det_grid, "Agent grid lambda=...,sigma_mu=...")->capture_default_str();
  auto* det_x_opt = det->add_option(
      "--x", det_x, "Fixed estimate level (default: the asymptotic filter std of each cell)");
  det->add_option("--out", det_out, "Output file (stdout when omitted)");

  // mc-check
  StarFlags mc_star;
  double mc_lambda = 1.0;
  double mc_sigma = 0.9;
  double mc_delta = 1.0 / 252.0;
  double mc_horizon = 30.0;
  std::size_t mc_paths = 10000;
  std::uint64_t mc_seed = 1;
  auto* mc = app.add_subcommand(
      "mc-check", "Monte Carlo residual variance of the Euler-stepped filter vs closed form");
  add_star_flags(mc, mc_star);
  mc->add_option("--lambda", mc_lambda, "Agent lambda_mu")->check(CLI::PositiveNumber)->capture_default_str();
  mc->add_option("--sigma-mu", mc_sigma, "Agent sigma_mu")->check(CLI::PositiveNumber)->capture_default_str();
  mc->add_option("--delta", mc_delta, "Simulation step in years (default 1/252)")->check(CLI::PositiveNumber);
  mc->add_option("--horizon", mc_horizon, "Years simulated per path")->check(CLI::PositiveNumber)->capture_default_str();
  mc->add_option("--paths", mc_paths, "Number of paths (>= 100)")->capture_default_str();
  mc->add_option("--seed", mc_seed, "RNG seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (const auto nl = msg.find('\n'); nl != std::string::npos) msg.resize(nl);
    err << "trendfilter: " << msg << '\n';
    return kExitUsage;
  }

  try {
    if (*sim) {
      const PathSample path =
          simulate(sim_model.params(), sim_n, sim_seed,
                   sim_stationary ? TrendStart::kStationary : TrendStart::kZero);
      emit(sim_out, out, [&](std::ostream& os) { csv::write_path(os, path, sim_model.delta); });
    } else if (*filt) {
      const MarketParams params = filt_model.params();
      validate(params);
      const csv::Series series = read_series_file(filt_in);
      std::vector<kalman::KalmanState> states;
      if (filt_method == "kalman") {
        const auto init = filt_stationary ? kalman::stationary_initial_state(params.trend)
                                          : kalman::initial_state();
        states = kalman::kalman_filter(series.y, params, init).states;
      } else {
        const double gamma_inf = kalman::steady_state(params).gamma_inf;
        for (const double m : kalman::ewma_filter(series.y, params)) states.push_back({m, gamma_inf});
      }
      emit(filt_out, out, [&](std::ostream& os) { csv::write_filter(os, series, states); });
    } else if (*ll) {
      const MarketParams params = ll_model.params();
      validate(params);
      const std::vector<double> y = read_y(ll_in);
      double value = 0.0;
      if (ll_method == "direct") {
        value = likelihood::loglik_direct(y, params);
      } else if (ll_method == "recursive") {
        value = likelihood::loglik_recursive(y, params);
      } else {
        value = likelihood::loglik_kalman(y, params);
      }
      out << "loglik=" << csv::format(value) << " method=" << ll_method << " n=" << y.size() << '\n';
    } else if (*fit) {
      const std::vector<double> y = read_y(fit_in);
      inference::MleOptions options;
      options.simplex.max_iterations = fit_max_iter;
      const auto res = inference::mle_fit(y, fit_model.sigma_s, fit_model.delta,
                                          {fit_init_lambda, fit_init_sigma}, options);
      if (res.at_boundary) {
        err << "trendfilter: warning: fit reached the parameter bound (degenerate data?)\n";
      }
      out << "lambda_hat,sigma_mu_hat,loglik,converged\n";
      out << csv::format(res.theta.lambda_mu) << ',' << csv::format(res.theta.sigma_mu) << ','
          << csv::format(res.log_likelihood) << ',' << (res.converged ? "true" : "false") << '\n';
    } else if (*crb) {
      emit(crb_out, out, [&](std::ostream& os) {
        sweep(os, "lambda,sigma_mu,T_lambda_x,T_sigma_x", crb_grid,
              [&](double lambda, double sigma) {
                const MarketParams p{{lambda, sigma}, crb_model.sigma_s, crb_model.delta};
                const auto info = inference::fisher_info(p);
                return std::vector<double>{
                    inference::crb_horizon(info, crb_target_lambda, inference::TrendParam::kLambda),
                    inference::crb_horizon(info, crb_target_sigma, inference::TrendParam::kSigmaMu)};
              });
      });
    } else if (*mis) {
      const TrendParams truth{mis_star.lambda_star, mis_star.sigma_mu_star};
      emit(mis_out, out, [&](std::ostream& os) {
        sweep(os, "lambda,sigma_mu,residual_std", mis_grid, [&](double lambda, double sigma) {
          const misspec::MisspecConfig cfg{truth, {lambda, sigma}, mis_star.sigma_s};
          return std::vector<double>{misspec::residual_std_asym(cfg)};
        });
      });
    } else if (*det) {
      const TrendParams truth{det_star.lambda_star, det_star.sigma_mu_star};
      const bool fixed_x = det_x_opt->count() > 0;
      emit(det_out, out, [&](std::ostream& os) {
        sweep(os, "lambda,sigma_mu,prob", det_grid, [&](double lambda, double sigma) {
          const misspec::MisspecConfig cfg{truth, {lambda, sigma}, det_star.sigma_s};
          const double x = fixed_x ? det_x : misspec::filter_std_asym(cfg);
          return std::vector<double>{misspec::positive_trend_prob(cfg, x)};
        });
      });
    } else if (*mc) {
      const misspec::MisspecConfig cfg{{mc_star.lambda_star, mc_star.sigma_mu_star},
                                       {mc_lambda, mc_sigma},
                                       mc_star.sigma_s};
      const auto est = misspec::residual_mc_check(cfg, mc_delta, mc_horizon, mc_paths, mc_seed);
      const double closed = misspec::residual_variance_asym(cfg);
      if (est.short_horizon) {
        err << "trendfilter: warning: horizon too short for the stationary limit\n";
      }
      out << "empirical_std,closed_form_std,empirical_var,std_error,closed_form_var,z_score\n";
      csv::write_row(out, {std::sqrt(est.variance), std::sqrt(closed), est.variance,
                           est.standard_error, closed,
                           (est.variance - closed) / est.standard_error});
    }
  } catch (const NumericalError& e) {
    err << "trendfilter: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InvalidParameter& e) {
    err << "trendfilter: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "trendfilter: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace trendfilter::cli

#include "genen/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace genen {

const char* method_name(Method m) {
  switch (m) {
    case Method::lasso:
      return "lasso";
    case Method::en:
      return "en";
    case Method::gen:
      return "gen";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "lasso") return Method::lasso;
  if (name == "en") return Method::en;
  if (name == "gen") return Method::gen;
  return std::nullopt;
}

namespace {

double sign_of(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

void validate_penalty(const PenaltyConfig& penalty) {
  if (!(std::isfinite(penalty.lambda) && penalty.lambda >= 0.0) ||
      !(std::isfinite(penalty.eta) && penalty.eta >= 0.0)) {
    throw Error("PenaltyConfig: lambda and eta must be finite and >= 0");
  }
}

void validate_xy(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) {
    throw DimensionError("fit: X has " + std::to_string(X.rows()) +
                         " rows but y has " + std::to_string(y.size()) +
                         " entries");
  }
  if (X.cols() < 1 || X.rows() < 1) {
    throw DimensionError("fit: empty design");
  }
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd g = X.transpose() * X;
  g = 0.5 * (g + g.transpose()).eval();
  return g;
}

/// Max stationarity violation of beta for the system 2(c - G beta) in
/// lambda-scaled z units (lambda > 0) or the raw gradient norm (lambda == 0);
/// grad_half must hold c - G beta.
double kkt_residual_from(const Eigen::VectorXd& grad_half,
                         const Eigen::VectorXd& beta, double lambda) {
  double res = 0.0;
  if (lambda > 0.0) {
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      const double zj = 2.0 * grad_half(j) / lambda;
      const double gap = beta(j) != 0.0 ? std::abs(zj - sign_of(beta(j)))
                                        : std::max(0.0, std::abs(zj) - 1.0);
      res = std::max(res, gap);
    }
  } else {
    res = 2.0 * grad_half.lpNorm<Eigen::Infinity>();
  }
  return res;
}

struct CdCore {
  Eigen::VectorXd beta;
  int sweeps = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  std::vector<double> trace;
};

/// Cyclic coordinate descent with soft-thresholding on
///   f(beta) = beta' G beta - 2 c' beta + lambda |beta|_1.
/// The half-gradient g = c - G beta is maintained incrementally and refreshed
/// whenever convergence is tested.
CdCore cd_gram(const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
               double lambda, Eigen::VectorXd beta, const SolverOptions& opts,
               double yty) {
  const Eigen::Index p = c.size();
  CdCore out;
  Eigen::VectorXd g = c - G * beta;
  const double kkt_tol =
      lambda > 0.0
          ? opts.kkt_tol
          : opts.kkt_tol_smooth * (1.0 + c.lpNorm<Eigen::Infinity>());

  auto objective = [&]() {
    return yty - 2.0 * c.dot(beta) + beta.dot(G * beta) +
           lambda * beta.lpNorm<1>();
  };

  while (out.sweeps < opts.max_sweeps) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double gjj = G(j, j);
      if (!(gjj > 0.0)) {
        // Zero column: the coordinate cannot reduce the objective.
        if (beta(j) != 0.0) {
          g += G.col(j) * beta(j);
          max_delta = std::max(max_delta, std::abs(beta(j)));
          beta(j) = 0.0;
        }
        continue;
      }
      const double zj = g(j) + gjj * beta(j);
      const double nb = soft_threshold(zj, lambda / 2.0) / gjj;
      const double delta = nb - beta(j);
      if (delta != 0.0) {
        g.noalias() -= G.col(j) * delta;
        beta(j) = nb;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    ++out.sweeps;
    if (opts.record_trace) {
      out.trace.push_back(objective());
    }
    if (max_delta < opts.coef_tol * (1.0 + beta.lpNorm<Eigen::Infinity>())) {
      g = c - G * beta;  // drop incremental round-off before checking
      out.kkt_residual = kkt_residual_from(g, beta, lambda);
      if (out.kkt_residual <= kkt_tol) {
        out.converged = true;
        break;
      }
    }
  }
  if (!out.converged) {
    g = c - G * beta;
    out.kkt_residual = kkt_residual_from(g, beta, lambda);
    out.converged = out.kkt_residual <= kkt_tol;
  }
  out.beta = std::move(beta);
  return out;
}

GenEnFit finish_fit(Method method, const PenaltyConfig& penalty, CdCore core,
                    const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
                    double yty, const SymMatrix* sqrt_sigma) {
  GenEnFit fit;
  fit.method = method;
  fit.penalty = penalty;
  fit.iterations = core.sweeps;
  fit.converged = core.converged;
  fit.kkt_residual = core.kkt_residual;
  fit.objective = yty - 2.0 * c.dot(core.beta) + core.beta.dot(G * core.beta) +
                  penalty.lambda * core.beta.lpNorm<1>();
  fit.beta_tilde_hat =
      sqrt_sigma ? (sqrt_sigma->mat() * core.beta).eval() : core.beta;
  fit.beta_hat = std::move(core.beta);
  fit.objective_trace = std::move(core.trace);
  return fit;
}

}  // namespace

GenEnFit fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   double lambda, const SolverOptions& opts) {
  validate_xy(X, y);
  PenaltyConfig penalty{lambda, 0.0};
  validate_penalty(penalty);
  const Eigen::MatrixXd G = gram(X);
  const Eigen::VectorXd c = X.transpose() * y;
  const double yty = y.squaredNorm();
  CdCore core =
      cd_gram(G, c, lambda, Eigen::VectorXd::Zero(X.cols()), opts, yty);
  return finish_fit(Method::lasso, penalty, std::move(core), G, c, yty,
                    nullptr);
}

GenEnFit fit_elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const PenaltyConfig& penalty,
                         const SolverOptions& opts) {
  validate_xy(X, y);
  validate_penalty(penalty);
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd G = gram(X);
  G.diagonal().array() += penalty.eta;
  const Eigen::VectorXd c = X.transpose() * y;
  const double yty = y.squaredNorm();
  CdCore core =
      cd_gram(G, c, penalty.lambda, Eigen::VectorXd::Zero(p), opts, yty);
  return finish_fit(Method::en, penalty, std::move(core), G, c, yty, nullptr);
}

GenEnFit fit_gen_elastic_net(const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, const SymMatrix& Sigma,
                             const PenaltyConfig& penalty,
                             const SolverOptions& opts) {
  validate_xy(X, y);
  validate_penalty(penalty);
  if (Sigma.dim() != X.cols()) {
    throw DimensionError("fit_gen_elastic_net: Sigma dimension " +
                         std::to_string(Sigma.dim()) + " != p = " +
                         std::to_string(X.cols()));
  }
  const SymMatrix sqrt_sigma = mat_power_half(Sigma, HalfPower::plus);
  Eigen::MatrixXd G = gram(X) + penalty.eta * Sigma.mat();
  const Eigen::VectorXd c = X.transpose() * y;
  const double yty = y.squaredNorm();
  CdCore core =
      cd_gram(G, c, penalty.lambda, Eigen::VectorXd::Zero(X.cols()), opts, yty);
  return finish_fit(Method::gen, penalty, std::move(core), G, c, yty,
                    &sqrt_sigma);
}

KktReport kkt_check(const GenEnFit& fit, const Eigen::MatrixXd& X,
                    const Eigen::VectorXd& y, const SymMatrix& Sigma) {
  validate_xy(X, y);
  if (fit.beta_hat.size() != X.cols()) {
    throw DimensionError("kkt_check: fit has " +
                         std::to_string(fit.beta_hat.size()) +
                         " coefficients, X has " + std::to_string(X.cols()) +
                         " columns");
  }
  Eigen::MatrixXd G = gram(X);
  if (fit.method == Method::gen) {
    if (Sigma.dim() != X.cols()) {
      throw DimensionError("kkt_check: Sigma dimension mismatch");
    }
    G += fit.penalty.eta * Sigma.mat();
  } else {
    G.diagonal().array() += fit.penalty.eta;
  }
  const Eigen::VectorXd grad_half = X.transpose() * y - G * fit.beta_hat;
  KktReport report;
  const double lambda = fit.penalty.lambda;
  if (lambda > 0.0) {
    report.z = 2.0 / lambda * grad_half;
    for (Eigen::Index j = 0; j < fit.beta_hat.size(); ++j) {
      if (fit.beta_hat(j) != 0.0) {
        report.active_gap = std::max(
            report.active_gap, std::abs(report.z(j) - sign_of(fit.beta_hat(j))));
      } else {
        report.bound_gap = std::max(report.bound_gap,
                                    std::max(0.0, std::abs(report.z(j)) - 1.0));
      }
    }
  } else {
    // No l1 part: report the raw gradient; the bound gap is its largest
    // absolute entry.
    report.z = -2.0 * grad_half;
    for (Eigen::Index j = 0; j < fit.beta_hat.size(); ++j) {
      const double a = std::abs(report.z(j));
      report.bound_gap = std::max(report.bound_gap, a);
      if (fit.beta_hat(j) != 0.0) {
        report.active_gap = std::max(report.active_gap, a);
      }
    }
  }
  return report;
}

std::vector<GenEnFit> solve_path(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& y,
                                 const SymMatrix& Sigma,
                                 const std::vector<double>& lambda_grid,
                                 const std::vector<double>& eta_grid,
                                 Method method, const SolverOptions& opts) {
  validate_xy(X, y);
  if (lambda_grid.empty() || eta_grid.empty()) {
    throw Error("solve_path: grids must be non-empty");
  }
  const Eigen::Index p = X.cols();
  const std::size_t n_lambda = lambda_grid.size();
  const Eigen::MatrixXd G0 = gram(X);
  const Eigen::VectorXd c = X.transpose() * y;
  const double yty = y.squaredNorm();

  const SymMatrix* sqrt_ptr = nullptr;
  std::optional<SymMatrix> sqrt_sigma;
  if (method == Method::gen) {
    if (Sigma.dim() != p) {
      throw DimensionError("solve_path: Sigma dimension mismatch");
    }
    sqrt_sigma = mat_power_half(Sigma, HalfPower::plus);
    sqrt_ptr = &*sqrt_sigma;
  }

  // Descending-lambda visit order for warm starting.
  std::vector<std::size_t> order(n_lambda);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lambda_grid[a] > lambda_grid[b];
  });

  std::vector<GenEnFit> fits(n_lambda * eta_grid.size());
  for (std::size_t j = 0; j < eta_grid.size(); ++j) {
    const double eta = eta_grid[j];
    if (method == Method::lasso && j > 0) {
      // The lasso ignores eta; every eta row holds the same fits.
      for (std::size_t i = 0; i < n_lambda; ++i) {
        fits[j * n_lambda + i] = fits[i];
      }
      continue;
    }
    Eigen::MatrixXd G = G0;
    if (method == Method::en) {
      G.diagonal().array() += eta;
    } else if (method == Method::gen) {
      G += eta * Sigma.mat();
    }
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(p);
    for (std::size_t i : order) {
      PenaltyConfig penalty{lambda_grid[i],
                            method == Method::lasso ? 0.0 : eta};
      validate_penalty(penalty);
      CdCore core = cd_gram(G, c, penalty.lambda, warm, opts, yty);
      warm = core.beta;
      fits[j * n_lambda + i] = finish_fit(method, penalty, std::move(core), G,
                                          c, yty, sqrt_ptr);
    }
  }
  return fits;
}

std::string fit_to_json(const GenEnFit& fit) {
  nlohmann::ordered_json j;
  j["method"] = method_name(fit.method);
  j["lambda"] = fit.penalty.lambda;
  j["eta"] = fit.penalty.eta;
  j["beta_hat"] = std::vector<double>(
      fit.beta_hat.data(), fit.beta_hat.data() + fit.beta_hat.size());
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["objective"] = fit.objective;
  j["kkt_residual"] = fit.kkt_residual;
  return j.dump(2) + "\n";
}

}  // namespace genen

#include "genen/simulate.hpp"

#include <algorithm>
#include <string>

#include <nlohmann/json.hpp>

#include "genen/io.hpp"

namespace genen {

namespace {

void validate_spec(const CovarianceSpec& spec) {
  if (spec.p < 1 || spec.q < 0 || spec.q > spec.p) {
    throw Error("CovarianceSpec: need p >= 1 and 0 <= q <= p, got p=" +
                std::to_string(spec.p) + " q=" + std::to_string(spec.q));
  }
  for (double a : {spec.alpha1, spec.alpha2, spec.alpha3}) {
    if (!(a >= -1.0 && a <= 1.0)) {
      throw Error("CovarianceSpec: correlations must lie in [-1, 1]");
    }
  }
}

}  // namespace

SymMatrix build_covariance(const CovarianceSpec& spec) {
  validate_spec(spec);
  const int p = spec.p;
  const int q = spec.q;
  Eigen::MatrixXd m(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (i == j) {
        m(i, j) = 1.0;
      } else if (i < q && j < q) {
        m(i, j) = spec.alpha1;
      } else if (i >= q && j >= q) {
        m(i, j) = spec.alpha3;
      } else {
        m(i, j) = spec.alpha2;
      }
    }
  }
  SymMatrix sigma(m);
  const double smallest = lambda_min(sigma);
  if (!(smallest > 0.0)) {
    throw NearSingularError(
        "build_covariance: realized matrix is not positive definite, "
        "smallest eigenvalue " +
            format_double(smallest),
        smallest);
  }
  return sigma;
}

CovarianceFactors CovarianceFactors::from(const SymMatrix& sigma) {
  return CovarianceFactors{sigma, mat_power_half(sigma, HalfPower::plus),
                           mat_power_half(sigma, HalfPower::minus)};
}

Eigen::VectorXd TruthSpec::beta_star(int p) const {
  if (q < 0 || q > p) {
    throw Error("TruthSpec: need 0 <= q <= p");
  }
  if (!sign_pattern.empty() && static_cast<int>(sign_pattern.size()) != q) {
    throw Error("TruthSpec: sign pattern has " +
                std::to_string(sign_pattern.size()) + " entries, expected " +
                std::to_string(q));
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < q; ++j) {
    int s = sign_pattern.empty() ? 1 : sign_pattern[j];
    if (s != 1 && s != -1) {
      throw Error("TruthSpec: sign pattern entries must be -1 or +1");
    }
    beta(j) = s * b;
  }
  return beta;
}

Dataset sample_dataset(const CovarianceSpec& spec, const TruthSpec& truth,
                       int n, double sigma, SeedSpec seed) {
  return sample_dataset(CovarianceFactors::from(build_covariance(spec)), truth,
                        n, sigma, seed);
}

Dataset sample_dataset(const CovarianceFactors& cov, const TruthSpec& truth,
                       int n, double sigma, SeedSpec seed) {
  if (n < 1) {
    throw Error("sample_dataset: need n >= 1");
  }
  if (sigma < 0.0) {
    throw Error("sample_dataset: need sigma >= 0");
  }
  const int p = static_cast<int>(cov.sigma.dim());
  RngStream rng(seed);

  // Draw order is fixed: Z row-major, then epsilon. X = Z Sigma^(1/2) gives
  // rows distributed N(0, Sigma).
  Eigen::MatrixXd z(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      z(i, j) = rng.gaussian();
    }
  }
  Dataset ds;
  ds.X = z * cov.sqrt.mat();
  ds.epsilon.resize(n);
  for (int i = 0; i < n; ++i) {
    ds.epsilon(i) = sigma * rng.gaussian();
  }
  ds.beta_star = truth.beta_star(p);
  ds.y = ds.X * ds.beta_star + ds.epsilon;
  ds.sigma = sigma;
  ds.seed = seed;
  return ds;
}

Eigen::MatrixXd whiten_design(const Eigen::MatrixXd& X,
                              const SymMatrix& sigma_inv_half) {
  if (X.cols() != sigma_inv_half.dim()) {
    throw DimensionError("whiten_design: X has " + std::to_string(X.cols()) +
                         " columns, Sigma^(-1/2) has dimension " +
                         std::to_string(sigma_inv_half.dim()));
  }
  return X * sigma_inv_half.mat();
}

std::string dataset_to_csv(const Dataset& ds) {
  const int n = static_cast<int>(ds.X.rows());
  const int p = static_cast<int>(ds.X.cols());
  std::string out;
  std::vector<std::string> fields;
  fields.reserve(p + 2);
  for (int j = 1; j <= p; ++j) {
    fields.push_back("x" + std::to_string(j));
  }
  fields.push_back("y");
  fields.push_back("beta");
  out += csv_join(fields);
  const int rows = std::max(n, p);
  for (int i = 0; i < rows; ++i) {
    fields.clear();
    for (int j = 0; j < p; ++j) {
      fields.push_back(i < n ? format_double(ds.X(i, j)) : "");
    }
    fields.push_back(i < n ? format_double(ds.y(i)) : "");
    fields.push_back(i < p ? format_double(ds.beta_star(i)) : "");
    out += csv_join(fields);
  }
  return out;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  write_text_file(path, dataset_to_csv(ds));
}

LoadedDataset read_dataset_csv(const std::string& path) {
  const auto rows = read_csv_file(path);
  if (rows.size() < 2) {
    throw Error("dataset csv '" + path + "': no data rows");
  }
  const auto& header = rows[0];
  const int ncols = static_cast<int>(header.size());
  if (ncols < 3 || header[ncols - 2] != "y" || header[ncols - 1] != "beta") {
    throw Error("dataset csv '" + path + "': expected columns x1..xp,y,beta");
  }
  const int p = ncols - 2;
  // Row counts come from the non-empty tails of the y and beta columns.
  int n = 0;
  int beta_rows = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != ncols) {
      throw Error("dataset csv '" + path + "': ragged row " +
                  std::to_string(r));
    }
    if (!rows[r][p].empty()) n = static_cast<int>(r);
    if (!rows[r][p + 1].empty()) beta_rows = static_cast<int>(r);
  }
  if (n < 1 || beta_rows != p) {
    throw Error("dataset csv '" + path + "': inconsistent column lengths");
  }
  LoadedDataset ds;
  ds.X.resize(n, p);
  ds.y.resize(n);
  ds.beta_star.resize(p);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows[i + 1];
    for (int j = 0; j < p; ++j) {
      ds.X(i, j) = parse_double(row[j]);
    }
    ds.y(i) = parse_double(row[p]);
  }
  for (int i = 0; i < p; ++i) {
    ds.beta_star(i) = parse_double(rows[i + 1][p + 1]);
  }
  return ds;
}

std::string dataset_sidecar_json(const Dataset& ds, const CovarianceSpec& spec,
                                 const TruthSpec& truth) {
  nlohmann::ordered_json j;
  j["p"] = spec.p;
  j["q"] = spec.q;
  j["n"] = static_cast<int>(ds.X.rows());
  j["alpha1"] = spec.alpha1;
  j["alpha2"] = spec.alpha2;
  j["alpha3"] = spec.alpha3;
  j["b"] = truth.b;
  std::vector<int> signs = truth.sign_pattern;
  if (signs.empty()) signs.assign(truth.q, 1);
  j["sign_pattern"] = signs;
  j["sigma"] = ds.sigma;
  j["seed"] = ds.seed.seed;
  j["stream"] = ds.seed.stream;
  return j.dump(2) + "\n";
}

void write_covariance_csv(const SymMatrix& sigma, const std::string& path) {
  std::string out;
  std::vector<std::string> fields;
  const Eigen::Index p = sigma.dim();
  for (Eigen::Index i = 0; i < p; ++i) {
    fields.clear();
    for (Eigen::Index j = 0; j < p; ++j) {
      fields.push_back(format_double(sigma(i, j)));
    }
    out += csv_join(fields);
  }
  write_text_file(path, out);
}

SymMatrix read_covariance_csv(const std::string& path) {
  const auto rows = read_csv_file(path);
  const Eigen::Index p = static_cast<Eigen::Index>(rows.size());
  if (p < 1) {
    throw Error("covariance csv '" + path + "': empty");
  }
  Eigen::MatrixXd m(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != p) {
      throw Error("covariance csv '" + path + "': not square");
    }
    for (Eigen::Index j = 0; j < p; ++j) {
      m(i, j) = parse_double(rows[i][j]);
    }
  }
  return SymMatrix(m);
}

}  // namespace genen

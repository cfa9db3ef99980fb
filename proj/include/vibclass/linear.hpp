#pragma once

// One-vs-rest ridge classifier over MiniRocket features. Features are
// standardized with training statistics, targets are +/-1, the closed-form
// solve runs on whichever of X^T X or X X^T is smaller, and the
// regularization strength is picked by leave-one-out GCV from a grid.
// Scores become probabilities through a temperature softmax.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "vibclass/minirocket.hpp"

namespace vibclass {

struct ProbabilityMatrix {
  int num_samples = 0;
  int num_classes = 0;
  std::vector<double> values;  // row-major, rows sum to 1 for probability outputs
  std::string model_tag;

  double at(int i, int k) const { return values[static_cast<std::size_t>(i) * num_classes + k]; }
  double& at(int i, int k) { return values[static_cast<std::size_t>(i) * num_classes + k]; }
};

// Row argmax with ties broken toward the lowest class index.
inline std::vector<int> predict(const ProbabilityMatrix& mat) {
  std::vector<int> out(mat.num_samples);
  for (int i = 0; i < mat.num_samples; ++i) {
    int best = 0;
    for (int k = 1; k < mat.num_classes; ++k)
      if (mat.at(i, k) > mat.at(i, best)) best = k;
    out[i] = best;
  }
  return out;
}

struct RidgeModel {
  int num_classes = 0;
  int num_features = 0;
  double alpha = 1.0;
  double temperature = 1.0;
  std::vector<double> weights;  // (num_classes x num_features), row-major
  std::vector<double> intercepts;
  std::vector<double> feature_means;
  std::vector<double> feature_stds;  // zero-variance features forced to 1
};

inline std::vector<double> default_alpha_grid() {
  return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
}

namespace detail {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRowMat = Eigen::Map<const RowMat>;

}  // namespace detail

inline RidgeModel fit_ridge(const FeatureMatrix& features, const std::vector<int>& labels,
                            const std::vector<double>& alphas = default_alpha_grid()) {
  const int n = features.num_samples;
  const int p = features.num_features;
  if (n != static_cast<int>(labels.size()))
    throw std::invalid_argument("fit_ridge: feature rows and label count differ");
  if (n < 2) throw std::invalid_argument("fit_ridge: need at least 2 samples");
  if (alphas.empty()) throw std::invalid_argument("fit_ridge: alpha grid is empty");
  for (double a : alphas)
    if (!(a > 0)) throw std::invalid_argument("fit_ridge: alphas must be positive");
  for (double v : features.data)
    if (!std::isfinite(v)) throw std::invalid_argument("fit_ridge: non-finite feature value");

  int num_classes = 0;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("fit_ridge: negative label");
    num_classes = std::max(num_classes, l + 1);
  }
  {
    std::vector<bool> present(num_classes, false);
    int distinct = 0;
    for (int l : labels)
      if (!present[l]) {
        present[l] = true;
        ++distinct;
      }
    if (distinct < 2) throw std::invalid_argument("fit_ridge: need at least 2 classes present");
  }

  detail::MapRowMat X(features.data.data(), n, p);

  RidgeModel model;
  model.num_classes = num_classes;
  model.num_features = p;
  model.feature_means.resize(p);
  model.feature_stds.resize(p);

  Eigen::MatrixXd Xs(n, p);
  for (int j = 0; j < p; ++j) {
    const double mean = X.col(j).mean();
    double var = (X.col(j).array() - mean).square().sum() / n;
    double std = std::sqrt(var);
    if (std <= 0.0) std = 1.0;
    model.feature_means[j] = mean;
    model.feature_stds[j] = std;
    Xs.col(j) = (X.col(j).array() - mean) / std;
  }

  // +/-1 one-vs-rest targets, centered; the class mean becomes the intercept.
  Eigen::MatrixXd Y(n, num_classes);
  model.intercepts.resize(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    for (int i = 0; i < n; ++i) Y(i, c) = labels[i] == c ? 1.0 : -1.0;
    const double mean = Y.col(c).mean();
    model.intercepts[c] = mean;
    Y.col(c).array() -= mean;
  }

  const bool feature_form = p <= n;
  Eigen::MatrixXd gram = feature_form ? Eigen::MatrixXd(Xs.transpose() * Xs)
                                      : Eigen::MatrixXd(Xs * Xs.transpose());

  // One eigendecomposition gives the GCV score of every alpha on the grid.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw std::runtime_error("fit_ridge: eigendecomposition failed");
  const Eigen::VectorXd evals = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd proj;  // rotated targets: Q^T y (gram form) or (X V)^T y (feature form)
  if (feature_form)
    proj = (Xs * eig.eigenvectors()).transpose() * Y;
  else
    proj = eig.eigenvectors().transpose() * Y;

  const Eigen::VectorXd total_ss = Y.colwise().squaredNorm();
  double best_gcv = std::numeric_limits<double>::infinity();
  double best_alpha = alphas.front();
  for (double alpha : alphas) {
    const Eigen::ArrayXd shrink = evals.array() / (evals.array() + alpha);
    const double trace_h = shrink.sum();
    double rss = 0.0;
    for (int c = 0; c < num_classes; ++c) {
      // ||(I - H) y||^2 = ||y||^2 - 2 y^T H y + ||H y||^2 expressed in the
      // eigenbasis; components outside the range of X are untouched by H.
      const Eigen::ArrayXd t = proj.col(c).array();
      const double fitted_sq = (shrink.square() * t.square() / evals.array().max(1e-300)).sum();
      const double cross = (shrink * t.square() / evals.array().max(1e-300)).sum();
      rss += total_ss(c) - 2.0 * cross + fitted_sq;
    }
    const double denom = 1.0 - trace_h / n;
    const double gcv = rss / (n * denom * denom);
    if (gcv < best_gcv - 1e-15) {
      best_gcv = gcv;
      best_alpha = alpha;
    }
  }
  model.alpha = best_alpha;

  // Final weights via Cholesky on the chosen form.
  Eigen::MatrixXd W(p, num_classes);
  if (feature_form) {
    Eigen::MatrixXd A = gram;
    A.diagonal().array() += best_alpha;
    W = Eigen::LLT<Eigen::MatrixXd>(A).solve(Xs.transpose() * Y);
  } else {
    Eigen::MatrixXd A = gram;
    A.diagonal().array() += best_alpha;
    W = Xs.transpose() * Eigen::LLT<Eigen::MatrixXd>(A).solve(Y);
  }

  model.weights.resize(static_cast<std::size_t>(num_classes) * p);
  for (int c = 0; c < num_classes; ++c)
    for (int j = 0; j < p; ++j) model.weights[static_cast<std::size_t>(c) * p + j] = W(j, c);
  return model;
}

namespace detail {

inline Eigen::MatrixXd standardized_scores(const RidgeModel& model, const FeatureMatrix& features) {
  if (features.num_features != model.num_features)
    throw std::invalid_argument("ridge: feature count does not match model");
  const int n = features.num_samples;
  const int p = model.num_features;
  MapRowMat X(features.data.data(), n, p);
  MapRowMat W(model.weights.data(), model.num_classes, p);
  Eigen::MatrixXd Xs(n, p);
  for (int j = 0; j < p; ++j)
    Xs.col(j) = (X.col(j).array() - model.feature_means[j]) / model.feature_stds[j];
  Eigen::MatrixXd scores = Xs * W.transpose();
  for (int c = 0; c < model.num_classes; ++c) scores.col(c).array() += model.intercepts[c];
  return scores;
}

}  // namespace detail

inline std::vector<double> decision_scores(const RidgeModel& model, const FeatureMatrix& features) {
  const Eigen::MatrixXd scores = detail::standardized_scores(model, features);
  std::vector<double> out(static_cast<std::size_t>(scores.rows()) * scores.cols());
  for (int i = 0; i < scores.rows(); ++i)
    for (int c = 0; c < scores.cols(); ++c)
      out[static_cast<std::size_t>(i) * scores.cols() + c] = scores(i, c);
  return out;
}

inline ProbabilityMatrix predict_proba(const RidgeModel& model, const FeatureMatrix& features) {
  const Eigen::MatrixXd scores = detail::standardized_scores(model, features);
  ProbabilityMatrix pm;
  pm.num_samples = static_cast<int>(scores.rows());
  pm.num_classes = model.num_classes;
  pm.model_tag = "minirocket";
  pm.values.resize(static_cast<std::size_t>(pm.num_samples) * pm.num_classes);
  for (int i = 0; i < pm.num_samples; ++i) {
    const double m = scores.row(i).maxCoeff();
    double sum = 0.0;
    for (int c = 0; c < pm.num_classes; ++c) {
      const double e = std::exp((scores(i, c) - m) / model.temperature);
      pm.at(i, c) = e;
      sum += e;
    }
    for (int c = 0; c < pm.num_classes; ++c) pm.at(i, c) /= sum;
  }
  return pm;
}

inline nlohmann::json to_json(const RidgeModel& model) {
  return nlohmann::json{{"format", "vibclass.ridge"},
                        {"version", 1},
                        {"num_classes", model.num_classes},
                        {"num_features", model.num_features},
                        {"alpha", model.alpha},
                        {"temperature", model.temperature},
                        {"weights", model.weights},
                        {"intercepts", model.intercepts},
                        {"feature_means", model.feature_means},
                        {"feature_stds", model.feature_stds}};
}

inline RidgeModel ridge_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "vibclass.ridge" || j.value("version", 0) != 1)
    throw std::runtime_error("ridge: unrecognized model artifact");
  RidgeModel m;
  m.num_classes = j.at("num_classes").get<int>();
  m.num_features = j.at("num_features").get<int>();
  m.alpha = j.at("alpha").get<double>();
  m.temperature = j.at("temperature").get<double>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.intercepts = j.at("intercepts").get<std::vector<double>>();
  m.feature_means = j.at("feature_means").get<std::vector<double>>();
  m.feature_stds = j.at("feature_stds").get<std::vector<double>>();
  return m;
}

inline void save_ridge(const RidgeModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("I/O error: cannot open '" + path + "' for writing");
  out << to_json(model).dump() << "\n";
}

inline RidgeModel load_ridge(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("I/O error: cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return ridge_from_json(j);
}

}  // namespace vibclass

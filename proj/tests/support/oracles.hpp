// Independent reference implementations used by unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "ptl/dynamics/ensemble.hpp"
#include "ptl/dynamics/progressive.hpp"
#include "ptl/dynamics/training.hpp"
#include "ptl/nn/mlp.hpp"
#include "ptl/nn/rng.hpp"
#include "ptl/replay/trajectory.hpp"

namespace ptl::oracle {

// Entry-wise |a - n| / max(|a|, |n|, floor).
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Central differences of `loss` with respect to every entry of `param`.
// Returns the largest relative error against `analytic`.
inline double fd_check(std::span<double> param, std::span<const double> analytic,
                       const std::function<double()>& loss, double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double keep = param[i];
    param[i] = keep + h;
    const double up = loss();
    param[i] = keep - h;
    const double down = loss();
    param[i] = keep;
    worst = std::max(worst, relative_error(analytic[i], (up - down) / (2.0 * h)));
  }
  return worst;
}

// Direct evaluation of 1/2 mean ||y - f(x)||^2 for a plain network, no shared code
// with the training module beyond the forward pass.
inline double plain_loss(const nn::MlpParams& p, const Matrix& x, const Matrix& y) {
  Matrix h = x;
  for (int k = 0; k < nn::kLayerCount; ++k) {
    Matrix z = p.weights[k] * h;
    z.colwise() += p.biases[k];
    h = k + 1 < nn::kLayerCount ? Matrix(z.cwiseMax(0.0)) : z;
  }
  return 0.5 * (y - h).squaredNorm() / static_cast<double>(x.cols());
}

// Two-column forward written out layer by layer.
inline Matrix progressive_reference_forward(const dynamics::ProgressiveModel& pm, const Matrix& x) {
  auto layer = [](const nn::MlpParams& p, int k, const Matrix& in) {
    Matrix z = p.weights[k] * in;
    z.colwise() += p.biases[k];
    return z;
  };
  std::array<Matrix, nn::kHiddenCount> hs;
  // Source column sees inputs normalized with its own statistics.
  Matrix h(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double raw = x(r, c) * pm.normalizer.input_std[r] + pm.normalizer.input_mean[r];
      h(r, c) = (raw - pm.source_normalizer.input_mean[r]) / pm.source_normalizer.input_std[r];
    }
  for (int k = 0; k < nn::kHiddenCount; ++k) {
    h = layer(pm.source_column, k, h).cwiseMax(0.0);
    hs[k] = h;
  }
  Matrix t = x;
  for (int k = 0; k < nn::kLayerCount; ++k) {
    Matrix z = layer(pm.target_column, k, t);
    for (int j = 0; j < nn::kHiddenCount; ++j) {
      const int recv = pm.wiring == dynamics::Wiring::kPtl ? j : j + 1;
      if (recv == k) z += pm.lateral_weights[j] * (pm.lateral_scales[j] * hs[j]).cwiseMax(0.0);
    }
    t = k + 1 < nn::kLayerCount ? Matrix(z.cwiseMax(0.0)) : z;
  }
  return t;
}

inline double progressive_loss(const dynamics::ProgressiveModel& pm, const Matrix& x, const Matrix& y) {
  return 0.5 * (y - progressive_reference_forward(pm, x)).squaredNorm() / static_cast<double>(x.cols());
}

inline void randomize_biases(nn::MlpParams& p, nn::RngStream& rng, double scale = 0.3) {
  for (auto& b : p.biases)
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.uniform(-scale, scale);
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, nn::RngStream& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(-scale, scale);
  return m;
}

// Smallest |pre-activation| over every ReLU in the plain network (kink distance).
inline double plain_kink_margin(const nn::MlpParams& p, const Matrix& x) {
  const nn::MlpTrace t = nn::mlp_forward_trace(p, x);
  double m = INFINITY;
  for (const auto& pre : t.pre) m = std::min(m, pre.cwiseAbs().minCoeff());
  return m;
}

inline double progressive_kink_margin(const dynamics::ProgressiveModel& pm, const Matrix& x) {
  const dynamics::ProgressiveTrace t = dynamics::progressive_trace(pm, x);
  double m = INFINITY;
  for (int k = 0; k < nn::kHiddenCount; ++k) {
    m = std::min(m, t.source.pre[k].cwiseAbs().minCoeff());
    m = std::min(m, t.target.pre[k].cwiseAbs().minCoeff());
    // Inactive source units stay at the kink for every alpha; skip them.
    const Matrix& h = t.source.hidden[k];
    for (Eigen::Index i = 0; i < h.size(); ++i)
      if (h.data()[i] > 0.0) m = std::min(m, std::abs(pm.lateral_scales[k] * h.data()[i]));
  }
  return m;
}

// Straight-line selection arithmetic.
struct SelectionOracle {
  double lambda1 = 0.4;
  double rho = 0.1;
  int window = 5;

  double state_td(const replay::Trajectory& t) const {
    const int T = t.length();
    double sum = 0.0;
    for (int i = 0; i < T; ++i) {
      double sq = 0.0;
      for (int idx : t.agent_state_indices) {
        const double d = t.states[i + 1][idx] - t.states[i][idx];
        sq += d * d;
      }
      sum += sq;
    }
    return sum / T;
  }

  double mean_score(const replay::Trajectory& t) const {
    const int n = std::min<int>(window, static_cast<int>(t.scores.size()));
    double s = 0.0;
    for (int i = static_cast<int>(t.scores.size()) - n; i < static_cast<int>(t.scores.size()); ++i) s += t.scores[i];
    return s / n;
  }

  double pv(const replay::Trajectory& t) const {
    double reward = 0.0;
    for (double r : t.rewards) reward += r;
    return (lambda1 * reward + (1.0 - lambda1) * mean_score(t)) * std::exp(-state_td(t));
  }

  std::vector<double> probabilities(const std::vector<double>& pv) const {
    std::vector<double> sorted = pv;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double med = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (pv[i] > med + 1e-12)
        p[i] = (1.0 + rho) / n;
      else if (pv[i] < med - 1e-12)
        p[i] = (1.0 - rho) / n;
      else
        p[i] = 1.0 / n;
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= total;
    return p;
  }
};

// Random trajectory with `agent_dims` hand coordinates and one extra object coordinate.
inline replay::Trajectory random_trajectory(nn::RngStream& rng, int length, int agent_dims = 2) {
  replay::Trajectory t;
  t.id = "r" + std::to_string(rng.uniform_int(0, 1 << 30));
  t.env_params = envs::spinner_params(1.0);
  for (int i = 0; i < agent_dims; ++i) t.agent_state_indices.push_back(i);
  const int ds = agent_dims + 2;
  for (int i = 0; i <= length; ++i) {
    Vector s(ds);
    for (int j = 0; j < ds; ++j) s[j] = rng.uniform(-1.0, 1.0);
    t.states.push_back(s);
  }
  for (int i = 0; i < length; ++i) {
    Vector a(2);
    a << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    t.actions.push_back(a);
    t.rewards.push_back(rng.uniform(-10.0, 0.0));
    t.scores.push_back(rng.uniform(-1.0, 0.0));
  }
  return t;
}

}  // namespace ptl::oracle

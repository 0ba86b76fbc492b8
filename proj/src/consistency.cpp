#include "mvdc/consistency.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "mvdc/error.hpp"
#include "mvdc/kernels.hpp"
#include "mvdc/parallel.hpp"

namespace mvdc {

LoopDifferenceVector loop_difference(std::span<const uint8_t> hyps) {
  int k = static_cast<int>(hyps.size());
  if (k < 2) throw DomainError("loop needs at least 2 hypotheses");
  if (k > 8) throw DomainError("loop supports at most 8 hypotheses");
  LoopDifferenceVector v;
  v.k = k;
  for (int i = 0; i < k; ++i) {
    v.delta[i] = static_cast<int32_t>(hyps[i]) -
                 static_cast<int32_t>(hyps[(i + 1) % k]);
  }
  return v;
}

int64_t loop_energy(const LoopDifferenceVector& v) {
  int64_t e = 0;
  for (int i = 0; i < v.k; ++i) {
    e += static_cast<int64_t>(v.delta[i]) * v.delta[i];
  }
  return e;
}

std::vector<double> subspace_basis(int k) {
  if (k < 2) throw DomainError("basis needs k >= 2");
  std::vector<double> U(static_cast<size_t>(k) * k, 0.0);
  auto col = [&](int c) { return [&U, k, c](int r) -> double& {
    return U[static_cast<size_t>(r) * k + c];
  }; };
  double inv = 1.0 / std::sqrt(static_cast<double>(k));
  for (int r = 0; r < k; ++r) col(0)(r) = inv;
  std::vector<double> w(k);
  for (int c = 1; c < k; ++c) {
    std::fill(w.begin(), w.end(), 0.0);
    w[c - 1] = 1.0;
    w[c] = -1.0;
    for (int p = 0; p < c; ++p) {
      double dot = 0.0;
      for (int r = 0; r < k; ++r) dot += w[r] * col(p)(r);
      for (int r = 0; r < k; ++r) w[r] -= dot * col(p)(r);
    }
    double norm = 0.0;
    for (int r = 0; r < k; ++r) norm += w[r] * w[r];
    norm = std::sqrt(norm);
    for (int r = 0; r < k; ++r) col(c)(r) = w[r] / norm;
  }
  return U;
}

std::array<double, 8> transform_loop(std::span<const double> U,
                                     const LoopDifferenceVector& v) {
  int k = v.k;
  if (static_cast<int>(U.size()) != k * k) {
    throw DomainError("basis dimension does not match loop vector");
  }
  std::array<double, 8> psi{};
  for (int c = 0; c < k; ++c) {
    double s = 0.0;
    for (int r = 0; r < k; ++r) {
      s += U[static_cast<size_t>(r) * k + c] * v.delta[r];
    }
    psi[c] = s;
  }
  return psi;
}

CovarianceModel estimate_covariance(const HypothesisStack& stack) {
  const int k = stack.k;
  const int w = stack.width;
  const int h = stack.height;
  const size_t n = static_cast<size_t>(w) * h;

  // Cyclic difference planes and the joint validity mask; exact integer
  // accumulation keeps the reduction order-free.
  std::vector<uint8_t> full(n, 1);
  parallel_chunks(h, [&](int y0, int y1) {
    size_t a = static_cast<size_t>(y0) * w;
    size_t b = static_cast<size_t>(y1) * w;
    for (int i = 0; i < k; ++i) {
      const uint8_t* vmask = stack.valid[i].data.data();
      for (size_t p = a; p < b; ++p) full[p] &= vmask[p];
    }
  });

  std::vector<std::vector<int16_t>> delta(k, std::vector<int16_t>(n));
  parallel_chunks(h, [&](int y0, int y1) {
    size_t a = static_cast<size_t>(y0) * w;
    size_t b = static_cast<size_t>(y1) * w;
    for (int i = 0; i < k; ++i) {
      const uint8_t* di = stack.hyp[i].data.data();
      const uint8_t* dj = stack.hyp[(i + 1) % k].data.data();
      int16_t* out = delta[i].data();
      for (size_t p = a; p < b; ++p) {
        out[p] = static_cast<int16_t>(static_cast<int>(di[p]) -
                                      static_cast<int>(dj[p]));
      }
    }
  });

  int64_t count = 0;
  for (size_t p = 0; p < n; ++p) count += full[p];
  if (count < 100) {
    throw InsufficientStatistics(
        "covariance estimation needs >= 100 jointly valid pixels, got " +
        std::to_string(count));
  }

  const kern::Ops& ops = kern::active_ops();
  std::vector<int64_t> S(static_cast<size_t>(k) * k, 0);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      int64_t s = ops.dot_masked_i16(delta[i].data(), delta[j].data(),
                                     full.data(), n);
      S[static_cast<size_t>(i) * k + j] = s;
      S[static_cast<size_t>(j) * k + i] = s;
    }
  }

  CovarianceModel model;
  model.k = k;
  model.samples = count;
  model.C.resize(static_cast<size_t>(k) * k);
  double trace = 0.0;
  double off = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double c = static_cast<double>(S[static_cast<size_t>(i) * k + j]) /
                 static_cast<double>(count);
      model.C[static_cast<size_t>(i) * k + j] = c;
      if (i == j) {
        trace += c;
      } else {
        off += c;
      }
    }
  }
  model.sigma2 = trace / k;
  model.degenerate = model.sigma2 == 0.0;
  if (model.degenerate) {
    model.rho = 0.0;
  } else {
    double mean_off = off / (static_cast<double>(k) * (k - 1));
    double rho = mean_off / model.sigma2;
    double lo = 1.0 / (1.0 - k);
    model.rho = std::clamp(rho, lo, 1.0);
  }

  model.U = subspace_basis(k);
  model.lambda_model.resize(k);
  model.lambda_model[0] = model.sigma2 * (1.0 + (k - 1) * model.rho);
  for (int i = 1; i < k; ++i) {
    model.lambda_model[i] = model.sigma2 * (1.0 - model.rho);
  }

  Eigen::MatrixXd C(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      C(i, j) = model.C[static_cast<size_t>(i) * k + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  model.lambda_numeric.resize(k);
  for (int i = 0; i < k; ++i) model.lambda_numeric[i] = es.eigenvalues()(i);

  return model;
}

double consistency_threshold(double alpha_weight, int m, double sigma2) {
  if (m < 2) throw DomainError("threshold needs subset size >= 2");
  if (sigma2 < 0.0) throw DomainError("sigma2 must be non-negative");
  return alpha_weight * alpha_weight * static_cast<double>(m) / (m - 1) *
         sigma2;
}

namespace {

int64_t subset_energy(const int* vals, const int* combo, int m) {
  int64_t e = 0;
  for (int a = 0; a < m; ++a) {
    int64_t d = vals[combo[a]] - vals[combo[(a + 1) % m]];
    e += d * d;
  }
  return e;
}

bool next_combination(int* combo, int m, int n) {
  int i = m - 1;
  while (i >= 0 && combo[i] == n - m + i) --i;
  if (i < 0) return false;
  ++combo[i];
  for (int j = i + 1; j < m; ++j) combo[j] = combo[j - 1] + 1;
  return true;
}

}  // namespace

ConsistencyResult test_pixel(std::span<const uint8_t> values,
                             std::span<const int> views, double alpha_weight,
                             double sigma2) {
  if (values.size() != views.size()) {
    throw DomainError("hypothesis values and view indices differ in count");
  }
  const int m0 = static_cast<int>(values.size());
  ConsistencyResult res;
  if (m0 < 2) {
    res.status = PixelStatus::InsufficientData;
    return res;
  }
  if (m0 > 8) throw DomainError("at most 8 hypotheses per pixel");

  // Canonical ascending viewpoint order defines the cyclic loop.
  int order[8];
  for (int i = 0; i < m0; ++i) order[i] = i;
  std::sort(order, order + m0,
            [&views](int a, int b) { return views[a] < views[b]; });
  int vals[8];
  int view_ids[8];
  for (int i = 0; i < m0; ++i) {
    vals[i] = values[order[i]];
    view_ids[i] = views[order[i]];
  }

  int full[8];
  for (int i = 0; i < m0; ++i) full[i] = i;
  int64_t full_e = subset_energy(vals, full, m0);
  if (static_cast<double>(full_e) <=
      consistency_threshold(alpha_weight, m0, sigma2)) {
    res.status = PixelStatus::Accepted;
    res.m = m0;
    res.energy = full_e;
    for (int i = 0; i < m0; ++i) res.subset |= 1u << view_ids[i];
    return res;
  }

  for (int m = m0 - 1; m >= 2; --m) {
    double theta = consistency_threshold(alpha_weight, m, sigma2);
    int combo[8];
    for (int i = 0; i < m; ++i) combo[i] = i;
    int64_t best_e = -1;
    int best_combo[8];
    do {
      int64_t e = subset_energy(vals, combo, m);
      if (static_cast<double>(e) <= theta && (best_e < 0 || e < best_e)) {
        best_e = e;
        std::copy(combo, combo + m, best_combo);
      }
    } while (next_combination(combo, m, m0));
    if (best_e >= 0) {
      res.status = PixelStatus::Accepted;
      res.m = m;
      res.energy = best_e;
      for (int i = 0; i < m; ++i) res.subset |= 1u << view_ids[best_combo[i]];
      return res;
    }
  }

  res.status = PixelStatus::ExtremeError;
  res.energy = full_e;
  return res;
}

ConsistencyMap test_image(const HypothesisStack& stack, double alpha_weight,
                          const CovarianceModel& model) {
  const int w = stack.width;
  const int h = stack.height;
  const int k = stack.k;
  ConsistencyMap map;
  map.width = w;
  map.height = h;
  map.k = k;
  map.status = Grid8(w, h, static_cast<uint8_t>(PixelStatus::InsufficientData));
  map.subset = Grid8(w, h, 0);
  map.energy = Grid<int32_t>(w, h, 0);
  map.full_energy = Grid<int32_t>(w, h, 0);
  map.model = model;

  parallel_chunks(h, [&](int y0, int y1) {
    uint8_t vals[8];
    int views[8];
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        int m0 = 0;
        for (int i = 0; i < k; ++i) {
          if (stack.valid[i].at(y, x)) {
            vals[m0] = stack.hyp[i].at(y, x);
            views[m0] = i;
            ++m0;
          }
        }
        if (m0 >= 2) {
          LoopDifferenceVector lv =
              loop_difference(std::span<const uint8_t>(vals, m0));
          map.full_energy.at(y, x) = static_cast<int32_t>(loop_energy(lv));
        }
        ConsistencyResult r =
            test_pixel(std::span<const uint8_t>(vals, m0),
                       std::span<const int>(views, m0), alpha_weight,
                       model.sigma2);
        map.status.at(y, x) = static_cast<uint8_t>(r.status);
        map.subset.at(y, x) = r.subset;
        map.energy.at(y, x) =
            r.status == PixelStatus::Accepted
                ? static_cast<int32_t>(r.energy)
                : 0;
      }
    }
  });
  return map;
}

ConsistencyMap test_image(const HypothesisStack& stack, double alpha_weight) {
  return test_image(stack, alpha_weight, estimate_covariance(stack));
}

Grid8 energy_image(const ConsistencyMap& map) {
  Grid8 out(map.width, map.height, 0);
  double cap = 4.0 * map.model.sigma2;
  for (size_t p = 0; p < out.size(); ++p) {
    int32_t e = map.full_energy.data[p];
    if (cap <= 0.0) {
      out.data[p] = e > 0 ? 255 : 0;
    } else {
      double v = std::min(static_cast<double>(e), cap) / cap * 255.0;
      out.data[p] = static_cast<uint8_t>(std::lround(v));
    }
  }
  return out;
}

Grid8 status_image(const ConsistencyMap& map) {
  Grid8 out(map.width, map.height, 0);
  for (size_t p = 0; p < out.size(); ++p) {
    switch (static_cast<PixelStatus>(map.status.data[p])) {
      case PixelStatus::ExtremeError:
        out.data[p] = 0;
        break;
      case PixelStatus::Accepted:
        out.data[p] = 255;
        break;
      case PixelStatus::InsufficientData:
        out.data[p] = 128;
        break;
    }
  }
  return out;
}

}  // namespace mvdc

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mvdc/image.hpp"
#include "mvdc/warp.hpp"

namespace mvdc {

// Cyclic inter-view depth differences at one pixel; sums to zero exactly.
struct LoopDifferenceVector {
  int k = 0;
  std::array<int32_t, 8> delta{};
};

LoopDifferenceVector loop_difference(std::span<const uint8_t> hyps);
int64_t loop_energy(const LoopDifferenceVector& v);

// Orthonormal k x k basis whose first column is (1/sqrt(k)) * ones; the rest
// spans the zero-sum subspace (Gram-Schmidt over e1-e2, e2-e3, ...).
// Row-major, U[r * k + c] = component r of basis vector c.
std::vector<double> subspace_basis(int k);

// psi = U^T delta.
std::array<double, 8> transform_loop(std::span<const double> U,
                                     const LoopDifferenceVector& v);

struct CovarianceModel {
  int k = 0;
  int64_t samples = 0;
  double sigma2 = 0.0;
  double rho = 0.0;
  bool degenerate = false;            // sigma2 == 0
  std::vector<double> C;              // k x k, row major
  std::vector<double> U;              // subspace basis
  std::vector<double> lambda_model;   // [sigma2*(1+(k-1)rho), sigma2*(1-rho)...]
  std::vector<double> lambda_numeric; // eigenvalues of C, ascending
};

// Zero-mean second moments over pixels where every layer is valid, exact
// int64 accumulation. Throws InsufficientStatistics below 100 such pixels.
CovarianceModel estimate_covariance(const HypothesisStack& stack);

double consistency_threshold(double alpha_weight, int m, double sigma2);

enum class PixelStatus : uint8_t {
  ExtremeError = 0,
  Accepted = 1,
  InsufficientData = 2,
};

struct ConsistencyResult {
  PixelStatus status = PixelStatus::InsufficientData;
  uint8_t subset = 0;   // bit i set = view i accepted
  int m = 0;            // accepted subset size
  int64_t energy = 0;   // loop energy of the accepted subset

  bool consistent() const { return status == PixelStatus::Accepted; }
};

// Tests the full loop first, then all cyclically re-closed subsets level by
// level (m0-1 down to 2); the first level with a pass wins with its smallest
// energy, ties resolved to the lexicographically smallest index set.
ConsistencyResult test_pixel(std::span<const uint8_t> values,
                             std::span<const int> views, double alpha_weight,
                             double sigma2);

struct ConsistencyMap {
  int width = 0;
  int height = 0;
  int k = 0;
  Grid8 status;               // PixelStatus values
  Grid8 subset;               // accepted-view bitmask
  Grid<int32_t> energy;       // accepted-subset energy, 0 elsewhere
  Grid<int32_t> full_energy;  // all-valid loop energy where >= 2 valid
  CovarianceModel model;
};

ConsistencyMap test_image(const HypothesisStack& stack, double alpha_weight);
ConsistencyMap test_image(const HypothesisStack& stack, double alpha_weight,
                          const CovarianceModel& model);

// 8-bit views for serialization: energy clipped at 4*sigma2 and scaled,
// status as 0 (extreme) / 128 (insufficient) / 255 (accepted).
Grid8 energy_image(const ConsistencyMap& map);
Grid8 status_image(const ConsistencyMap& map);

}  // namespace mvdc
